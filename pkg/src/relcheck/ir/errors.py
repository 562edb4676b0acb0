from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import Pos


class IRError(Exception):
    """Base class for everything the IR front end rejects."""


class IRSyntaxError(IRError):
    def __init__(self, message: str, pos: Pos):
        super().__init__(f"{pos.line}:{pos.col}: syntax error: {message}")
        self.message = message
        self.pos = pos


@dataclass(frozen=True)
class Diagnostic:
    message: str
    pos: Optional[Pos] = None

    def __str__(self) -> str:
        return f"{self.pos}: {self.message}" if self.pos else self.message


class IRValidationError(IRError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))
