"""Text format, parser and validator for database-driven programs."""

from __future__ import annotations

from pathlib import Path
from typing import Union

from . import ast
from .ast import *  # noqa: F401,F403
from .check import Column, attr_index, output_attrs, query_scope, relation_scope, validate
from .errors import Diagnostic, IRError, IRSyntaxError, IRValidationError
from .parser import parse_syntax, tokenize
from .printer import program as pretty


def parse_program(text: str) -> ast.Program:
    """Parse and validate IR text."""
    return validate(parse_syntax(text))


def load_program(path: Union[str, Path]) -> ast.Program:
    return parse_program(Path(path).read_text(encoding="utf-8"))


__all__ = [
    "Column", "Diagnostic", "IRError", "IRSyntaxError", "IRValidationError",
    "attr_index", "load_program", "output_attrs", "parse_program", "parse_syntax",
    "pretty", "query_scope", "relation_scope", "tokenize", "validate",
]
