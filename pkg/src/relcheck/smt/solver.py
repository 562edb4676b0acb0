"""External solver process driver and verdict cache."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import shlex
import shutil
import subprocess
import threading
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional, Sequence

from ..tra import terms as T
from .countermodel import find_countermodel
from .encode import NATIVE, EncodeOptions, encode

log = logging.getLogger(__name__)

VALID, NOT_VALID, UNKNOWN = "valid", "not-valid", "unknown"
TIMEOUT, SOLVER_UNKNOWN, SOLVER_ERROR = "timeout", "solver-unknown", "solver-error"
COUNTERMODEL = "countermodel"

DEFAULT_CMD = ("z3", "-in", "-smt2")


class SolverEnvironmentError(RuntimeError):
    """The configured solver binary cannot be started at all."""


@dataclass(frozen=True)
class Verdict:
    status: str
    reason: Optional[str] = None
    wall_ms: float = 0.0
    script_bytes: int = 0
    cached: bool = False

    @property
    def valid(self) -> bool:
        return self.status == VALID

    def __str__(self) -> str:
        return self.status if self.reason is None else f"{self.status}({self.reason})"


class VerdictCache:
    """Verdicts keyed by the SHA-256 of the script text.

    Loaded from and saved to a JSON file; safe to share between threads.
    """

    def __init__(self, path: Optional[os.PathLike] = None):
        self.path = Path(path) if path else None
        self._lock = threading.Lock()
        self._data: dict[str, list] = {}
        if self.path and self.path.exists():
            self._data = json.loads(self.path.read_text(encoding="utf-8"))

    @staticmethod
    def key(script: str) -> str:
        return hashlib.sha256(script.encode("utf-8")).hexdigest()

    def get(self, script: str) -> Optional[tuple[str, Optional[str]]]:
        with self._lock:
            hit = self._data.get(self.key(script))
        return (hit[0], hit[1]) if hit else None

    def put(self, script: str, status: str, reason: Optional[str]) -> None:
        with self._lock:
            self._data[self.key(script)] = [status, reason]

    def save(self) -> None:
        if self.path is None:
            return
        with self._lock:
            text = json.dumps(self._data, sort_keys=True, indent=0)
        self.path.write_text(text + "\n", encoding="utf-8")

    def __len__(self) -> int:
        return len(self._data)


@dataclass
class SolverConfig:
    cmd: Sequence[str] = DEFAULT_CMD
    timeout_ms: int = 2000
    emit_dir: Optional[Path] = None
    strings: str = NATIVE
    mbqi: Optional[bool] = None
    set_timeout_option: bool = True
    cache: Optional[VerdictCache] = None
    simplify: bool = True
    _counter: list = field(default_factory=lambda: [0], repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        if isinstance(self.cmd, str):
            self.cmd = tuple(shlex.split(self.cmd))
        if self.timeout_ms <= 0:
            raise ValueError("query budget must be positive")
        if self.emit_dir is not None:
            self.emit_dir = Path(self.emit_dir)

    def next_id(self) -> int:
        with self._lock:
            self._counter[0] += 1
            return self._counter[0]

    def options(self, comment: Optional[str] = None, value_types=None) -> EncodeOptions:
        return EncodeOptions(strings=self.strings, mbqi=self.mbqi,
                             timeout_ms=self.timeout_ms if self.set_timeout_option else None,
                             comment=comment, value_types=value_types or {},
                             simplify=self.simplify)


def check_environment(cfg: SolverConfig) -> None:
    if not cfg.cmd or shutil.which(cfg.cmd[0]) is None:
        raise SolverEnvironmentError(f"solver executable not found: {cfg.cmd[0] if cfg.cmd else '<empty>'}")


def run_script(script: str, cfg: SolverConfig) -> tuple[str, Optional[str]]:
    """Feed ``script`` to a fresh solver process; map its last line to a status."""
    grace = max(0.5, cfg.timeout_ms / 1000 * 0.5)
    try:
        proc = subprocess.run(list(cfg.cmd), input=script, capture_output=True, text=True,
                              timeout=cfg.timeout_ms / 1000 + grace)
    except subprocess.TimeoutExpired:
        return UNKNOWN, TIMEOUT
    except OSError as e:
        log.warning("solver failed to start: %s", e)
        return UNKNOWN, SOLVER_ERROR
    lines = [ln.strip() for ln in proc.stdout.splitlines() if ln.strip()]
    why = ""
    if lines and lines[-1].startswith("(:reason-unknown"):
        why = lines.pop()
    last = lines[-1] if lines else ""
    if last == "unknown" and ("timeout" in why or "canceled" in why):
        return UNKNOWN, TIMEOUT
    if last == "unsat":
        return VALID, None
    if last == "sat":
        return NOT_VALID, None
    if last == "unknown":
        return UNKNOWN, SOLVER_UNKNOWN
    if last == "timeout":
        return UNKNOWN, TIMEOUT
    log.warning("unexpected solver output (exit %s): %s %s", proc.returncode,
                last[:200], proc.stderr.strip()[:200])
    return UNKNOWN, SOLVER_ERROR


def check_script(script: str, cfg: SolverConfig) -> Verdict:
    qid = cfg.next_id()
    if cfg.emit_dir is not None:
        cfg.emit_dir.mkdir(parents=True, exist_ok=True)
        (cfg.emit_dir / f"q{qid}.smt2").write_text(script, encoding="utf-8")
    size = len(script.encode("utf-8"))
    if cfg.cache is not None:
        hit = cfg.cache.get(script)
        if hit is not None:
            return Verdict(hit[0], hit[1], 0.0, size, cached=True)
    t0 = time.perf_counter()
    status, reason = run_script(script, cfg)
    wall = (time.perf_counter() - t0) * 1000
    if cfg.cache is not None and reason != SOLVER_ERROR:
        cfg.cache.put(script, status, reason)
    return Verdict(status, reason, wall, size)


def check_validity(F: T.Formula, cfg: Optional[SolverConfig] = None, axioms=None,
                   comment: Optional[str] = None, value_types=None,
                   countermodel: bool = True) -> Verdict:
    """Valid iff the solver refutes ¬F; anything else is not a proof.

    When the solver gives up and ``countermodel`` is set, a small concrete
    search may still establish NotValid (reason ``countermodel``).
    """
    cfg = cfg or SolverConfig()
    script = encode(F, axioms, cfg.options(comment, value_types))
    v = check_script(script, cfg)
    if v.status == UNKNOWN and v.reason != SOLVER_ERROR and countermodel:
        if find_countermodel(F, value_types) is not None:
            return replace(v, status=NOT_VALID, reason=COUNTERMODEL)
    return v
