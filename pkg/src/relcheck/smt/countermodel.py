"""Concrete countermodel search for formulas the solver leaves undecided.

Quantified list axioms make the solver give up on plenty of plainly false
goals (``x ∪ y = y ∪ x`` is the standard one).  This module looks for a
small assignment falsifying the goal by direct evaluation.  Finding one is
a proof of non-validity, so it may only ever turn Unknown into NotValid.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Mapping, Optional

from ..interp import Evaluator, ModelError
from ..tra import terms as T
from .encode import negated_assertions

INT_POOL = (0, 1, 2)
STR_POOL = ("", "a")


@dataclass(frozen=True)
class Countermodel:
    env: Mapping[tuple[str, str], object]

    def __str__(self) -> str:
        return ", ".join(f"{n}={v!r}" for (n, _), v in sorted(self.env.items()))


def _arities(fs) -> dict[str, int]:
    """Smallest tuple width each relation variable must have to be read."""
    need: dict[str, int] = {}

    def bump(t, k):
        if isinstance(t, T.RVar):
            need[t.name] = max(need.get(t.name, 1), k)
        elif isinstance(t, (T.Sel, T.Diff, T.DelFirst)):
            bump(t.arg if not isinstance(t, T.Diff) else t.left, k)
            if isinstance(t, T.Diff):
                bump(t.right, k)
        elif isinstance(t, T.Union_):
            bump(t.left, k)
            bump(t.right, k)
        elif isinstance(t, T.UpdAttr):
            bump(t.arg, k)

    for f in fs:
        for n in T.walk(f):
            if isinstance(n, T.Proj):
                bump(n.arg, max(n.indices, default=1))
            elif isinstance(n, T.Sel):
                bump(n.arg, max(T.pred_indices(n.pred), default=1))
            elif isinstance(n, T.UpdAttr):
                bump(n.arg, n.index)
            elif isinstance(n, T.Prod):
                bump(n.left, n.n)
            elif isinstance(n, T.Eq) and isinstance(n.left, T.RVar) and isinstance(n.right, T.RVar):
                k = max(need.get(n.left.name, 1), need.get(n.right.name, 1))
                bump(n.left, k)
                bump(n.right, k)
    return need


def _pool(type_: Optional[str]) -> tuple:
    if type_ == "Int":
        return INT_POOL
    if type_ == "String":
        return STR_POOL
    return INT_POOL + STR_POOL


def _holds(fs, env) -> bool:
    ev = Evaluator(env)
    try:
        return all(ev.formula(f, {}) for f in fs)
    except ModelError:
        return False


def find_countermodel(F: T.Formula, value_types: Optional[Mapping[str, str]] = None,
                      samples: int = 3000, max_rows: int = 2, seed: int = 0) -> Optional[Countermodel]:
    """A small assignment under which ``F`` is false, or None.

    Tries every assignment where each relation holds at most one row drawn
    from a tiny pool, then random assignments with up to ``max_rows`` rows.
    """
    value_types = value_types or {}
    fs, skolems = negated_assertions(F)
    free = {(n, s) for f in fs for n, s in T.free_vars(f)}
    if any(s == T.TUP for _, s in free):
        return None
    rels = sorted(n for n, s in free if s == T.REL)
    vals = sorted(n for n, s in free if s == T.VAL)
    width = _arities(fs)

    def rows_for(name, k):
        pool = INT_POOL[:2]
        return [()] + [(row,) for row in itertools.product(pool, repeat=width.get(name, 1))][: k]

    choices = [rows_for(r, 4) for r in rels] + [_pool(value_types.get(v)) for v in vals]
    keys = [(r, T.REL) for r in rels] + [(v, T.VAL) for v in vals]
    total = 1
    for c in choices:
        total *= len(c)
    if total <= samples:
        for combo in itertools.product(*choices):
            env = dict(zip(keys, combo))
            if _holds(fs, env):
                return Countermodel(env)
    rng = random.Random(seed)
    for _ in range(samples):
        env = {}
        for r in rels:
            w = width.get(r, 1)
            n = rng.randint(0, max_rows)
            env[(r, T.REL)] = tuple(tuple(rng.choice(INT_POOL) for _ in range(w)) for _ in range(n))
        for v in vals:
            env[(v, T.VAL)] = rng.choice(_pool(value_types.get(v)))
        if _holds(fs, env):
            return Countermodel(env)
    return None
