"""Strongest postconditions of update statements over T_RA formulas.

Each statement introduces one existential standing for the pre-state of the
relation it writes::

    sp(Φ, ins(R, r))      = ∃x. R = x ∪ [r]                    ∧ Φ[x/R]
    sp(Φ, del(R, φ))      = ∃x. R = σ¬φ(x)                     ∧ Φ[x/R]
    sp(Φ, upd(R, φ, a, v)) = ∃x. R = σ¬φ(x) ∪ σφ(x)⟨⟨a ← v⟩⟩   ∧ Φ[x/R]

The statement's own predicate is read in the pre-state, so any occurrence
of R inside it (membership subqueries) is renamed to x as well.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .ir import ast as A
from .tra import terms as T
from .tra import translate as tr
from .tra.subst import substitute


class NameAllocator:
    """Per-task supply of fresh existential names ``_sp1``, ``_sp2``, ..."""

    def __init__(self, prefix: str = "_sp"):
        self.prefix = prefix
        self.n = 0

    def fresh(self) -> str:
        self.n += 1
        return f"{self.prefix}{self.n}"


@dataclass(frozen=True)
class SpResult:
    formula: T.Formula
    fresh: tuple[str, ...] = field(default=())


Updates = Union[A.Stmt, Sequence[A.Stmt], A.UpdateTxn]


def frame_rhs(u: A.Stmt, schema: A.Schema, x: T.RVar, side: tr.Side) -> T.RelTerm:
    """Post-state of ``u.rel`` in terms of its pre-state ``x``."""
    R = side.rel(u.rel)
    if isinstance(u, A.Ins):
        return T.Union_(x, T.Table((tr.insert_tuple(u, schema, side).vals,)))
    phi = substitute(tr.pred(u.pred, schema, side), R, x)
    if isinstance(u, A.Del):
        return T.Sel(T.PNot(phi), x)
    if isinstance(u, A.Upd):
        i = u.attr.index
        return T.Union_(T.Sel(T.PNot(phi), x), T.UpdAttr(i, tr.value(u.value, side), T.Sel(phi, x)))
    raise TypeError(u)


def sp(phi: T.Formula, u: Updates, schema: A.Schema, alloc: NameAllocator,
       side: tr.Side = tr.IDENTITY) -> SpResult:
    if isinstance(u, A.UpdateTxn):
        u = u.body
    if isinstance(u, (list, tuple)):
        fresh: list[str] = []
        for s in u:
            r = sp(phi, s, schema, alloc, side)
            phi = r.formula
            fresh.extend(r.fresh)
        return SpResult(phi, tuple(fresh))
    name = alloc.fresh()
    x = T.RVar(name)
    R = side.rel(u.rel)
    body = T.conj(T.Eq(T.RVar(R), frame_rhs(u, schema, x, side)), substitute(phi, R, x))
    return SpResult(T.Exists((T.Var(name, T.REL),), body), (name,))
