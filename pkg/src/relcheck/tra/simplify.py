"""Equational normalization of T_RA terms and elimination of definitions.

Every rewrite here is a list identity that holds for well-formed relations
(each one is also sampled by the property tests).  Running them before the
solver saves it from chaining several quantified lemmas through equalities,
which its instantiation heuristics handle poorly.

Normal form, roughly: unions are right-nested and pushed outward, then
projections and field updates, then selections, so selections sit next to
relation symbols.  A selection pulled out of a product is placed outside
the product's own (join) selection.
"""

from __future__ import annotations

from typing import Iterable, Optional

from . import terms as T
from .subst import map_children, substitute_many

MAX_DEF_SIZE = 4000  # node budget for an assertion after inlining a definition


def _negates(p: T.Pred, q: T.Pred) -> bool:
    return (isinstance(q, T.PNot) and q.arg == p) or (isinstance(p, T.PNot) and p.arg == q)


def _upd_row(row, i, v):
    return row[:i - 1] + (v,) + row[i:]


def _root(t: T.RelTerm) -> Optional[T.RelTerm]:
    """One rewrite step at the root, or None."""
    nil = T.NIL
    if isinstance(t, T.Union_):
        a, b = t.left, t.right
        if a == nil:
            return b
        if b == nil:
            return a
        if isinstance(a, T.Union_):
            return T.Union_(a.left, T.Union_(a.right, b))
        if isinstance(a, T.Table) and isinstance(b, T.Table):
            return T.Table(a.rows + b.rows)
        return None
    if isinstance(t, T.Sel):
        p, a = t.pred, t.arg
        if isinstance(p, T.PTrue):
            return a
        if a == nil:
            return nil
        if isinstance(a, T.Union_):
            return T.Union_(T.Sel(p, a.left), T.Sel(p, a.right))
        if isinstance(a, T.Sel):
            if a.pred == p:
                return a
            if _negates(p, a.pred):
                return nil
        if isinstance(a, T.UpdAttr) and a.index not in T.pred_indices(p):
            return T.UpdAttr(a.index, a.value, T.Sel(p, a.arg))
        if isinstance(a, T.Prod):
            pulled = _pull_sel(a)
            if pulled is not None:
                outer, prod = pulled
                return T.Sel(outer, T.Sel(p, prod))
        return None
    if isinstance(t, T.Proj):
        L, a = t.indices, t.arg
        if a == nil:
            return nil
        if isinstance(a, T.Union_):
            return T.Union_(T.Proj(L, a.left), T.Proj(L, a.right))
        if isinstance(a, T.Proj):
            return T.Proj(tuple(a.indices[i - 1] for i in L), a.arg)
        if isinstance(a, T.UpdAttr) and a.index not in L:
            return T.Proj(L, a.arg)
        if isinstance(a, T.Table) and all(max(L) <= len(r) for r in a.rows):
            return T.Table(tuple(tuple(r[i - 1] for i in L) for r in a.rows))
        return None
    if isinstance(t, T.UpdAttr):
        i, v, a = t.index, t.value, t.arg
        if a == nil:
            return nil
        if isinstance(a, T.Union_):
            return T.Union_(T.UpdAttr(i, v, a.left), T.UpdAttr(i, v, a.right))
        if isinstance(a, T.UpdAttr):
            if a.index == i:
                return T.UpdAttr(i, v, a.arg)
            if a.index > i:
                return T.UpdAttr(a.index, a.value, T.UpdAttr(i, v, a.arg))
        if isinstance(a, T.Table) and all(i <= len(r) for r in a.rows):
            return T.Table(tuple(_upd_row(r, i, v) for r in a.rows))
        return None
    if isinstance(t, T.Prod):
        a, b, n = t.left, t.right, t.n
        if a == nil or b == nil:
            return nil
        if isinstance(a, T.Union_):
            return T.Union_(T.Prod(a.left, b, n), T.Prod(a.right, b, n))
        if isinstance(a, T.UpdAttr) and a.index <= n:
            return T.UpdAttr(a.index, a.value, T.Prod(a.arg, b, n))
        if isinstance(b, T.UpdAttr):
            return T.UpdAttr(n + b.index, b.value, T.Prod(a, b.arg, n))
        pulled = _pull_sel(t)
        if pulled is not None:
            return T.Sel(*pulled)
        return None
    if isinstance(t, T.Diff):
        if t.right == nil:
            return t.left
        if t.left == nil:
            return nil
        return None
    return None


def _pull_sel(t: T.Prod) -> Optional[tuple[T.Pred, T.Prod]]:
    """σ(A) × B → σ(A × B) and A × σ(B) → σ'(A × B), one selection at a time."""
    a, b, n = t.left, t.right, t.n
    if isinstance(a, T.Sel) and max(T.pred_indices(a.pred), default=0) <= n:
        return a.pred, T.Prod(a.arg, b, n)
    if isinstance(b, T.Sel):
        return T.shift_pred(b.pred, n), T.Prod(a, b.arg, n)
    return None


def simplify(x, limit: int = 10000):
    """Normalize every relation term inside ``x`` (a term or formula)."""
    budget = [limit]

    def go(n):
        n = map_children(n, go)
        while budget[0] > 0 and _is_rel(n):
            r = _root(n)
            if r is None:
                break
            budget[0] -= 1
            n = map_children(r, go)
        return n

    return go(x)


def _is_rel(n) -> bool:
    return isinstance(n, (T.RVar, T.Table, T.Cons, T.Proj, T.Sel, T.Prod, T.Union_, T.Diff,
                          T.UpdAttr, T.ProdRow, T.DelFirst))


def size(x) -> int:
    return sum(1 for _ in T.walk(x))


def _definition(f: T.Formula, protected: frozenset):
    """(key, term) when ``f`` is ``c = t`` for an eliminable constant c."""
    if not isinstance(f, T.Eq):
        return None
    for lhs, rhs in ((f.left, f.right), (f.right, f.left)):
        if isinstance(lhs, T.RVar):
            key = (lhs.name, T.REL)
        elif isinstance(lhs, T.VVar):
            key = (lhs.name, T.VAL)
        else:
            continue
        if key in protected or key in T.free_vars(rhs):
            continue
        return key, rhs
    return None


def eliminate_definitions(assertions: Iterable[T.Formula],
                          protected: frozenset = frozenset()) -> list[T.Formula]:
    """Inline ``c = t`` assertions (c a constant not in t) into the others.

    Satisfiability is preserved because c is unconstrained apart from its
    definition.  Inlining that would blow an assertion past MAX_DEF_SIZE
    nodes is skipped.
    """
    fs = list(assertions)
    changed = True
    while changed:
        changed = False
        for i, f in enumerate(fs):
            d = _definition(f, protected)
            if d is None:
                continue
            key, t = d
            rest = fs[:i] + fs[i + 1:]
            new = [simplify(substitute_many(g, {key: t})) for g in rest]
            if any(size(g) > MAX_DEF_SIZE for g in new):
                protected = protected | {key}
                changed = True
                break
            fs = new
            changed = True
            break
    return fs
