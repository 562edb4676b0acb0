"""Syntactic equivalence check for conjunctive query pairs.

Bag-semantics equivalence of conjunctive queries coincides with syntactic
isomorphism, so a query pair Q, Q' is settled without the solver when Q,
rewritten through the relation/column correspondence that the invariant's
conjuncts induce, is Q' up to the order of equality conjuncts and of the
operands of each equality.  Failure to match says nothing: the caller falls
through to the solver.
"""

from __future__ import annotations

import itertools
from typing import Mapping, Optional

from ..smt import VALID, Verdict
from ..tra import terms as T

FAST_PATH = "fast-path"
MAX_REWRITES = 256


def _eq_conjuncts(p: T.Pred) -> Optional[list[T.PCmp]]:
    if isinstance(p, T.PTrue):
        return []
    if isinstance(p, T.PAnd):
        a, b = _eq_conjuncts(p.left), _eq_conjuncts(p.right)
        return None if a is None or b is None else a + b
    if isinstance(p, T.PCmp) and p.op == "==":
        return [p]
    return None


def conjunctive(q: T.RelTerm) -> bool:
    """Projection, selection and product over relation symbols, equalities only."""
    if isinstance(q, T.RVar):
        return True
    if isinstance(q, T.Proj):
        return conjunctive(q.arg)
    if isinstance(q, T.Sel):
        return _eq_conjuncts(q.pred) is not None and conjunctive(q.arg)
    if isinstance(q, T.Prod):
        return conjunctive(q.left) and conjunctive(q.right)
    return False


def _operand_key(o) -> tuple:
    if isinstance(o, T.PAttr):
        return (0, o.index)
    if isinstance(o, T.Const):
        return (1, type(o.value).__name__, o.value)
    return (2, o.name)


def normalize(q: T.RelTerm):
    """Canonical form: each selection's equalities as a sorted set of sorted pairs."""
    if isinstance(q, T.RVar):
        return ("rel", q.name)
    if isinstance(q, T.Proj):
        return ("proj", q.indices, normalize(q.arg))
    if isinstance(q, T.Sel):
        eqs = set()
        for c in _eq_conjuncts(q.pred):
            a, b = sorted([_operand_key(c.left), _operand_key(c.right)])
            if a != b:
                eqs.add((a, b))
        inner = normalize(q.arg)
        return ("sel", tuple(sorted(eqs)), inner) if eqs else inner
    if isinstance(q, T.Prod):
        return ("prod", q.n, normalize(q.left), normalize(q.right))
    raise TypeError(q)


def correspondences(phi: T.Formula) -> dict[str, list[tuple[T.RelTerm, dict[int, int]]]]:
    """relation symbol -> [(new-side term, column map)] from Φ's conjuncts.

    Only conjuncts Π_L(R) = Π_L'(Y) with R a relation symbol and Y
    conjunctive contribute.
    """
    out: dict[str, list] = {}
    for c in T.conjuncts(phi):
        if not (isinstance(c, T.Eq) and isinstance(c.left, T.Proj) and isinstance(c.right, T.Proj)):
            continue
        if not isinstance(c.left.arg, T.RVar) or not conjunctive(c.right.arg):
            continue
        if len(c.left.indices) != len(c.right.indices) or len(set(c.left.indices)) != len(c.left.indices):
            continue
        m = dict(zip(c.left.indices, c.right.indices))
        entry = (c.right.arg, m)
        if entry not in out.setdefault(c.left.arg.name, []):
            out[c.left.arg.name].append(entry)
    return out


class _Rewriter:
    def __init__(self, corr, params: Mapping[str, str], width: Mapping[str, int]):
        self.corr = corr
        self.params = params
        self.width = width

    def arity(self, t: T.RelTerm) -> int:
        if isinstance(t, T.RVar):
            return self.width[t.name]
        if isinstance(t, T.Proj):
            return len(t.indices)
        if isinstance(t, T.Sel):
            return self.arity(t.arg)
        if isinstance(t, T.Prod):
            return self.arity(t.left) + self.arity(t.right)
        raise TypeError(t)

    def operand(self, o, m):
        if isinstance(o, T.PAttr):
            return T.PAttr(m[o.index]) if o.index in m else None
        if isinstance(o, T.VVar):
            return T.VVar(self.params[o.name]) if o.name in self.params else None
        return o

    def go(self, q: T.RelTerm):
        """Yield (rewritten term, column map) alternatives."""
        if isinstance(q, T.RVar):
            if q.name in self.width:
                # A symbol shared by both sides denotes the same relation.
                yield q, {i: i for i in range(1, self.width[q.name] + 1)}
            for term, m in self.corr.get(q.name, []):
                yield term, m
        elif isinstance(q, T.Proj):
            for t, m in self.go(q.arg):
                if all(i in m for i in q.indices):
                    yield T.Proj(tuple(m[i] for i in q.indices), t), {k + 1: k + 1 for k in range(len(q.indices))}
        elif isinstance(q, T.Sel):
            eqs = _eq_conjuncts(q.pred)
            for t, m in self.go(q.arg):
                new = []
                for c in eqs:
                    l, r = self.operand(c.left, m), self.operand(c.right, m)
                    if l is None or r is None:
                        break
                    new.append(T.PCmp("==", l, r))
                else:
                    yield (T.Sel(T.pand(*new), t) if new else t), m
        elif isinstance(q, T.Prod):
            for (lt, lm), (rt, rm) in itertools.product(self.go(q.left), self.go(q.right)):
                n2 = self.arity(lt)
                m = dict(lm)
                m.update({q.n + i: n2 + j for i, j in rm.items()})
                yield T.Prod(lt, rt, n2), m


def conjunctive_fast_path(phi: T.Formula, q: T.RelTerm, q2: T.RelTerm,
                          params: Mapping[str, str], width: Mapping[str, int],
                          old_width: Optional[Mapping[str, int]] = None) -> Optional[Verdict]:
    """Valid if ``q`` rewritten through Φ is ``q2`` up to equality order, else None.

    ``params`` maps old parameter symbols to the new symbols they are
    equated with; ``width`` gives new-side relation arities.
    """
    if not (conjunctive(q) and conjunctive(q2)):
        return None
    target = normalize(q2)
    rw = _Rewriter(correspondences(phi), params, width)
    want = None
    if old_width is not None and not isinstance(q, T.Proj):
        want = _Rewriter({}, {}, old_width).arity(q)
    for t, m in itertools.islice(rw.go(q), MAX_REWRITES):
        if not isinstance(q, T.Proj):
            # Whole rows are returned: the column map must be the identity.
            if want is None or rw.arity(t) != want or any(m.get(i) != i for i in range(1, want + 1)):
                continue
        if normalize(t) == target:
            return Verdict(VALID, FAST_PATH)
    return None
