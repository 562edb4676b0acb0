"""List-theory axioms for T_RA.

Two families are produced:

* *schema axioms* define every operator occurrence of a formula by
  structural recursion on the list constructors (one nil case, one cons
  case per symbol);
* *redundant axioms* are inductive consequences of the schema axioms that
  the solver cannot derive on its own (no induction), such as
  distributivity of projection over append.

Axioms are stated in guarded form, ``∀x,h,t. x = h::t → ...``, so the same
formula can be sampled by the concrete evaluator and rewritten by the SMT
encoder (which eliminates the guard by the one-point rule).  Bound variable
names start with ``?`` and therefore never clash with program symbols.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from . import terms as T

X, Y, TL = T.Var("?x", T.REL), T.Var("?y", T.REL), T.Var("?t", T.REL)
H, G = T.Var("?h", T.TUP), T.Var("?g", T.TUP)
V = T.Var("?v", T.VAL)
A_, B_, C_ = T.Var("?A", T.REL), T.Var("?B", T.REL), T.Var("?C", T.REL)
D_ = T.Var("?D", T.REL)

x, y, t = X.term(), Y.term(), TL.term()
h, g = H.term(), G.term()
v = V.term()
A, B, C, D = A_.term(), B_.term(), C_.term(), D_.term()

MAX_MATCHES = 8  # guarded copies per pair of selection predicates

Pattern = tuple  # multi-pattern: tuple of terms that must all match


@dataclass(frozen=True)
class Axiom:
    label: str
    key: tuple
    formula: T.Formula
    triggers: tuple[Pattern, ...] = field(default=())


class AxiomSet(list):
    """Ordered, duplicate-free list of axioms."""

    def labels(self) -> list[str]:
        return [a.label for a in self]

    def formulas(self) -> list[T.Formula]:
        return [a.formula for a in self]

    def add(self, ax: Axiom) -> None:
        if all(b.formula != ax.formula for b in self):
            self.append(ax)


def _fa(vs, body) -> T.Formula:
    return T.Forall(tuple(vs), body)


def _cons(hd, tl) -> T.Cons:
    return T.Cons(hd, tl)


# ------------------------------------------------------------ occurrences

def occurrences(F) -> list[tuple]:
    """Distinct operator occurrence keys of ``F`` in first-appearance order."""
    seen: dict[tuple, None] = {}
    for n in T.walk(F):
        k = _key(n)
        if k is not None:
            seen.setdefault(k, None)
    return list(seen)


def _key(n) -> Optional[tuple]:
    if isinstance(n, T.Proj):
        return ("proj", n.indices)
    if isinstance(n, T.Sel):
        return ("sel", n.pred)
    if isinstance(n, T.Prod):
        return ("prod", n.n)
    if isinstance(n, T.ProdRow):
        return ("prodrow", n.n)
    if isinstance(n, T.Union_):
        return ("union",)
    if isinstance(n, T.Diff):
        return ("diff",)
    if isinstance(n, T.DelFirst):
        return ("delfirst",)
    if isinstance(n, T.UpdAttr):
        return ("upd", n.index, n.value)
    if isinstance(n, (T.PIn, T.Mem)):
        return ("mem",)
    return None


def _requires(key: tuple) -> list[tuple]:
    kind = key[0]
    if kind == "prod":
        return [("prodrow", key[1]), ("union",)]
    if kind == "diff":
        return [("delfirst",)]
    if kind == "sel":
        return [k for k in occurrences(key[1]) if k != key]
    if kind == "upd":
        return occurrences(key[2])
    return []


def _closure(keys: Iterable[tuple]) -> list[tuple]:
    out: dict[tuple, None] = {}
    todo = list(keys)
    while todo:
        k = todo.pop(0)
        if k in out:
            continue
        out[k] = None
        todo.extend(_requires(k))
    return list(out)


# ------------------------------------------------------------ schema axioms

def schema_axioms(key: tuple) -> list[Axiom]:
    kind = key[0]
    nil = T.NIL
    if kind == "proj":
        L = key[1]
        P = lambda r: T.Proj(L, r)
        return [
            Axiom("proj-nil", key, _fa([X], T.Implies(T.Eq(x, nil), T.Eq(P(x), nil)))),
            Axiom("proj-cons", key, _fa([X, H, TL], T.Implies(
                T.Eq(x, _cons(h, t)), T.Eq(P(x), _cons(T.ProjT(L, h), P(t))))), ((P(x),),)),
        ]
    if kind == "sel":
        phi = key[1]
        S = lambda r: T.Sel(phi, r)
        return [
            Axiom("sel-nil", key, _fa([X], T.Implies(T.Eq(x, nil), T.Eq(S(x), nil)))),
            Axiom("sel-cons", key, _fa([X, H, TL], T.Implies(T.Eq(x, _cons(h, t)), T.FAnd((
                T.Implies(T.Holds(phi, h), T.Eq(S(x), _cons(h, S(t)))),
                T.Implies(T.FNot(T.Holds(phi, h)), T.Eq(S(x), S(t))))))), ((S(x),),)),
        ]
    if kind == "prod":
        n = key[1]
        return [
            Axiom("prod-nil", key, _fa([X, Y], T.Implies(T.Eq(x, nil), T.Eq(T.Prod(x, y, n), nil)))),
            Axiom("prod-cons", key, _fa([X, Y, H, TL], T.Implies(
                T.Eq(x, _cons(h, t)),
                T.Eq(T.Prod(x, y, n), T.Union_(T.ProdRow(h, y, n), T.Prod(t, y, n))))),
                ((T.Prod(x, y, n),),)),
        ]
    if kind == "prodrow":
        n = key[1]
        return [
            Axiom("prodrow-nil", key, _fa([H, Y], T.Implies(T.Eq(y, nil), T.Eq(T.ProdRow(h, y, n), nil)))),
            Axiom("prodrow-cons", key, _fa([H, Y, G, TL], T.Implies(
                T.Eq(y, _cons(g, t)),
                T.Eq(T.ProdRow(h, y, n), _cons(T.Cat(h, g, n), T.ProdRow(h, t, n))))),
                ((T.ProdRow(h, y, n),),)),
        ]
    if kind == "union":
        return [
            Axiom("union-nil", key, _fa([X, Y], T.Implies(T.Eq(x, nil), T.Eq(T.Union_(x, y), y)))),
            Axiom("union-cons", key, _fa([X, Y, H, TL], T.Implies(
                T.Eq(x, _cons(h, t)), T.Eq(T.Union_(x, y), _cons(h, T.Union_(t, y))))),
                ((T.Union_(x, y),),)),
        ]
    if kind == "diff":
        return [
            Axiom("diff-nil", key, _fa([X, Y], T.Implies(T.Eq(y, nil), T.Eq(T.Diff(x, y), x)))),
            Axiom("diff-cons", key, _fa([X, Y, H, TL], T.Implies(
                T.Eq(y, _cons(h, t)), T.Eq(T.Diff(x, y), T.Diff(T.DelFirst(h, x), t)))),
                ((T.Diff(x, y),),)),
        ]
    if kind == "delfirst":
        D = lambda r: T.DelFirst(h, r)
        return [
            Axiom("delfirst-nil", key, _fa([H, X], T.Implies(T.Eq(x, nil), T.Eq(D(x), nil)))),
            Axiom("delfirst-cons", key, _fa([H, X, G, TL], T.Implies(T.Eq(x, _cons(g, t)), T.FAnd((
                T.Implies(T.Eq(g, h), T.Eq(D(x), t)),
                T.Implies(T.FNot(T.Eq(g, h)), T.Eq(D(x), _cons(g, D(t)))))))), ((D(x),),)),
        ]
    if kind == "upd":
        i, val = key[1], key[2]
        U = lambda r: T.UpdAttr(i, val, r)
        return [
            Axiom("upd-nil", key, _fa([X], T.Implies(T.Eq(x, nil), T.Eq(U(x), nil)))),
            Axiom("upd-cons", key, _fa([X, H, TL], T.Implies(
                T.Eq(x, _cons(h, t)), T.Eq(U(x), _cons(T.UpdT(i, val, h), U(t))))), ((U(x),),)),
        ]
    if kind == "mem":
        return [
            Axiom("mem-nil", key, _fa([V, X], T.Implies(T.Eq(x, nil), T.FNot(T.Mem(v, x))))),
            Axiom("mem-cons", key, _fa([V, X, H, TL], T.Implies(
                T.Eq(x, _cons(h, t)),
                T.Iff(T.Mem(v, x), T.FOr((T.Eq(T.Get(1, h), v), T.Mem(v, t)))))), ((T.Mem(v, x),),)),
        ]
    raise ValueError(f"unknown occurrence {key!r}")


def instantiate_axioms(F) -> AxiomSet:
    """Schema axioms for every operator occurrence of ``F``, closed under the
    helper symbols the axioms themselves introduce."""
    out = AxiomSet()
    for k in _closure(occurrences(F)):
        for ax in schema_axioms(k):
            out.add(ax)
    return out


# ------------------------------------------------------------ redundant axioms

def _proj_pairs(F) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    pairs: dict = {}
    for n in T.walk(F):
        if isinstance(n, T.Eq) and isinstance(n.left, T.Proj) and isinstance(n.right, T.Proj):
            a, b = n.left.indices, n.right.indices
            if len(a) == len(b):
                pairs.setdefault((a, b), None)
                pairs.setdefault((b, a), None)
    return list(pairs)


def _full(L) -> bool:
    return sorted(L) == list(range(1, len(L) + 1))


def _prod_pairs(pairs, prods):
    """Column-permutation premises for both factors of a product.

    Yields (n, (M, M2), (N, N2), (K, K2)) where M, M2 permute the n columns
    of the left factors and K, K2 are the induced lists for the products.
    """
    full = [(M, M2) for M, M2 in pairs if _full(M) and _full(M2)]
    for n in prods:
        for M, M2 in full:
            if len(M) != n:
                continue
            for N, N2 in full:
                K = M + tuple(n + j for j in N)
                K2 = M2 + tuple(n + j for j in N2)
                yield n, (M, M2), (N, N2), (K, K2)


def _sel_chains(F) -> list[tuple[T.Pred, ...]]:
    """Predicates of every run of nested selections, outermost first."""
    out: dict = {}
    for node in T.walk(F):
        chain = []
        while isinstance(node, T.Sel):
            chain.append(node.pred)
            node = node.arg
        if chain:
            out.setdefault(tuple(chain), None)
    return list(out)


def _sel_chain(chain, r):
    for p in reversed(chain):
        r = T.Sel(p, r)
    return r


def _index_map(L, L2) -> Optional[dict[int, int]]:
    m: dict[int, int] = {}
    for a, b in zip(L, L2):
        if m.setdefault(a, b) != b:
            return None
    return m


def _leaf(a, b) -> Iterator[list]:
    if a == b:
        yield []
    elif not (isinstance(a, T.Const) and isinstance(b, T.Const)):
        yield [T.Eq(a, b)]


def _flatten(p: T.Pred, kind) -> list[T.Pred]:
    if isinstance(p, kind):
        return _flatten(p.left, kind) + _flatten(p.right, kind)
    return [p]


def pred_matches(p: T.Pred, q: T.Pred, m: dict[int, int]) -> Iterator[list[T.Formula]]:
    """Hypothesis lists under which ``q`` is ``p`` with attribute indices
    renamed by ``m``, up to the order of conjuncts and disjuncts and the
    orientation of (dis)equalities.  Nothing is yielded when the shapes
    differ or ``p`` reads an unmapped column."""

    def operand(a, b):
        if isinstance(a, T.PAttr):
            if isinstance(b, T.PAttr) and m.get(a.index) == b.index:
                yield []
        elif not isinstance(b, T.PAttr):
            yield from _leaf(a, b)

    def pair(a, b, c, d):
        for h1 in operand(a, b):
            for h2 in operand(c, d):
                yield h1 + h2

    def go(p, q):
        if isinstance(p, T.PTrue):
            if isinstance(q, T.PTrue):
                yield []
        elif isinstance(p, T.PCmp):
            if isinstance(q, T.PCmp) and p.op == q.op:
                yield from pair(p.left, q.left, p.right, q.right)
                if p.op in ("==", "!="):
                    yield from pair(p.left, q.right, p.right, q.left)
        elif isinstance(p, T.PIn):
            if isinstance(q, T.PIn) and m.get(p.index) == q.index:
                yield from _leaf(p.rel, q.rel)
        elif isinstance(p, (T.PAnd, T.POr)):
            if type(q) is type(p):
                yield from every(_flatten(p, type(p)), _flatten(q, type(p)))
        elif isinstance(p, T.PNot):
            if isinstance(q, T.PNot):
                yield from go(p.arg, q.arg)

    def every(ps, qs):
        if len(ps) != len(qs):
            return
        if not ps:
            yield []
            return
        for j, q in enumerate(qs):
            for h in go(ps[0], q):
                for rest in every(ps[1:], qs[:j] + qs[j + 1:]):
                    yield h + rest

    seen: list = []
    for h in go(p, q):
        if h not in seen:
            seen.append(h)
            yield h


def match_pred(p: T.Pred, q: T.Pred, m: dict[int, int]) -> Optional[list[T.Formula]]:
    """First hypothesis list of :func:`pred_matches`, or None."""
    return next(pred_matches(p, q, m), None)


def _sels(F) -> list[T.Pred]:
    return [k[1] for k in occurrences(F) if k[0] == "sel"]


def _projs(F) -> list[tuple[int, ...]]:
    return [k[1] for k in occurrences(F) if k[0] == "proj"]


def _upds(F) -> list[tuple[int, T.ValTerm]]:
    return [(k[1], k[2]) for k in occurrences(F) if k[0] == "upd"]


def _prods(F) -> list[int]:
    return [k[1] for k in _closure(occurrences(F)) if k[0] == "prod"]


def _guard(hyps: list[T.Formula], body: T.Formula) -> T.Formula:
    return T.Implies(T.conj(*hyps), body) if hyps else body


def _negation_of(p: T.Pred, q: T.Pred) -> bool:
    return (isinstance(q, T.PNot) and q.arg == p) or (isinstance(p, T.PNot) and p.arg == q)


def redundant_axioms(F) -> AxiomSet:
    """Inductive lemmas for the operators and predicates occurring in ``F``."""
    out = AxiomSet()
    keys = _closure(occurrences(F))
    kinds = {k[0] for k in keys}
    projs, sels, upds, prods = _projs(F), _sels(F), _upds(F), _prods(F)
    nil = T.NIL

    if "union" in kinds:
        out.add(Axiom("union-right-nil", ("union",), _fa([A_], T.Eq(T.Union_(A, nil), A)),
                      ((T.Union_(A, nil),),)))
        out.add(Axiom("union-assoc", ("union",), _fa([A_, B_, C_], T.Eq(
            T.Union_(T.Union_(A, B), C), T.Union_(A, T.Union_(B, C)))),
            ((T.Union_(T.Union_(A, B), C),),)))
    for n in prods:
        out.add(Axiom("prod-right-nil", ("prod", n),
                      _fa([A_], T.Eq(T.Prod(A, nil, n), nil)), ((T.Prod(A, nil, n),),)))
        for phi in sels:
            out.add(Axiom("sel-prod-right-nil", ("prod", n, phi),
                          _fa([A_], T.Eq(T.Sel(phi, T.Prod(A, nil, n)), nil)),
                          ((T.Sel(phi, T.Prod(A, nil, n)),),)))
    if "diff" in kinds:
        out.add(Axiom("diff-self", ("diff",), _fa([A_], T.Eq(T.Diff(A, A), nil)), ((T.Diff(A, A),),)))
    for L in projs:
        lhs = T.Proj(L, T.Union_(A, B))
        out.add(Axiom("proj-union", ("proj", L), _fa([A_, B_], T.Eq(
            lhs, T.Union_(T.Proj(L, A), T.Proj(L, B)))), ((lhs,),)))
    for phi in sels:
        lhs = T.Sel(phi, T.Union_(A, B))
        out.add(Axiom("sel-union", ("sel", phi), _fa([A_, B_], T.Eq(
            lhs, T.Union_(T.Sel(phi, A), T.Sel(phi, B)))), ((lhs,),)))
    for n in prods:
        lhs = T.Prod(T.Union_(A, B), C, n)
        out.add(Axiom("prod-union-left", ("prod", n), _fa([A_, B_, C_], T.Eq(
            lhs, T.Union_(T.Prod(A, C, n), T.Prod(B, C, n)))), ((lhs,),)))
        for phi in sels:
            idx = T.pred_indices(phi)
            if idx and max(idx) <= n:
                l, r = T.Prod(T.Sel(phi, A), B, n), T.Sel(phi, T.Prod(A, B, n))
                out.add(Axiom("sel-prod-left", ("prod", n, phi), _fa([A_, B_], T.Eq(l, r)), ((l,), (r,))))
            if idx:
                shifted = T.shift_pred(phi, n)
                l, r = T.Prod(A, T.Sel(phi, B), n), T.Sel(shifted, T.Prod(A, B, n))
                out.add(Axiom("sel-prod-right", ("prod", n, phi), _fa([A_, B_], T.Eq(l, r)), ((l,),)))
    for phi in sels:
        l = T.Sel(phi, T.Sel(phi, A))
        out.add(Axiom("sel-idem", ("sel", phi), _fa([A_], T.Eq(l, T.Sel(phi, A))), ((l,),)))
    for phi in sels:
        for psi in sels:
            if _negation_of(phi, psi):
                l = T.Sel(phi, T.Sel(psi, A))
                out.add(Axiom("sel-contra", ("sel", phi, psi), _fa([A_], T.Eq(l, nil)), ((l,),)))
            elif phi != psi:
                l, r = T.Sel(phi, T.Sel(psi, A)), T.Sel(psi, T.Sel(phi, A))
                out.add(Axiom("sel-commute", ("sel", phi, psi), _fa([A_], T.Eq(l, r)), ((l,),)))

    # Projection-guarded lemmas.  A template equality Π_M(A) = Π_M2(B)
    # relates A and B row by row, so it carries over to any sub-list L of M,
    # to selections reading only columns of M, and to field updates of a
    # column in M.  Patterns name both conclusion terms, so instances are
    # created only for terms the goal already mentions.
    pairs = _proj_pairs(F)
    # Products of pointwise-related factors are pointwise related.
    for n, (M, M2), (N, N2), (K, K2) in _prod_pairs(pairs, prods):
        l, r = T.Prod(A, C, n), T.Prod(B, D, n)
        body = T.Implies(T.conj(T.Eq(T.Proj(M, A), T.Proj(M2, B)), T.Eq(T.Proj(N, C), T.Proj(N2, D))),
                         T.Eq(T.Proj(K, l), T.Proj(K2, r)))
        out.add(Axiom("proj-prod-intro", ("prod", n, M, M2, N, N2), _fa([A_, B_, C_, D_], body), ((l, r),)))
        if (K, K2) not in pairs:
            pairs.append((K, K2))
    chains = _sel_chains(F)
    for M, M2 in pairs:
        m = _index_map(M, M2)
        if m is None:
            continue
        premise = T.Eq(T.Proj(M, A), T.Proj(M2, B))
        for L in projs:
            if not set(L) <= set(M):
                continue
            L2 = tuple(m[i] for i in L)
            if L2 not in projs:
                continue
            if L != M:
                l, r = T.Proj(L, A), T.Proj(L2, B)
                out.add(Axiom("proj-restrict", ("proj", M, M2, L), _fa([A_, B_], T.Implies(premise, T.Eq(l, r))),
                              ((l, r),)))
            # A run of selections filters by the conjunction of its predicates.
            for c in chains:
                phi = T.pand(*c)
                if not T.pred_indices(phi) <= set(M):
                    continue
                for c2 in chains:
                    l, r = T.Proj(L, _sel_chain(c, A)), T.Proj(L2, _sel_chain(c2, B))
                    # Leaves pair up in several ways; emit one guarded copy per pairing.
                    for hyps in itertools.islice(pred_matches(phi, T.pand(*c2), m), MAX_MATCHES):
                        body = T.Implies(T.conj(premise, *hyps), T.Eq(l, r))
                        out.add(Axiom("proj-sel-intro", ("proj", M, M2, L, c, c2), _fa([A_, B_], body),
                                      ((l, r),)))
            for i, val in upds:
                if i not in m:
                    continue
                for i2, val2 in upds:
                    if i2 != m[i] or any(m[a] == i2 and a != i for a in m):
                        continue
                    if isinstance(val, T.Const) and isinstance(val2, T.Const) and val != val2:
                        continue
                    hyps = [] if val == val2 else [T.Eq(val, val2)]
                    l, r = T.Proj(L, T.UpdAttr(i, val, A)), T.Proj(L2, T.UpdAttr(i2, val2, B))
                    body = T.Implies(T.conj(premise, *hyps), T.Eq(l, r))
                    out.add(Axiom("proj-upd-intro", ("proj", M, M2, L, i, val, i2, val2),
                                  _fa([A_, B_], body), ((l, r),)))

    for L in projs:
        for i, val in upds:
            if i not in L:
                l = T.Proj(L, T.UpdAttr(i, val, A))
                out.add(Axiom("proj-upd-elim", ("proj", L, i, val), _fa([A_], T.Eq(l, T.Proj(L, A))), ((l,),)))
    for phi in sels:
        for i, val in upds:
            if i not in T.pred_indices(phi):
                l, r = T.Sel(phi, T.UpdAttr(i, val, A)), T.UpdAttr(i, val, T.Sel(phi, A))
                out.add(Axiom("sel-upd-commute", ("sel", phi, i, val), _fa([A_], T.Eq(l, r)), ((l,), (r,))))
            elif phi == T.PCmp("==", T.PAttr(i), val) or phi == T.PCmp("==", val, T.PAttr(i)):
                r = T.UpdAttr(i, val, T.Sel(phi, A))
                out.add(Axiom("upd-sel-same", ("sel", phi, i, val), _fa([A_], T.Eq(r, T.Sel(phi, A))), ((r,),)))
    return out

