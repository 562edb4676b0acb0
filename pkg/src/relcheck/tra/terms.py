"""Terms, predicates and formulas of relational algebra with updates.

Attributes are positional (1-based).  Three sorts exist: values, tuples and
relations.  Relation symbols of the two programs, existential variables from
the postcondition transformer and bound variables of axioms are all
``RVar``; nothing distinguishes them syntactically except the binder.

Besides the user-facing operators the tree carries the helper symbols the
list axiomatisation needs: ``Cons`` (relation constructor), ``ProdRow``
(one left row times a relation), ``DelFirst`` (remove first occurrence),
and the tuple-level ``ProjT``/``Cat``/``UpdT``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Union

# ---------------------------------------------------------------- values

@dataclass(frozen=True)
class Const:
    value: Union[int, str]


@dataclass(frozen=True)
class VVar:
    name: str


@dataclass(frozen=True)
class Get:
    index: int
    tup: "TupTerm"


ValTerm = Union[Const, VVar, Get]

# ---------------------------------------------------------------- tuples

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class TLit:
    vals: tuple[ValTerm, ...]


@dataclass(frozen=True)
class ProjT:
    indices: tuple[int, ...]
    tup: "TupTerm"


@dataclass(frozen=True)
class Cat:
    left: "TupTerm"
    right: "TupTerm"
    n: int  # arity of ``left``


@dataclass(frozen=True)
class UpdT:
    index: int
    value: ValTerm
    tup: "TupTerm"


TupTerm = Union[TVar, TLit, ProjT, Cat, UpdT]

# ---------------------------------------------------------------- predicates

@dataclass(frozen=True)
class PAttr:
    index: int


@dataclass(frozen=True)
class PTrue:
    pass


@dataclass(frozen=True)
class PCmp:
    op: str  # one of <= < == != > >=
    left: Union[PAttr, ValTerm]
    right: Union[PAttr, ValTerm]


@dataclass(frozen=True)
class PIn:
    index: int
    rel: "RelTerm"


@dataclass(frozen=True)
class PAnd:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class POr:
    left: "Pred"
    right: "Pred"


@dataclass(frozen=True)
class PNot:
    arg: "Pred"


Pred = Union[PTrue, PCmp, PIn, PAnd, POr, PNot]

# ---------------------------------------------------------------- relations

@dataclass(frozen=True)
class RVar:
    name: str


@dataclass(frozen=True)
class Table:
    rows: tuple[tuple[ValTerm, ...], ...]


NIL = Table(())


@dataclass(frozen=True)
class Cons:
    head: TupTerm
    tail: "RelTerm"


@dataclass(frozen=True)
class Proj:
    indices: tuple[int, ...]
    arg: "RelTerm"


@dataclass(frozen=True)
class Sel:
    pred: Pred
    arg: "RelTerm"


@dataclass(frozen=True)
class Prod:
    left: "RelTerm"
    right: "RelTerm"
    n: int  # arity of ``left``


@dataclass(frozen=True)
class Union_:
    left: "RelTerm"
    right: "RelTerm"


@dataclass(frozen=True)
class Diff:
    left: "RelTerm"
    right: "RelTerm"


@dataclass(frozen=True)
class UpdAttr:
    index: int
    value: ValTerm
    arg: "RelTerm"


@dataclass(frozen=True)
class ProdRow:
    head: TupTerm
    arg: "RelTerm"
    n: int


@dataclass(frozen=True)
class DelFirst:
    head: TupTerm
    arg: "RelTerm"


RelTerm = Union[RVar, Table, Cons, Proj, Sel, Prod, Union_, Diff, UpdAttr, ProdRow, DelFirst]
Term = Union[ValTerm, TupTerm, RelTerm]

# ---------------------------------------------------------------- formulas

REL, TUP, VAL = "rel", "tup", "val"


@dataclass(frozen=True)
class Var:
    """A bound variable together with its sort."""

    name: str
    sort: str

    def term(self) -> Term:
        return {REL: RVar, TUP: TVar, VAL: VVar}[self.sort](self.name)


@dataclass(frozen=True)
class FTrue:
    pass


@dataclass(frozen=True)
class FFalse:
    pass


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class FAnd:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class FOr:
    args: tuple["Formula", ...]


@dataclass(frozen=True)
class FNot:
    arg: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    vars: tuple[Var, ...]
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    vars: tuple[Var, ...]
    body: "Formula"


@dataclass(frozen=True)
class Holds:
    """``pred`` evaluated on the tuple ``tup``."""

    pred: Pred
    tup: TupTerm


@dataclass(frozen=True)
class Mem:
    """``value`` occurs in the first column of ``rel``."""

    value: ValTerm
    rel: RelTerm


Formula = Union[FTrue, FFalse, Eq, FAnd, FOr, FNot, Implies, Iff, Exists, Forall, Holds, Mem]

# ---------------------------------------------------------------- helpers

def conj(*fs: Formula) -> Formula:
    flat: list[Formula] = []
    for f in fs:
        if isinstance(f, FAnd):
            flat.extend(f.args)
        elif not isinstance(f, FTrue):
            flat.append(f)
    if not flat:
        return FTrue()
    return flat[0] if len(flat) == 1 else FAnd(tuple(flat))


def conjuncts(f: Formula) -> list[Formula]:
    if isinstance(f, FAnd):
        return [g for a in f.args for g in conjuncts(a)]
    if isinstance(f, FTrue):
        return []
    return [f]


def pand(*ps: Pred) -> Pred:
    ps = tuple(p for p in ps if not isinstance(p, PTrue))
    if not ps:
        return PTrue()
    out = ps[0]
    for p in ps[1:]:
        out = PAnd(out, p)
    return out


def table(rows) -> Table:
    """Concrete table from Python values."""
    return Table(tuple(tuple(Const(v) for v in row) for row in rows))


def children(t) -> Iterator:
    """Immediate subterms, subpredicates and subformulas of any node."""
    if isinstance(t, (Const, VVar, TVar, RVar, PAttr, PTrue, FTrue, FFalse)):
        return
    if isinstance(t, Get):
        yield t.tup
    elif isinstance(t, TLit):
        yield from t.vals
    elif isinstance(t, ProjT):
        yield t.tup
    elif isinstance(t, Cat):
        yield t.left
        yield t.right
    elif isinstance(t, UpdT):
        yield t.value
        yield t.tup
    elif isinstance(t, PCmp):
        yield t.left
        yield t.right
    elif isinstance(t, PIn):
        yield t.rel
    elif isinstance(t, (PAnd, POr)):
        yield t.left
        yield t.right
    elif isinstance(t, PNot):
        yield t.arg
    elif isinstance(t, Table):
        for row in t.rows:
            yield from row
    elif isinstance(t, Cons):
        yield t.head
        yield t.tail
    elif isinstance(t, (Proj,)):
        yield t.arg
    elif isinstance(t, Sel):
        yield t.pred
        yield t.arg
    elif isinstance(t, (Prod, Union_, Diff)):
        yield t.left
        yield t.right
    elif isinstance(t, UpdAttr):
        yield t.value
        yield t.arg
    elif isinstance(t, (ProdRow, DelFirst)):
        yield t.head
        yield t.arg
    elif isinstance(t, (Eq, Implies, Iff)):
        yield t.left
        yield t.right
    elif isinstance(t, (FAnd, FOr)):
        yield from t.args
    elif isinstance(t, FNot):
        yield t.arg
    elif isinstance(t, (Exists, Forall)):
        yield t.body
    elif isinstance(t, Holds):
        yield t.pred
        yield t.tup
    elif isinstance(t, Mem):
        yield t.value
        yield t.rel
    else:
        raise TypeError(f"not a T_RA node: {t!r}")


def walk(t) -> Iterator:
    """Pre-order traversal, descending into predicates and binders."""
    stack = [t]
    while stack:
        n = stack.pop()
        yield n
        stack.extend(reversed(list(children(n))))


def free_vars(t, bound: frozenset = frozenset()) -> set[tuple[str, str]]:
    """Free (name, sort) pairs of relation, tuple and value variables."""
    out: set[tuple[str, str]] = set()

    def go(n, bound):
        if isinstance(n, RVar):
            if (n.name, REL) not in bound:
                out.add((n.name, REL))
        elif isinstance(n, TVar):
            if (n.name, TUP) not in bound:
                out.add((n.name, TUP))
        elif isinstance(n, VVar):
            if (n.name, VAL) not in bound:
                out.add((n.name, VAL))
        elif isinstance(n, (Exists, Forall)):
            go(n.body, bound | {(v.name, v.sort) for v in n.vars})
        else:
            for c in children(n):
                go(c, bound)

    go(t, bound)
    return out


def pred_indices(p: Pred) -> set[int]:
    """Attribute positions a predicate reads from its row."""
    if isinstance(p, PTrue):
        return set()
    if isinstance(p, PCmp):
        return {o.index for o in (p.left, p.right) if isinstance(o, PAttr)}
    if isinstance(p, PIn):
        return {p.index}
    if isinstance(p, (PAnd, POr)):
        return pred_indices(p.left) | pred_indices(p.right)
    if isinstance(p, PNot):
        return pred_indices(p.arg)
    raise TypeError(p)


def map_pred_indices(p: Pred, f) -> Pred:
    if isinstance(p, PTrue):
        return p
    if isinstance(p, PCmp):
        l = PAttr(f(p.left.index)) if isinstance(p.left, PAttr) else p.left
        r = PAttr(f(p.right.index)) if isinstance(p.right, PAttr) else p.right
        return PCmp(p.op, l, r)
    if isinstance(p, PIn):
        return PIn(f(p.index), p.rel)
    if isinstance(p, PAnd):
        return PAnd(map_pred_indices(p.left, f), map_pred_indices(p.right, f))
    if isinstance(p, POr):
        return POr(map_pred_indices(p.left, f), map_pred_indices(p.right, f))
    if isinstance(p, PNot):
        return PNot(map_pred_indices(p.arg, f))
    raise TypeError(p)


def shift_pred(p: Pred, k: int) -> Pred:
    return map_pred_indices(p, lambda i: i + k)
