"""Candidate conjuncts for bisimulation invariants.

Four template shapes, each an equality of projections::

    1. Π_L(R)        = Π_L'(R')
    2. Π_L(R1 ⋈ R2)  = Π_L'(R')
    3. Π_L(R)        = Π_L'(R1' ⋈ R2')
    4. Π_L(R1 ⋈ R2)  = Π_L'(R1' ⋈ R2')

Instances are pruned by how paired insertions route arguments: column a_i
on the old side is matched with column b_i on the new side only when some
paired update inserts the same (positionally equated) argument into both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from ..ir import ast as A
from ..pairing import Pairing
from ..tra import printer as P
from ..tra import terms as T
from ..tra import translate as tr

MAX_LISTS = 32  # column correspondences kept per (update pair, structure pair)


@dataclass(frozen=True)
class Structure:
    """One side of a template: a base relation or a single equi-join."""

    rels: tuple[str, ...]  # IR names
    term: T.RelTerm  # over side-qualified symbols
    widths: tuple[int, ...]

    @property
    def is_join(self) -> bool:
        return len(self.rels) == 2

    def part_of(self, col: int) -> int:
        return 0 if col <= self.widths[0] else 1


@dataclass(frozen=True)
class Candidate:
    template: int
    old: Structure
    old_cols: tuple[int, ...]
    new: Structure
    new_cols: tuple[int, ...]

    @property
    def formula(self) -> T.Eq:
        return T.Eq(T.Proj(self.old_cols, self.old.term), T.Proj(self.new_cols, self.new.term))

    def sort_key(self):
        return (self.template, self.old.rels, self.old_cols, self.new.rels, self.new_cols,
                P.sexpr(self.old.term), P.sexpr(self.new.term))

    def __str__(self) -> str:
        return P.show(self.formula)


@dataclass(frozen=True)
class PredicateUniverse:
    candidates: tuple[Candidate, ...]

    def __iter__(self) -> Iterator[Candidate]:
        return iter(self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)

    def __getitem__(self, i):
        return self.candidates[i]

    @property
    def formulas(self) -> list[T.Formula]:
        return [c.formula for c in self.candidates]


# ------------------------------------------------------------ structures

def _equi(p: T.Pred, n: int) -> bool:
    """Conjunction of equalities each relating a left column to a right one."""
    if isinstance(p, T.PAnd):
        return _equi(p.left, n) and _equi(p.right, n)
    if isinstance(p, T.PCmp) and p.op == "==" and isinstance(p.left, T.PAttr) and isinstance(p.right, T.PAttr):
        return (p.left.index <= n) != (p.right.index <= n)
    return False


def _query_joins(q: A.Query) -> Iterator[A.Join]:
    if isinstance(q, A.Join):
        if isinstance(q.left, A.Rel) and isinstance(q.right, A.Rel) and q.left.name != q.right.name:
            yield q
        yield from _query_joins(q.left)
        yield from _query_joins(q.right)
    elif isinstance(q, (A.Proj, A.Sel)):
        yield from _query_joins(q.query)
        if isinstance(q, A.Sel):
            yield from _pred_joins(q.pred)
    elif isinstance(q, (A.Union_, A.Minus)):
        yield from _query_joins(q.left)
        yield from _query_joins(q.right)


def _pred_joins(p: A.Pred) -> Iterator[A.Join]:
    if isinstance(p, A.In):
        yield from _query_joins(p.query)
    elif isinstance(p, (A.And, A.Or)):
        yield from _pred_joins(p.left)
        yield from _pred_joins(p.right)
    elif isinstance(p, A.Not):
        yield from _pred_joins(p.arg)


def structures(prog: A.Program, side: tr.Side) -> list[Structure]:
    """Base relations, then joinable pairs.

    A pair is joinable when the two relations share an attribute name
    (natural join, in declaration order) or when some query of the program
    equi-joins them directly (in the order written there).
    """
    schema = prog.schema
    out = [Structure((r.name,), T.RVar(side.rel(r.name)), (r.arity,)) for r in schema.relations]
    seen: set = set()
    joins: list[Structure] = []

    def add(b: A.RelDecl, c: A.RelDecl, pred: T.Pred):
        if not _equi(pred, b.arity):
            return
        term = T.Sel(pred, T.Prod(T.RVar(side.rel(b.name)), T.RVar(side.rel(c.name)), b.arity))
        if term in seen:
            return
        seen.add(term)
        joins.append(Structure((b.name, c.name), term, (b.arity, c.arity)))

    rels = schema.relations
    for i, b in enumerate(rels):
        for c in rels[i + 1:]:
            shared = [n for n in b.attr_names if n in c.attr_names]
            if shared:
                eqs = [T.PCmp("==", T.PAttr(b.attr_names.index(n) + 1),
                              T.PAttr(b.arity + c.attr_names.index(n) + 1)) for n in shared]
                add(b, c, T.pand(*eqs))
    for q in prog.queries:
        for j in _query_joins(q.body):
            if isinstance(j.pred, A.PTrue):
                continue
            add(schema[j.left.name], schema[j.right.name], tr.pred(j.pred, schema, side))
    return out + joins


# ------------------------------------------------------------ routing

def routes(txn: A.UpdateTxn, st: Structure, schema: A.Schema, limit: int) -> set[tuple[int, int]]:
    """(column, parameter position) pairs: the txn inserts that argument there."""
    pos = {p.name: k for k, p in enumerate(txn.params) if k < limit}
    out: set[tuple[int, int]] = set()
    for s in txn.body:
        if not isinstance(s, A.Ins) or s.rel not in st.rels:
            continue
        offset = 0 if s.rel == st.rels[0] else st.widths[0]
        names = schema[s.rel].attr_names
        for attr, v in s.fields:
            if isinstance(v, A.Param) and v.name in pos:
                out.add((offset + names.index(attr) + 1, pos[v.name]))
    return out


def _matchings(options: dict[int, list[int]]) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Largest injective column assignments, at most MAX_LISTS of them."""
    cols = sorted(options)
    best: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    size = [0]

    def go(i, left, right, used):
        if len(best) >= MAX_LISTS and len(left) + (len(cols) - i) <= size[0]:
            return
        if len(left) + (len(cols) - i) < size[0]:
            return
        if i == len(cols):
            if len(left) > size[0]:
                size[0] = len(left)
                best.clear()
            if len(left) == size[0] and len(best) < MAX_LISTS and left:
                best.append((tuple(left), tuple(right)))
            return
        a = cols[i]
        placed = False
        for b in options[a]:
            if b not in used:
                placed = True
                go(i + 1, left + [a], right + [b], used | {b})
        if not placed:
            go(i + 1, left, right, used)

    go(0, [], [], frozenset())
    return best


def _template(x: Structure, y: Structure) -> int:
    return 1 + int(x.is_join) + 2 * int(y.is_join)


def _spans(st: Structure, cols) -> bool:
    return not st.is_join or {st.part_of(c) for c in cols} == {0, 1}


def generate_predicates(pairing: Pairing) -> PredicateUniverse:
    """Instantiate the templates over every paired update, pruned by routing."""
    old_structs = structures(pairing.old, pairing.old_side())
    new_structs = structures(pairing.new, pairing.new_side())
    found: dict = {}
    for up in pairing.updates:
        for x in old_structs:
            rx = routes(up.old, x, pairing.old.schema, up.shared)
            if not rx:
                continue
            for y in new_structs:
                ry = routes(up.new, y, pairing.new.schema, up.shared)
                if not ry:
                    continue
                options: dict[int, list[int]] = {}
                for a, k in sorted(rx):
                    for b, k2 in sorted(ry):
                        if k == k2 and b not in options.setdefault(a, []):
                            options[a].append(b)
                options = {a: bs for a, bs in options.items() if bs}
                for L, L2 in _matchings(options):
                    if not (_spans(x, L) and _spans(y, L2)):
                        continue
                    c = Candidate(_template(x, y), x, L, y, L2)
                    found.setdefault(c.formula, c)
    return PredicateUniverse(tuple(sorted(found.values(), key=Candidate.sort_key)))
