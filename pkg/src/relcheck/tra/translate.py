"""Translation of validated IR into positional T_RA (the ς map)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

from .. import ir
from ..ir import ast as A
from . import terms as T


@dataclass(frozen=True)
class Side:
    """Symbol names for one program: IR relation/parameter name to T_RA name.

    Names missing from the maps translate to themselves.
    """

    rels: Mapping[str, str] = field(default_factory=dict)
    params: Mapping[str, str] = field(default_factory=dict)

    def rel(self, name: str) -> str:
        return self.rels.get(name, name)

    def param(self, name: str) -> str:
        return self.params.get(name, name)


IDENTITY = Side()


def value(v: A.Value, side: Side = IDENTITY) -> T.ValTerm:
    if isinstance(v, A.IntLit):
        return T.Const(v.value)
    if isinstance(v, A.StrLit):
        return T.Const(v.value)
    if isinstance(v, A.Param):
        return T.VVar(side.param(v.name))
    raise TypeError(v)


def _operand(o, schema, side):
    if isinstance(o, A.AttrRef):
        if o.index <= 0:
            raise ValueError(f"unresolved attribute {o.text()!r}; validate the program first")
        return T.PAttr(o.index)
    return value(o, side)


def pred(p: A.Pred, schema: A.Schema, side: Side = IDENTITY) -> T.Pred:
    if isinstance(p, A.PTrue):
        return T.PTrue()
    if isinstance(p, A.Cmp):
        return T.PCmp(p.op, _operand(p.left, schema, side), _operand(p.right, schema, side))
    if isinstance(p, A.In):
        return T.PIn(p.attr.index, query(p.query, schema, side))
    if isinstance(p, A.And):
        return T.PAnd(pred(p.left, schema, side), pred(p.right, schema, side))
    if isinstance(p, A.Or):
        return T.POr(pred(p.left, schema, side), pred(p.right, schema, side))
    if isinstance(p, A.Not):
        return T.PNot(pred(p.arg, schema, side))
    raise TypeError(p)


def arity(q: A.Query, schema: A.Schema) -> int:
    return len(ir.query_scope(schema, q))


def query(q: A.Query, schema: A.Schema, side: Side = IDENTITY) -> T.RelTerm:
    if isinstance(q, A.Rel):
        return T.RVar(side.rel(q.name))
    if isinstance(q, A.Proj):
        return T.Proj(tuple(a.index for a in q.attrs), query(q.query, schema, side))
    if isinstance(q, A.Sel):
        return T.Sel(pred(q.pred, schema, side), query(q.query, schema, side))
    if isinstance(q, A.Join):
        prod = T.Prod(query(q.left, schema, side), query(q.right, schema, side), arity(q.left, schema))
        if isinstance(q.pred, A.PTrue):
            return prod
        return T.Sel(pred(q.pred, schema, side), prod)
    if isinstance(q, A.Union_):
        return T.Union_(query(q.left, schema, side), query(q.right, schema, side))
    if isinstance(q, A.Minus):
        return T.Diff(query(q.left, schema, side), query(q.right, schema, side))
    if isinstance(q, A.NJoin):
        raise ValueError("natural join must be desugared by validation first")
    raise TypeError(q)


def translate(x, schema: A.Schema, side: Side = IDENTITY):
    """ς for queries and predicates."""
    if isinstance(x, (A.Rel, A.Proj, A.Sel, A.Join, A.Union_, A.Minus, A.NJoin)):
        return query(x, schema, side)
    return pred(x, schema, side)


def insert_tuple(s: A.Ins, schema: A.Schema, side: Side = IDENTITY) -> T.TLit:
    """Positional tuple of an insert, in declaration order."""
    by_name = dict(s.fields)
    return T.TLit(tuple(value(by_name[a], side) for a in schema[s.rel].attr_names))


def instance_tables(inst, side: Side = IDENTITY) -> dict[str, T.Table]:
    """ς(Δ): each relation as a concrete table under its symbol name."""
    return {side.rel(r): T.table(rows) for r, rows in inst.items()}
