"""Name resolution and type checking.

The validator rebuilds the tree: bare predicate identifiers become either
attribute references or parameters, every attribute reference receives its
1-based column position in the enclosing scope, and ``njoin`` becomes a theta
join over its shared attribute names.

A failed reference poisons only the subtree that depends on it, so one bad
name produces one diagnostic rather than a cascade.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from . import ast as A
from .errors import Diagnostic, IRValidationError


@dataclass(frozen=True)
class Column:
    qual: str
    name: str
    type: str


Scope = tuple[Column, ...]


def attr_index(schema: A.Schema, relation: str, attr: str) -> int:
    rel = schema.get(relation)
    if rel is None:
        raise IRValidationError([Diagnostic(f"unknown relation {relation!r}")])
    for i, a in enumerate(rel.attrs, start=1):
        if a.name == attr:
            return i
    raise IRValidationError([Diagnostic(f"relation {relation!r} has no attribute {attr!r}")])


def relation_scope(rel: A.RelDecl) -> Scope:
    return tuple(Column(rel.name, a.name, a.type) for a in rel.attrs)


class _Checker:
    def __init__(self, schema: A.Schema):
        self.schema = schema
        self.diags: list[Diagnostic] = []

    def err(self, msg: str, pos: Optional[A.Pos]) -> None:
        self.diags.append(Diagnostic(msg, pos))

    # -- schema ------------------------------------------------------------
    def check_schema(self) -> None:
        seen: set[str] = set()
        for r in self.schema.relations:
            if r.name in seen:
                self.err(f"duplicate relation {r.name!r}", r.pos)
            seen.add(r.name)
            names: set[str] = set()
            for a in r.attrs:
                if a.name in names:
                    self.err(f"duplicate attribute {a.name!r} in relation {r.name!r}", a.pos)
                names.add(a.name)

    # -- attribute lookup ----------------------------------------------------
    def lookup(self, ref: A.AttrRef, scope: Scope) -> Optional[tuple[int, Column]]:
        hits = [(i, c) for i, c in enumerate(scope, start=1)
                if c.name == ref.name and (ref.rel is None or c.qual == ref.rel)]
        if not hits:
            self.err(f"unknown attribute {ref.text()!r}", ref.pos)
            return None
        if len(hits) > 1:
            self.err(f"ambiguous attribute {ref.text()!r}; qualify it with a relation name", ref.pos)
            return None
        return hits[0]

    def resolve_attr(self, ref: A.AttrRef, scope: Scope) -> Optional[tuple[A.AttrRef, str]]:
        hit = self.lookup(ref, scope)
        if hit is None:
            return None
        i, col = hit
        return A.AttrRef(ref.rel, ref.name, i, pos=ref.pos), col.type

    # -- values and operands --------------------------------------------------
    def value(self, v: A.Value, params: dict[str, str]) -> Optional[tuple[A.Value, str]]:
        if isinstance(v, A.IntLit):
            return v, A.INT
        if isinstance(v, A.StrLit):
            return v, A.STRING
        if v.name not in params:
            self.err(f"unknown parameter {v.name!r}", v.pos)
            return None
        return v, params[v.name]

    def operand(self, o: A.Operand, scope: Scope, params: dict[str, str]):
        if isinstance(o, A.AttrRef):
            return self.resolve_attr(o, scope)
        if isinstance(o, A.Ident):
            cols = [c for c in scope if c.name == o.name]
            if cols and o.name in params:
                self.err(f"identifier {o.name!r} is both an attribute and a parameter", o.pos)
                return None
            if cols:
                return self.resolve_attr(A.AttrRef(None, o.name, pos=o.pos), scope)
            if o.name in params:
                return A.Param(o.name, pos=o.pos), params[o.name]
            self.err(f"unknown attribute or parameter {o.name!r}", o.pos)
            return None
        return self.value(o, params)

    # -- predicates ------------------------------------------------------------
    def pred(self, p: A.Pred, scope: Scope, params: dict[str, str]) -> Optional[A.Pred]:
        if isinstance(p, A.PTrue):
            return p
        if isinstance(p, A.Cmp):
            l = self.operand(p.left, scope, params)
            r = self.operand(p.right, scope, params)
            if l is None or r is None:
                return None
            (lv, lt), (rv, rt) = l, r
            if lt != rt:
                self.err(f"type mismatch in comparison: {lt} {p.op} {rt}", p.pos)
                return None
            if p.op in A.ORDER_OPS and lt != A.INT:
                self.err(f"operator {p.op!r} requires Int operands, got {lt}", p.pos)
                return None
            return A.Cmp(p.op, lv, rv, pos=p.pos)
        if isinstance(p, A.In):
            a = self.resolve_attr(p.attr, scope)
            sub = self.query(p.query, params)
            if a is None or sub is None:
                return None
            (attr, at), (q, cols) = a, sub
            if cols[0].type != at:
                self.err(f"membership type mismatch: {attr.text()!r} is {at} but the subquery's "
                         f"first column is {cols[0].type}", p.pos)
                return None
            return A.In(attr, q, pos=p.pos)
        if isinstance(p, (A.And, A.Or)):
            l = self.pred(p.left, scope, params)
            r = self.pred(p.right, scope, params)
            if l is None or r is None:
                return None
            return type(p)(l, r, pos=p.pos)
        if isinstance(p, A.Not):
            a = self.pred(p.arg, scope, params)
            return None if a is None else A.Not(a, pos=p.pos)
        raise TypeError(p)

    # -- queries -------------------------------------------------------------
    def query(self, q: A.Query, params: dict[str, str]) -> Optional[tuple[A.Query, Scope]]:
        if isinstance(q, A.Rel):
            rel = self.schema.get(q.name)
            if rel is None:
                self.err(f"unknown relation {q.name!r}", q.pos)
                return None
            return q, relation_scope(rel)
        if isinstance(q, A.Proj):
            sub = self.query(q.query, params)
            if sub is None:
                return None
            inner, scope = sub
            attrs: list[A.AttrRef] = []
            cols: list[Column] = []
            ok = True
            for ref in q.attrs:
                hit = self.lookup(ref, scope)
                if hit is None:
                    ok = False
                    continue
                i, col = hit
                attrs.append(A.AttrRef(ref.rel, ref.name, i, pos=ref.pos))
                cols.append(col)
            if not ok:
                return None
            return A.Proj(tuple(attrs), inner, pos=q.pos), tuple(cols)
        if isinstance(q, A.Sel):
            sub = self.query(q.query, params)
            if sub is None:
                return None
            inner, scope = sub
            p = self.pred(q.pred, scope, params)
            if p is None:
                return None
            return A.Sel(p, inner, pos=q.pos), scope
        if isinstance(q, (A.Join, A.NJoin)):
            l = self.query(q.left, params)
            r = self.query(q.right, params)
            if l is None or r is None:
                return None
            (lq, ls), (rq, rs) = l, r
            scope = ls + rs
            if isinstance(q, A.NJoin):
                p = self.natural_pred(ls, rs, q.pos)
                if p is None:
                    return None
                return A.Join(lq, rq, p, natural=True, pos=q.pos), scope
            p = self.pred(q.pred, scope, params)
            if p is None:
                return None
            return A.Join(lq, rq, p, q.natural, pos=q.pos), scope
        if isinstance(q, (A.Union_, A.Minus)):
            l = self.query(q.left, params)
            r = self.query(q.right, params)
            if l is None or r is None:
                return None
            (lq, ls), (rq, rs) = l, r
            op = "union" if isinstance(q, A.Union_) else "minus"
            if [c.type for c in ls] != [c.type for c in rs]:
                self.err(f"{op} operands have incompatible columns: "
                         f"({', '.join(c.type for c in ls)}) vs ({', '.join(c.type for c in rs)})", q.pos)
                return None
            return type(q)(lq, rq, pos=q.pos), ls
        raise TypeError(q)

    def natural_pred(self, ls: Scope, rs: Scope, pos) -> Optional[A.Pred]:
        eqs: list[A.Pred] = []
        for i, lc in enumerate(ls, start=1):
            for j, rc in enumerate(rs, start=1):
                if lc.name != rc.name:
                    continue
                if lc.type != rc.type:
                    self.err(f"natural join on {lc.name!r} with mismatched types {lc.type}/{rc.type}", pos)
                    return None
                eqs.append(A.Cmp("==", A.AttrRef(lc.qual, lc.name, i),
                                 A.AttrRef(rc.qual, rc.name, len(ls) + j)))
        if not eqs:
            return A.PTrue()
        out = eqs[0]
        for e in eqs[1:]:
            out = A.And(out, e)
        return out

    # -- statements --------------------------------------------------------------
    def stmt(self, s: A.Stmt, params: dict[str, str]) -> Optional[A.Stmt]:
        rel = self.schema.get(s.rel)
        if rel is None:
            self.err(f"unknown relation {s.rel!r}", s.pos)
            return None
        scope = relation_scope(rel)
        if isinstance(s, A.Ins):
            by_name = {a.name: a.type for a in rel.attrs}
            given: dict[str, A.Value] = {}
            ok = True
            unknown = False
            for name, v in s.fields:
                if name not in by_name:
                    self.err(f"relation {rel.name!r} has no attribute {name!r}", v.pos or s.pos)
                    ok, unknown = False, True
                    continue
                if name in given:
                    self.err(f"attribute {name!r} assigned twice", v.pos or s.pos)
                    ok = False
                    continue
                r = self.value(v, params)
                if r is None:
                    ok = False
                    given[name] = v
                    continue
                if r[1] != by_name[name]:
                    self.err(f"attribute {name!r} expects {by_name[name]}, got {r[1]}", v.pos or s.pos)
                    ok = False
                given[name] = v
            missing = [a.name for a in rel.attrs if a.name not in given]
            if missing and not unknown:
                self.err(f"insert into {rel.name!r} does not assign {', '.join(missing)}", s.pos)
                ok = False
            if not ok:
                return None
            # Canonical declaration order; the positional tuple follows it.
            return A.Ins(rel.name, tuple((a.name, given[a.name]) for a in rel.attrs), pos=s.pos)
        if isinstance(s, A.Del):
            p = self.pred(s.pred, scope, params)
            return None if p is None else A.Del(s.rel, p, pos=s.pos)
        if isinstance(s, A.Upd):
            p = self.pred(s.pred, scope, params)
            a = self.resolve_attr(s.attr, scope)
            v = self.value(s.value, params)
            if p is None or a is None or v is None:
                return None
            if a[1] != v[1]:
                self.err(f"attribute {s.attr.text()!r} expects {a[1]}, got {v[1]}", s.pos)
                return None
            return A.Upd(s.rel, p, a[0], v[0], pos=s.pos)
        raise TypeError(s)

    def param_map(self, txn) -> dict[str, str]:
        out: dict[str, str] = {}
        for p in txn.params:
            if p.name in out:
                self.err(f"duplicate parameter {p.name!r} in {txn.name!r}", p.pos)
            out[p.name] = p.type
        return out

    def program(self, prog: A.Program) -> A.Program:
        self.check_schema()
        names: set[str] = set()
        for t in list(prog.updates) + list(prog.queries):
            if t.name in names:
                self.err(f"duplicate transaction {t.name!r}", t.pos)
            names.add(t.name)
        updates = []
        for u in prog.updates:
            params = self.param_map(u)
            body = tuple(self.stmt(s, params) for s in u.body)
            updates.append(A.UpdateTxn(u.name, u.params, body, pos=u.pos))
        queries = []
        for q in prog.queries:
            params = self.param_map(q)
            r = self.query(q.body, params)
            queries.append(A.QueryTxn(q.name, q.params, r[0] if r else q.body, pos=q.pos))
        return A.Program(prog.schema, tuple(updates), tuple(queries))


def validate(prog: A.Program) -> A.Program:
    """Resolve and type-check ``prog``; raise IRValidationError listing every problem."""
    c = _Checker(prog.schema)
    out = c.program(prog)
    if c.diags:
        raise IRValidationError(c.diags)
    return out


def query_scope(schema: A.Schema, q: A.Query) -> Scope:
    """Output scope of an already-parsed query, without checking predicates."""
    if isinstance(q, A.Rel):
        rel = schema.get(q.name)
        if rel is None:
            raise IRValidationError([Diagnostic(f"unknown relation {q.name!r}", q.pos)])
        return relation_scope(rel)
    if isinstance(q, A.Proj):
        scope = query_scope(schema, q.query)
        c = _Checker(schema)
        cols = []
        for ref in q.attrs:
            hit = (ref.index, scope[ref.index - 1]) if 0 < ref.index <= len(scope) else c.lookup(ref, scope)
            if hit is None:
                raise IRValidationError(c.diags)
            cols.append(hit[1])
        return tuple(cols)
    if isinstance(q, A.Sel):
        return query_scope(schema, q.query)
    if isinstance(q, (A.Join, A.NJoin)):
        return query_scope(schema, q.left) + query_scope(schema, q.right)
    if isinstance(q, (A.Union_, A.Minus)):
        ls, rs = query_scope(schema, q.left), query_scope(schema, q.right)
        if [c.type for c in ls] != [c.type for c in rs]:
            op = "union" if isinstance(q, A.Union_) else "minus"
            raise IRValidationError([Diagnostic(
                f"{op} operands have incompatible columns: ({', '.join(c.type for c in ls)}) "
                f"vs ({', '.join(c.type for c in rs)})", q.pos)])
        return ls
    raise TypeError(q)


def output_attrs(schema: A.Schema, q: A.Query) -> list[tuple[str, str]]:
    """Output columns of ``q`` as (name, type) pairs."""
    return [(c.name, c.type) for c in query_scope(schema, q)]
