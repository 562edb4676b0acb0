"""Canonical text rendering of IR trees (raw or validated)."""

from __future__ import annotations

from . import ast as A

_PREC = {A.Or: 1, A.And: 2, A.Not: 3}


def quote(s: str) -> str:
    body = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{body}"'


def operand(o) -> str:
    if isinstance(o, A.IntLit):
        return str(o.value)
    if isinstance(o, A.StrLit):
        return quote(o.value)
    if isinstance(o, (A.Param, A.Ident)):
        return o.name
    if isinstance(o, A.AttrRef):
        return o.text()
    raise TypeError(o)


def pred(p: A.Pred, ctx: int = 0) -> str:
    prec = _PREC.get(type(p), 4)
    if isinstance(p, A.PTrue):
        s = "true"
    elif isinstance(p, A.Cmp):
        s = f"{operand(p.left)} {p.op} {operand(p.right)}"
    elif isinstance(p, A.In):
        s = f"{p.attr.text()} in {query(p.query)}"
    elif isinstance(p, A.Not):
        s = "!" + pred(p.arg, 3)
    else:
        op = "&&" if isinstance(p, A.And) else "||"
        # Both connectives parse left-associatively, so a right child of
        # equal precedence keeps its parentheses.
        s = f"{pred(p.left, prec)} {op} {pred(p.right, prec + 1)}"
    return f"({s})" if prec < ctx else s


def query(q: A.Query) -> str:
    if isinstance(q, A.Rel):
        return q.name
    if isinstance(q, A.Proj):
        return f"proj[{', '.join(a.text() for a in q.attrs)}]({query(q.query)})"
    if isinstance(q, A.Sel):
        return f"sel({pred(q.pred)}, {query(q.query)})"
    if isinstance(q, A.Join):
        if q.natural:
            return f"njoin({query(q.left)}, {query(q.right)})"
        return f"join({query(q.left)}, {query(q.right)}, {pred(q.pred)})"
    if isinstance(q, A.NJoin):
        return f"njoin({query(q.left)}, {query(q.right)})"
    if isinstance(q, A.Union_):
        return f"union({query(q.left)}, {query(q.right)})"
    if isinstance(q, A.Minus):
        return f"minus({query(q.left)}, {query(q.right)})"
    raise TypeError(q)


def stmt(s: A.Stmt) -> str:
    if isinstance(s, A.Ins):
        fields = ", ".join(f"{n}: {operand(v)}" for n, v in s.fields)
        return f"ins({s.rel}, {{{fields}}});"
    if isinstance(s, A.Del):
        return f"del({s.rel}, {pred(s.pred)});"
    if isinstance(s, A.Upd):
        return f"upd({s.rel}, {pred(s.pred)}, {s.attr.text()}, {operand(s.value)});"
    raise TypeError(s)


def _params(ps) -> str:
    return ", ".join(f"{p.name}:{p.type}" for p in ps)


def program(p: A.Program) -> str:
    lines = ["schema {"]
    for r in p.schema.relations:
        lines.append(f"  {r.name}({', '.join(f'{a.name}:{a.type}' for a in r.attrs)});")
    lines.append("}")
    for u in p.updates:
        lines.append("")
        lines.append(f"update {u.name}({_params(u.params)}) {{")
        lines.extend("  " + stmt(s) for s in u.body)
        lines.append("}")
    for q in p.queries:
        lines.append("")
        lines.append(f"query {q.name}({_params(q.params)}) {{")
        lines.append("  " + query(q.body))
        lines.append("}")
    return "\n".join(lines) + "\n"
