"""Infix and s-expression renderings of T_RA nodes."""

from __future__ import annotations

import json

from . import terms as T

_OPS = {"==": "=", "!=": "≠", "<=": "≤", ">=": "≥", "<": "<", ">": ">"}


def _const(v) -> str:
    return json.dumps(v, ensure_ascii=False) if isinstance(v, str) else str(v)


def show(n) -> str:
    """Human-readable infix form."""
    if isinstance(n, T.Const):
        return _const(n.value)
    if isinstance(n, (T.VVar, T.TVar, T.RVar)):
        return n.name
    if isinstance(n, T.Get):
        return f"a{n.index}({show(n.tup)})"
    if isinstance(n, T.TLit):
        return "[" + ", ".join(show(v) for v in n.vals) + "]"
    if isinstance(n, T.ProjT):
        return f"Π'{list(n.indices)}({show(n.tup)})"
    if isinstance(n, T.Cat):
        return f"cat{n.n}({show(n.left)}, {show(n.right)})"
    if isinstance(n, T.UpdT):
        return f"{show(n.tup)}[a{n.index} ← {show(n.value)}]"
    # predicates
    if isinstance(n, T.PAttr):
        return f"a{n.index}"
    if isinstance(n, T.PTrue):
        return "true"
    if isinstance(n, T.PCmp):
        return f"{show(n.left)} {_OPS[n.op]} {show(n.right)}"
    if isinstance(n, T.PIn):
        return f"a{n.index} ∈ {show(n.rel)}"
    if isinstance(n, T.PAnd):
        return f"({show(n.left)} ∧ {show(n.right)})"
    if isinstance(n, T.POr):
        return f"({show(n.left)} ∨ {show(n.right)})"
    if isinstance(n, T.PNot):
        return f"¬{show(n.arg)}"
    # relations
    if isinstance(n, T.Table):
        return "[" + ", ".join("[" + ", ".join(show(v) for v in r) + "]" for r in n.rows) + "]"
    if isinstance(n, T.Cons):
        return f"({show(n.head)} :: {show(n.tail)})"
    if isinstance(n, T.Proj):
        return f"Π{list(n.indices)}({show(n.arg)})"
    if isinstance(n, T.Sel):
        return f"σ[{show(n.pred)}]({show(n.arg)})"
    if isinstance(n, T.Prod):
        return f"({show(n.left)} × {show(n.right)})"
    if isinstance(n, T.Union_):
        return f"({show(n.left)} ∪ {show(n.right)})"
    if isinstance(n, T.Diff):
        return f"({show(n.left)} − {show(n.right)})"
    if isinstance(n, T.UpdAttr):
        return f"{show(n.arg)}⟨⟨a{n.index} ← {show(n.value)}⟩⟩"
    if isinstance(n, T.ProdRow):
        return f"({show(n.head)} ×' {show(n.arg)})"
    if isinstance(n, T.DelFirst):
        return f"del'({show(n.head)}, {show(n.arg)})"
    # formulas
    if isinstance(n, T.FTrue):
        return "true"
    if isinstance(n, T.FFalse):
        return "false"
    if isinstance(n, T.Eq):
        return f"{show(n.left)} = {show(n.right)}"
    if isinstance(n, T.FAnd):
        return "(" + " ∧ ".join(show(a) for a in n.args) + ")"
    if isinstance(n, T.FOr):
        return "(" + " ∨ ".join(show(a) for a in n.args) + ")"
    if isinstance(n, T.FNot):
        return f"¬({show(n.arg)})"
    if isinstance(n, T.Implies):
        return f"({show(n.left)} → {show(n.right)})"
    if isinstance(n, T.Iff):
        return f"({show(n.left)} ↔ {show(n.right)})"
    if isinstance(n, (T.Exists, T.Forall)):
        q = "∃" if isinstance(n, T.Exists) else "∀"
        return f"{q}{','.join(v.name for v in n.vars)}. {show(n.body)}"
    if isinstance(n, T.Holds):
        return f"{show(n.pred)} @ {show(n.tup)}"
    if isinstance(n, T.Mem):
        return f"{show(n.value)} ∈₁ {show(n.rel)}"
    raise TypeError(n)


def sexpr(n) -> str:
    """Fully parenthesised prefix form, stable across runs."""
    if isinstance(n, T.Const):
        return _const(n.value)
    if isinstance(n, (T.VVar, T.TVar, T.RVar)):
        return n.name
    if isinstance(n, T.Get):
        return f"(get {n.index} {sexpr(n.tup)})"
    if isinstance(n, T.TLit):
        return "(tuple" + "".join(" " + sexpr(v) for v in n.vals) + ")"
    if isinstance(n, T.ProjT):
        return f"(projt ({' '.join(map(str, n.indices))}) {sexpr(n.tup)})"
    if isinstance(n, T.Cat):
        return f"(cat {n.n} {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.UpdT):
        return f"(updt {n.index} {sexpr(n.value)} {sexpr(n.tup)})"
    if isinstance(n, T.PAttr):
        return f"a{n.index}"
    if isinstance(n, T.PTrue):
        return "true"
    if isinstance(n, T.PCmp):
        return f"({n.op} {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.PIn):
        return f"(in a{n.index} {sexpr(n.rel)})"
    if isinstance(n, T.PAnd):
        return f"(pand {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.POr):
        return f"(por {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.PNot):
        return f"(pnot {sexpr(n.arg)})"
    if isinstance(n, T.Table):
        return "(table" + "".join(" (" + " ".join(sexpr(v) for v in r) + ")" for r in n.rows) + ")"
    if isinstance(n, T.Cons):
        return f"(cons {sexpr(n.head)} {sexpr(n.tail)})"
    if isinstance(n, T.Proj):
        return f"(proj ({' '.join(map(str, n.indices))}) {sexpr(n.arg)})"
    if isinstance(n, T.Sel):
        return f"(sel {sexpr(n.pred)} {sexpr(n.arg)})"
    if isinstance(n, T.Prod):
        return f"(prod {n.n} {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.Union_):
        return f"(union {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.Diff):
        return f"(diff {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.UpdAttr):
        return f"(upd {n.index} {sexpr(n.value)} {sexpr(n.arg)})"
    if isinstance(n, T.ProdRow):
        return f"(prodrow {n.n} {sexpr(n.head)} {sexpr(n.arg)})"
    if isinstance(n, T.DelFirst):
        return f"(delfirst {sexpr(n.head)} {sexpr(n.arg)})"
    if isinstance(n, T.FTrue):
        return "true"
    if isinstance(n, T.FFalse):
        return "false"
    if isinstance(n, T.Eq):
        return f"(= {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.FAnd):
        return "(and" + "".join(" " + sexpr(a) for a in n.args) + ")"
    if isinstance(n, T.FOr):
        return "(or" + "".join(" " + sexpr(a) for a in n.args) + ")"
    if isinstance(n, T.FNot):
        return f"(not {sexpr(n.arg)})"
    if isinstance(n, T.Implies):
        return f"(=> {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, T.Iff):
        return f"(iff {sexpr(n.left)} {sexpr(n.right)})"
    if isinstance(n, (T.Exists, T.Forall)):
        q = "exists" if isinstance(n, T.Exists) else "forall"
        vs = " ".join(f"({v.name} {v.sort})" for v in n.vars)
        return f"({q} ({vs}) {sexpr(n.body)})"
    if isinstance(n, T.Holds):
        return f"(holds {sexpr(n.pred)} {sexpr(n.tup)})"
    if isinstance(n, T.Mem):
        return f"(mem {sexpr(n.value)} {sexpr(n.rel)})"
    raise TypeError(n)
