"""Generic tree rewriting and capture-avoiding substitution."""

from __future__ import annotations

import dataclasses
from typing import Callable, Mapping

from . import terms as T


class CaptureError(RuntimeError):
    """Substitution would capture a free variable of the replacement."""


def _is_node(x) -> bool:
    return dataclasses.is_dataclass(x) and not isinstance(x, type)


def map_children(n, f: Callable):
    """Rebuild ``n`` with ``f`` applied to every direct child node."""
    if not _is_node(n):
        return n
    changes = {}
    for fld in dataclasses.fields(n):
        v = getattr(n, fld.name)
        nv = _map_value(v, f)
        if nv is not v:
            changes[fld.name] = nv
    return dataclasses.replace(n, **changes) if changes else n


def _map_value(v, f):
    if isinstance(v, T.Var):
        return v
    if _is_node(v):
        return f(v)
    if isinstance(v, tuple):
        out = tuple(_map_value(x, f) for x in v)
        return v if all(a is b for a, b in zip(out, v)) else out
    return v


def bottom_up(n, f: Callable):
    """Apply ``f`` to every node after its children were rewritten."""
    return f(map_children(n, lambda c: bottom_up(c, f)))


def substitute(F, sym: str, t: T.RelTerm):
    """Replace free occurrences of relation symbol ``sym`` in ``F`` by ``t``."""
    return substitute_many(F, {(sym, T.REL): t})


def substitute_many(F, sub: Mapping[tuple[str, str], object]):
    """Simultaneous substitution keyed by (name, sort)."""
    if not sub:
        return F
    fv_of = {k: T.free_vars(v) for k, v in sub.items()}

    def go(n, sub):
        if isinstance(n, T.RVar):
            return sub.get((n.name, T.REL), n)
        if isinstance(n, T.TVar):
            return sub.get((n.name, T.TUP), n)
        if isinstance(n, T.VVar):
            return sub.get((n.name, T.VAL), n)
        if isinstance(n, (T.Exists, T.Forall)):
            bound = {(v.name, v.sort) for v in n.vars}
            inner = {k: v for k, v in sub.items() if k not in bound}
            if not inner:
                return n
            body_fv = T.free_vars(n.body)
            for k in inner:
                if k in body_fv and fv_of[k] & bound:
                    raise CaptureError(
                        f"substituting for {k[0]} under binder {sorted(b[0] for b in bound)} captures a variable")
            return dataclasses.replace(n, body=go(n.body, inner))
        return map_children(n, lambda c: go(c, sub))

    return go(F, dict(sub))


def rename_rel_symbols(F, mapping: Mapping[str, str]):
    return substitute_many(F, {(a, T.REL): T.RVar(b) for a, b in mapping.items()})
