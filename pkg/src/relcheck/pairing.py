"""Transaction correspondence between two programs and symbol naming.

Both programs are translated into one T_RA vocabulary.  The old program
keeps its names; a new-program relation or parameter whose name is already
taken gets primes appended until it is unique (``Subscriber`` becomes
``Subscriber'``, parameter ``id`` becomes ``id'``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .ir import ast as A
from .tra import terms as T
from .tra.translate import Side

Txn = Union[A.UpdateTxn, A.QueryTxn]


class PairingError(ValueError):
    """The two programs' transactions cannot be put in correspondence."""


@dataclass(frozen=True)
class TxnPair:
    old: Txn
    new: Txn
    old_side: Side
    new_side: Side
    shared: int  # number of positionally equated parameters

    @property
    def param_eqs(self) -> list[T.Formula]:
        return [T.Eq(T.VVar(self.old_side.param(a.name)), T.VVar(self.new_side.param(b.name)))
                for a, b in zip(self.old.params[:self.shared], self.new.params[:self.shared])]

    @property
    def value_types(self) -> dict[str, str]:
        out = {self.old_side.param(p.name): p.type for p in self.old.params}
        out.update({self.new_side.param(p.name): p.type for p in self.new.params})
        return out

    @property
    def label(self) -> str:
        return self.old.name if self.old.name == self.new.name else f"{self.old.name}/{self.new.name}"


@dataclass(frozen=True)
class Pairing:
    old: A.Program
    new: A.Program
    old_rels: Mapping[str, str]
    new_rels: Mapping[str, str]
    updates: tuple[TxnPair, ...]
    queries: tuple[TxnPair, ...]
    unpaired_new: tuple[str, ...] = field(default=())

    def old_side(self) -> Side:
        return Side(self.old_rels, {})

    def new_side(self) -> Side:
        return Side(self.new_rels, {})


def _unique(name: str, used: set[str]) -> str:
    out = name
    while out in used:
        out += "'"
    used.add(out)
    return out


def relation_names(old: A.Program, new: A.Program) -> tuple[dict[str, str], dict[str, str]]:
    used: set[str] = set()
    o = {r: _unique(r, used) for r in old.schema.names}
    n = {r: _unique(r, used) for r in new.schema.names}
    return o, n


def _sides(old_rels, new_rels, a: Txn, b: Txn) -> tuple[Side, Side]:
    used = set(old_rels.values()) | set(new_rels.values())
    pa = {p.name: _unique(p.name, used) for p in a.params}
    pb = {p.name: _unique(p.name, used) for p in b.params}
    return Side(old_rels, pa), Side(new_rels, pb)


def _select(old_list, new_list, mapping: Optional[Mapping[str, str]], kind: str):
    by_name = {t.name: t for t in new_list}
    out = []
    taken: set[str] = set()
    for i, t in enumerate(old_list):
        if mapping and t.name in mapping:
            target = mapping[t.name]
            if target not in by_name:
                raise PairingError(f"pairing maps {t.name!r} to unknown {kind} transaction {target!r}")
            other = by_name[target]
        elif i < len(new_list):
            other = new_list[i]
        else:
            raise PairingError(f"no {kind} transaction pairs with {t.name!r}")
        if other.name in taken:
            raise PairingError(f"{kind} transaction {other.name!r} is paired twice")
        taken.add(other.name)
        out.append((t, other))
    return out, tuple(t.name for t in new_list if t.name not in taken)


def pair_programs(old: A.Program, new: A.Program, mode: str = "equiv",
                  mapping: Optional[Mapping[str, str]] = None) -> Pairing:
    """Pair transactions positionally (or by ``mapping``) and check parameters.

    In ``equiv`` mode paired parameter lists must agree in length and types;
    in ``refine`` mode the old list must be a type-wise prefix of the new one.
    Unequal transaction counts are *not* an error here; callers decide.
    """
    if mapping:
        names = {t.name for t in old.updates} | {t.name for t in old.queries}
        for k in mapping:
            if k not in names:
                raise PairingError(f"pairing file names unknown transaction {k!r}")
    old_rels, new_rels = relation_names(old, new)
    ups, un_u = _select(old.updates, new.updates, mapping, "update")
    qs, un_q = _select(old.queries, new.queries, mapping, "query")
    pairs_u, pairs_q = [], []
    for (a, b), bucket in [(p, pairs_u) for p in ups] + [(p, pairs_q) for p in qs]:
        ta = [p.type for p in a.params]
        tb = [p.type for p in b.params]
        if mode == "equiv" and ta != tb:
            raise PairingError(f"parameters of {a.name!r} and {b.name!r} differ: "
                               f"({', '.join(ta)}) vs ({', '.join(tb)})")
        if mode == "refine" and tb[:len(ta)] != ta:
            raise PairingError(f"parameters of {a.name!r} are not a prefix of {b.name!r}'s")
        sa, sb = _sides(old_rels, new_rels, a, b)
        bucket.append(TxnPair(a, b, sa, sb, len(ta)))
    return Pairing(old, new, old_rels, new_rels, tuple(pairs_u), tuple(pairs_q), un_u + un_q)
