"""Syntax tree for the database-program IR.

Nodes are frozen dataclasses.  Source positions are carried for diagnostics
but excluded from equality, so two parses of equivalent text compare equal.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

INT = "Int"
STRING = "String"
TYPES = (INT, STRING)

CMP_OPS = ("<=", "<", "==", "!=", ">", ">=")
ORDER_OPS = ("<=", "<", ">", ">=")


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self) -> str:
        return f"{self.line}:{self.col}"


def _pos() -> Optional[Pos]:
    return field(default=None, compare=False, repr=False)


# -- values ------------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class StrLit:
    value: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Param:
    name: str
    pos: Optional[Pos] = _pos()


Value = Union[IntLit, StrLit, Param]


@dataclass(frozen=True)
class AttrRef:
    """``R.a`` or a bare ``a``.

    ``index`` is the 1-based column position in the enclosing scope; the
    validator fills it in, the parser leaves it at 0.
    """

    rel: Optional[str]
    name: str
    index: int = 0
    pos: Optional[Pos] = _pos()

    def text(self) -> str:
        return f"{self.rel}.{self.name}" if self.rel else self.name


@dataclass(frozen=True)
class Ident:
    """Unresolved bare identifier in a predicate operand (attribute or parameter)."""

    name: str
    pos: Optional[Pos] = _pos()


Operand = Union[AttrRef, Ident, IntLit, StrLit, Param]


# -- predicates --------------------------------------------------------------

@dataclass(frozen=True)
class PTrue:
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Cmp:
    op: str
    left: Operand
    right: Operand
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class In:
    attr: AttrRef
    query: "Query"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class And:
    left: "Pred"
    right: "Pred"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Or:
    left: "Pred"
    right: "Pred"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Not:
    arg: "Pred"
    pos: Optional[Pos] = _pos()


Pred = Union[PTrue, Cmp, In, And, Or, Not]


# -- queries -----------------------------------------------------------------

@dataclass(frozen=True)
class Rel:
    name: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Proj:
    attrs: tuple[AttrRef, ...]
    query: "Query"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Sel:
    pred: Pred
    query: "Query"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Join:
    """Theta join.  ``natural`` marks a desugared ``njoin`` for printing."""

    left: "Query"
    right: "Query"
    pred: Pred
    natural: bool = False
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class NJoin:
    left: "Query"
    right: "Query"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Union_:
    left: "Query"
    right: "Query"
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Minus:
    left: "Query"
    right: "Query"
    pos: Optional[Pos] = _pos()


Query = Union[Rel, Proj, Sel, Join, NJoin, Union_, Minus]


# -- statements and programs -------------------------------------------------

@dataclass(frozen=True)
class Ins:
    rel: str
    fields: tuple[tuple[str, Value], ...]
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Del:
    rel: str
    pred: Pred
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class Upd:
    rel: str
    pred: Pred
    attr: AttrRef
    value: Value
    pos: Optional[Pos] = _pos()


Stmt = Union[Ins, Del, Upd]


@dataclass(frozen=True)
class ParamDecl:
    name: str
    type: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class UpdateTxn:
    name: str
    params: tuple[ParamDecl, ...]
    body: tuple[Stmt, ...]
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class QueryTxn:
    name: str
    params: tuple[ParamDecl, ...]
    body: Query
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class AttrDecl:
    name: str
    type: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class RelDecl:
    name: str
    attrs: tuple[AttrDecl, ...]
    pos: Optional[Pos] = _pos()

    @property
    def attr_names(self) -> tuple[str, ...]:
        return tuple(a.name for a in self.attrs)

    @property
    def arity(self) -> int:
        return len(self.attrs)


@dataclass(frozen=True)
class Schema:
    relations: tuple[RelDecl, ...]

    def get(self, name: str) -> Optional[RelDecl]:
        for r in self.relations:
            if r.name == name:
                return r
        return None

    def __getitem__(self, name: str) -> RelDecl:
        r = self.get(name)
        if r is None:
            raise KeyError(name)
        return r

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(r.name for r in self.relations)


@dataclass(frozen=True)
class Program:
    schema: Schema
    updates: tuple[UpdateTxn, ...]
    queries: tuple[QueryTxn, ...]

    def update(self, name: str) -> Optional[UpdateTxn]:
        return next((u for u in self.updates if u.name == name), None)

    def query(self, name: str) -> Optional[QueryTxn]:
        return next((q for q in self.queries if q.name == name), None)

    def txn(self, name: str) -> Optional[Union[UpdateTxn, QueryTxn]]:
        return self.update(name) or self.query(name)
