"""Recursive-descent parser for the IR text format."""

from __future__ import annotations

import re
from dataclasses import dataclass

from . import ast as A
from .errors import IRSyntaxError

KEYWORDS = frozenset({
    "schema", "update", "query", "ins", "del", "upd", "proj", "sel", "join",
    "njoin", "union", "minus", "in", "true", "Int", "String",
})

_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*")
  | (?P<int>-?[0-9]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op><=|>=|==|!=|&&|\|\||[<>!(){}\[\],;:.])
""", re.VERBOSE)

_ESCAPES = {"n": "\n", "t": "\t", "\\": "\\", '"': '"'}


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, string, op, eof
    text: str
    pos: A.Pos


def tokenize(text: str) -> list[Token]:
    toks: list[Token] = []
    line, line_start, i = 1, 0, 0
    while i < len(text):
        m = _TOKEN_RE.match(text, i)
        pos = A.Pos(line, i - line_start + 1)
        if m is None:
            raise IRSyntaxError(f"unexpected character {text[i]!r}", pos)
        kind = m.lastgroup
        s = m.group()
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind in ("ws", "comment"):
            pass
        elif kind == "ident":
            toks.append(Token("keyword" if s in KEYWORDS else "ident", s, pos))
        else:
            toks.append(Token(kind, s, pos))
        i = m.end()
    toks.append(Token("eof", "", A.Pos(line, i - line_start + 1)))
    return toks


def _unescape(lit: str, pos: A.Pos) -> str:
    body = lit[1:-1]
    out: list[str] = []
    i = 0
    while i < len(body):
        c = body[i]
        if c == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise IRSyntaxError(f"unknown escape \\{nxt}", pos)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(c)
            i += 1
    return "".join(out)


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers -------------------------------------------------------
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def _describe(self, t: Token) -> str:
        return "end of input" if t.kind == "eof" else repr(t.text)

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("op", "keyword") and t.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise IRSyntaxError(f"expected {text!r}, found {self._describe(self.tok)}", self.tok.pos)
        t = self.tok
        self.i += 1
        return t

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def ident(self) -> Token:
        t = self.tok
        if t.kind != "ident":
            raise IRSyntaxError(f"expected identifier, found {self._describe(t)}", t.pos)
        self.i += 1
        return t

    def type_name(self) -> str:
        t = self.tok
        if t.kind == "keyword" and t.text in A.TYPES:
            self.i += 1
            return t.text
        raise IRSyntaxError(f"expected Int or String, found {self._describe(t)}", t.pos)

    # -- program -------------------------------------------------------------
    def program(self) -> A.Program:
        self.expect("schema")
        # A schema name is tolerated and discarded: `schema S { ... }`.
        if self.tok.kind == "ident":
            self.i += 1
        self.expect("{")
        rels = [self.reldecl()]
        while not self.at("}"):
            rels.append(self.reldecl())
        self.expect("}")
        updates: list[A.UpdateTxn] = []
        queries: list[A.QueryTxn] = []
        if self.tok.kind == "eof":
            raise IRSyntaxError("expected at least one transaction", self.tok.pos)
        while self.tok.kind != "eof":
            if self.at("update"):
                updates.append(self.update_txn())
            elif self.at("query"):
                queries.append(self.query_txn())
            else:
                raise IRSyntaxError(
                    f"expected 'update' or 'query', found {self._describe(self.tok)}", self.tok.pos)
        return A.Program(A.Schema(tuple(rels)), tuple(updates), tuple(queries))

    def reldecl(self) -> A.RelDecl:
        name = self.ident()
        self.expect("(")
        attrs = [self.attrdecl()]
        while self.accept(","):
            attrs.append(self.attrdecl())
        self.expect(")")
        # The trailing ';' is optional so one-line schemas read naturally.
        self.accept(";")
        return A.RelDecl(name.text, tuple(attrs), pos=name.pos)

    def attrdecl(self) -> A.AttrDecl:
        name = self.ident()
        self.expect(":")
        return A.AttrDecl(name.text, self.type_name(), pos=name.pos)

    def params(self) -> tuple[A.ParamDecl, ...]:
        self.expect("(")
        out: list[A.ParamDecl] = []
        if not self.at(")"):
            while True:
                name = self.ident()
                self.expect(":")
                out.append(A.ParamDecl(name.text, self.type_name(), pos=name.pos))
                if not self.accept(","):
                    break
        self.expect(")")
        return tuple(out)

    def update_txn(self) -> A.UpdateTxn:
        kw = self.expect("update")
        name = self.ident()
        params = self.params()
        self.expect("{")
        body = [self.stmt()]
        while not self.at("}"):
            body.append(self.stmt())
        self.expect("}")
        return A.UpdateTxn(name.text, params, tuple(body), pos=kw.pos)

    def query_txn(self) -> A.QueryTxn:
        kw = self.expect("query")
        name = self.ident()
        params = self.params()
        self.expect("{")
        body = self.qexpr()
        self.accept(";")
        self.expect("}")
        return A.QueryTxn(name.text, params, body, pos=kw.pos)

    # -- statements ----------------------------------------------------------
    def stmt(self) -> A.Stmt:
        t = self.tok
        if self.accept("ins"):
            self.expect("(")
            rel = self.ident().text
            self.expect(",")
            self.expect("{")
            fields = [self.field()]
            while self.accept(","):
                fields.append(self.field())
            self.expect("}")
            self.expect(")")
            self.expect(";")
            return A.Ins(rel, tuple(fields), pos=t.pos)
        if self.accept("del"):
            self.expect("(")
            rel = self.ident().text
            self.expect(",")
            pred = self.pred()
            self.expect(")")
            self.expect(";")
            return A.Del(rel, pred, pos=t.pos)
        if self.accept("upd"):
            self.expect("(")
            rel = self.ident().text
            self.expect(",")
            pred = self.pred()
            self.expect(",")
            attr = self.attrref()
            self.expect(",")
            value = self.value()
            self.expect(")")
            self.expect(";")
            return A.Upd(rel, pred, attr, value, pos=t.pos)
        raise IRSyntaxError(f"expected ins, del or upd, found {self._describe(t)}", t.pos)

    def field(self) -> tuple[str, A.Value]:
        name = self.ident().text
        self.expect(":")
        return name, self.value()

    def value(self) -> A.Value:
        t = self.tok
        if t.kind == "int":
            self.i += 1
            return A.IntLit(int(t.text), pos=t.pos)
        if t.kind == "string":
            self.i += 1
            return A.StrLit(_unescape(t.text, t.pos), pos=t.pos)
        if t.kind == "ident":
            self.i += 1
            return A.Param(t.text, pos=t.pos)
        raise IRSyntaxError(f"expected value, found {self._describe(t)}", t.pos)

    def attrref(self) -> A.AttrRef:
        first = self.ident()
        if self.accept("."):
            second = self.ident()
            return A.AttrRef(first.text, second.text, pos=first.pos)
        return A.AttrRef(None, first.text, pos=first.pos)

    # -- queries -------------------------------------------------------------
    def qexpr(self) -> A.Query:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            return A.Rel(t.text, pos=t.pos)
        if self.accept("proj"):
            self.expect("[")
            attrs = [self.attrref()]
            while self.accept(","):
                attrs.append(self.attrref())
            self.expect("]")
            self.expect("(")
            q = self.qexpr()
            self.expect(")")
            return A.Proj(tuple(attrs), q, pos=t.pos)
        if self.accept("sel"):
            self.expect("(")
            p = self.pred()
            self.expect(",")
            q = self.qexpr()
            self.expect(")")
            return A.Sel(p, q, pos=t.pos)
        if self.accept("join"):
            self.expect("(")
            l = self.qexpr()
            self.expect(",")
            r = self.qexpr()
            self.expect(",")
            p = self.pred()
            self.expect(")")
            return A.Join(l, r, p, pos=t.pos)
        for kw, node in (("njoin", A.NJoin), ("union", A.Union_), ("minus", A.Minus)):
            if self.accept(kw):
                self.expect("(")
                l = self.qexpr()
                self.expect(",")
                r = self.qexpr()
                self.expect(")")
                return node(l, r, pos=t.pos)
        raise IRSyntaxError(f"expected query expression, found {self._describe(t)}", t.pos)

    # -- predicates: '!' binds tighter than '&&', which binds tighter than '||'
    def pred(self) -> A.Pred:
        left = self.pred_and()
        while self.at("||"):
            t = self.expect("||")
            left = A.Or(left, self.pred_and(), pos=t.pos)
        return left

    def pred_and(self) -> A.Pred:
        left = self.pred_unary()
        while self.at("&&"):
            t = self.expect("&&")
            left = A.And(left, self.pred_unary(), pos=t.pos)
        return left

    def pred_unary(self) -> A.Pred:
        t = self.tok
        if self.accept("!"):
            return A.Not(self.pred_unary(), pos=t.pos)
        if self.accept("("):
            p = self.pred()
            self.expect(")")
            return p
        if self.accept("true"):
            return A.PTrue(pos=t.pos)
        return self.atom()

    def atom(self) -> A.Pred:
        start = self.tok
        left = self.operand()
        if self.at("in"):
            if not isinstance(left, (A.Ident, A.AttrRef)):
                raise IRSyntaxError("left side of 'in' must be an attribute", start.pos)
            self.expect("in")
            attr = left if isinstance(left, A.AttrRef) else A.AttrRef(None, left.name, pos=left.pos)
            return A.In(attr, self.qexpr(), pos=start.pos)
        t = self.tok
        if t.kind == "op" and t.text in A.CMP_OPS:
            self.i += 1
            return A.Cmp(t.text, left, self.operand(), pos=start.pos)
        raise IRSyntaxError(f"expected comparison operator or 'in', found {self._describe(t)}", t.pos)

    def operand(self) -> A.Operand:
        t = self.tok
        if t.kind == "ident":
            self.i += 1
            if self.accept("."):
                attr = self.ident()
                return A.AttrRef(t.text, attr.text, pos=t.pos)
            return A.Ident(t.text, pos=t.pos)
        if t.kind in ("int", "string"):
            return self.value()
        raise IRSyntaxError(f"expected operand, found {self._describe(t)}", t.pos)


def parse_syntax(text: str) -> A.Program:
    """Parse without validation; operand identifiers stay unresolved."""
    return Parser(text).program()
