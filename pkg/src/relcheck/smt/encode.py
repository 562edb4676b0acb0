"""SMT-LIB2 rendering of T_RA validity queries.

Relations are lists of tuples, tuples are lists of values, values are a sum
of integers and strings::

    Val ::= VInt Int | VStr String
    Tup ::= tnil | tcons Val Tup
    Rel ::= rnil | rcons Tup Rel

Every operator occurrence becomes a function symbol; relation-level symbols
are uninterpreted and pinned down by the quantified axioms, tuple-level
helpers (field access, projection, concatenation, field update) and
predicates are ``define-fun`` macros.  Goals without relation or tuple
constants instead get ``define-fun-rec`` definitions and no quantifiers,
which lets the solver answer sat on them.  Validity is checked by refutation:
the script asserts the axioms and the negated goal, and ``unsat`` means the
goal is valid.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional

from ..tra import terms as T
from ..tra.axioms import Axiom, AxiomSet, instantiate_axioms, redundant_axioms
from ..tra.simplify import eliminate_definitions, simplify
from ..tra.subst import substitute_many

NATIVE, INTERNED = "native", "interned"

_SORT = {T.REL: "Rel", T.TUP: "Tup", T.VAL: "Val"}
_ORDER = {"<": "<", "<=": "<=", ">": ">", ">=": ">="}


def sym(name: str) -> str:
    return f"|{name}|"


def smt_string(s: str) -> str:
    out = []
    for ch in s:
        o = ord(ch)
        if ch == '"':
            out.append('""')
        elif 0x20 <= o <= 0x7E and ch != "\\":
            out.append(ch)
        else:
            out.append("\\u{%x}" % o)
    return '"' + "".join(out) + '"'


@dataclass
class EncodeOptions:
    strings: str = NATIVE
    mbqi: Optional[bool] = None
    value_types: Mapping[str, str] = field(default_factory=dict)
    timeout_ms: Optional[int] = None
    comment: Optional[str] = None
    simplify: bool = True


# ------------------------------------------------------------ skolemisation

def negated_assertions(F: T.Formula) -> tuple[list[T.Formula], list[T.Var]]:
    """Assertions equivalent to ¬F, with top-level witnesses as constants."""
    skolems: list[T.Var] = []
    used: set[str] = {n for n, _ in T.free_vars(F)}

    def fresh(vs):
        sub = {}
        for v in vs:
            name = v.name
            k = 0
            while name in used:
                k += 1
                name = f"{v.name}!{k}"
            used.add(name)
            nv = T.Var(name, v.sort)
            skolems.append(nv)
            if name != v.name:
                sub[(v.name, v.sort)] = nv.term()
        return sub

    def pos(f):
        if isinstance(f, T.FAnd):
            return [g for a in f.args for g in pos(a)]
        if isinstance(f, T.Exists):
            return pos(substitute_many(f.body, fresh(f.vars)))
        if isinstance(f, T.FNot):
            return neg(f.arg)
        if isinstance(f, T.FTrue):
            return []
        return [f]

    def neg(f):
        if isinstance(f, T.Implies):
            return pos(f.left) + neg(f.right)
        if isinstance(f, T.FNot):
            return pos(f.arg)
        if isinstance(f, T.Forall):
            return neg(substitute_many(f.body, fresh(f.vars)))
        if isinstance(f, T.FOr):
            return [g for a in f.args for g in neg(a)]
        if isinstance(f, T.FFalse):
            return []
        return [T.FNot(f)]

    return neg(F), skolems


def one_point(ax: Axiom) -> tuple[tuple[T.Var, ...], T.Formula, tuple]:
    """Drop guards ``x = term`` on universally bound relation variables."""
    f = ax.formula
    if not isinstance(f, T.Forall):
        return (), f, ()
    vs = list(f.vars)
    body = f.body
    triggers = ax.triggers
    while isinstance(body, T.Implies):
        guards = T.conjuncts(body.left)
        pick = None
        for gi, gd in enumerate(guards):
            if (isinstance(gd, T.Eq) and isinstance(gd.left, T.RVar)
                    and T.Var(gd.left.name, T.REL) in vs
                    and (gd.left.name, T.REL) not in T.free_vars(gd.right)):
                pick = gi
                break
        if pick is None:
            break
        gd = guards[pick]
        sub = {(gd.left.name, T.REL): gd.right}
        vs.remove(T.Var(gd.left.name, T.REL))
        rest = guards[:pick] + guards[pick + 1:]
        body = substitute_many(body.right if not rest else T.Implies(T.conj(*rest), body.right), sub)
        triggers = tuple(tuple(substitute_many(p, sub) for p in pat) for pat in triggers)
    return tuple(vs), body, triggers


# ------------------------------------------------------------ encoder

class Encoder:
    def __init__(self, opts: EncodeOptions):
        self.opts = opts
        self.preds: dict[T.Pred, str] = {}
        self.values: dict[T.ValTerm, int] = {}
        self.strings: dict[str, str] = {}
        self.gets: set[int] = set()
        self.projts: dict[tuple[int, ...], str] = {}
        self.cats: set[int] = set()
        self.updts: dict[tuple[int, T.ValTerm], str] = {}
        self.relfuns: dict[str, str] = {}  # name -> declaration
        self.kinds: dict[str, tuple] = {}

    # -- naming -------------------------------------------------------------
    def _val_id(self, v: T.ValTerm) -> int:
        return self.values.setdefault(v, len(self.values))

    def _pred_name(self, p: T.Pred) -> str:
        if p not in self.preds:
            self.preds[p] = f"pred!{len(self.preds)}"
        return self.preds[p]

    def _fun(self, name: str, decl: str, kind: tuple) -> str:
        self.relfuns.setdefault(name, decl)
        self.kinds.setdefault(name, kind)
        return sym(name)

    # -- terms --------------------------------------------------------------
    def val(self, t: T.ValTerm) -> str:
        if isinstance(t, T.Const):
            if isinstance(t.value, str):
                if self.opts.strings == INTERNED:
                    name = self.strings.setdefault(t.value, f"str!{len(self.strings)}")
                    return f"(VStr {sym(name)})"
                return f"(VStr {smt_string(t.value)})"
            n = t.value
            return f"(VInt {n})" if n >= 0 else f"(VInt (- {-n}))"
        if isinstance(t, T.VVar):
            return sym(t.name)
        if isinstance(t, T.Get):
            self.gets.add(t.index)
            return f"({sym('get!%d' % t.index)} {self.tup(t.tup)})"
        raise TypeError(t)

    def tup(self, t: T.TupTerm) -> str:
        if isinstance(t, T.TVar):
            return sym(t.name)
        if isinstance(t, T.TLit):
            out = "tnil"
            for v in reversed(t.vals):
                out = f"(tcons {self.val(v)} {out})"
            return out
        if isinstance(t, T.ProjT):
            name = self.projts.setdefault(t.indices, "projt!" + "!".join(map(str, t.indices)))
            self.gets.update(t.indices)
            return f"({sym(name)} {self.tup(t.tup)})"
        if isinstance(t, T.Cat):
            self.cats.add(t.n)
            self.gets.update(range(1, t.n + 1))
            return f"({sym('cat!%d' % t.n)} {self.tup(t.left)} {self.tup(t.right)})"
        if isinstance(t, T.UpdT):
            key = (t.index, t.value)
            name = self.updts.setdefault(key, f"updt!{t.index}!{self._val_id(t.value)}")
            self.gets.update(range(1, t.index))
            self.val(t.value)
            return f"({sym(name)} {self.tup(t.tup)})"
        raise TypeError(t)

    def rel(self, t: T.RelTerm) -> str:
        if isinstance(t, T.RVar):
            return sym(t.name)
        if isinstance(t, T.Table):
            out = "rnil"
            for row in reversed(t.rows):
                out = f"(rcons {self.tup(T.TLit(row))} {out})"
            return out
        if isinstance(t, T.Cons):
            return f"(rcons {self.tup(t.head)} {self.rel(t.tail)})"
        if isinstance(t, T.Proj):
            name = "proj!" + "!".join(map(str, t.indices))
            f = self._fun(name, "(Rel) Rel", ("proj", t.indices))
            return f"({f} {self.rel(t.arg)})"
        if isinstance(t, T.Sel):
            pname = self._pred_name(t.pred)
            f = self._fun("sel!" + pname.split("!")[1], "(Rel) Rel", ("sel", pname))
            return f"({f} {self.rel(t.arg)})"
        if isinstance(t, T.Prod):
            f = self._fun(f"prod!{t.n}", "(Rel Rel) Rel", ("prod", t.n))
            self._fun(f"prodrow!{t.n}", "(Tup Rel) Rel", ("prodrow", t.n))
            self._fun("app", "(Rel Rel) Rel", ("app",))
            self.cats.add(t.n)
            self.gets.update(range(1, t.n + 1))
            return f"({f} {self.rel(t.left)} {self.rel(t.right)})"
        if isinstance(t, T.ProdRow):
            f = self._fun(f"prodrow!{t.n}", "(Tup Rel) Rel", ("prodrow", t.n))
            self.cats.add(t.n)
            self.gets.update(range(1, t.n + 1))
            return f"({f} {self.tup(t.head)} {self.rel(t.arg)})"
        if isinstance(t, T.Union_):
            f = self._fun("app", "(Rel Rel) Rel", ("app",))
            return f"({f} {self.rel(t.left)} {self.rel(t.right)})"
        if isinstance(t, T.Diff):
            f = self._fun("diff", "(Rel Rel) Rel", ("diff",))
            self._fun("delfirst", "(Tup Rel) Rel", ("delfirst",))
            return f"({f} {self.rel(t.left)} {self.rel(t.right)})"
        if isinstance(t, T.DelFirst):
            f = self._fun("delfirst", "(Tup Rel) Rel", ("delfirst",))
            return f"({f} {self.tup(t.head)} {self.rel(t.arg)})"
        if isinstance(t, T.UpdAttr):
            key = (t.index, t.value)
            uname = self.updts.setdefault(key, f"updt!{t.index}!{self._val_id(t.value)}")
            self.gets.update(range(1, t.index))
            f = self._fun(f"upd!{t.index}!{self._val_id(t.value)}", "(Rel) Rel", ("upd", uname))
            self.val(t.value)
            return f"({f} {self.rel(t.arg)})"
        raise TypeError(t)

    def term(self, t) -> str:
        if isinstance(t, (T.Const, T.VVar, T.Get)):
            return self.val(t)
        if isinstance(t, (T.TVar, T.TLit, T.ProjT, T.Cat, T.UpdT)):
            return self.tup(t)
        if isinstance(t, (T.Mem, T.Holds)):
            return self.formula(t)
        return self.rel(t)

    # -- predicates -----------------------------------------------------------
    def pred_body(self, p: T.Pred, h: str) -> str:
        if isinstance(p, T.PTrue):
            return "true"
        if isinstance(p, T.PCmp):
            def opnd(o):
                if isinstance(o, T.PAttr):
                    self.gets.add(o.index)
                    return f"({sym('get!%d' % o.index)} {h})"
                return self.val(o)
            l, r = opnd(p.left), opnd(p.right)
            if p.op == "==":
                return f"(= {l} {r})"
            if p.op == "!=":
                return f"(not (= {l} {r}))"
            return f"({_ORDER[p.op]} (ival {l}) (ival {r}))"
        if isinstance(p, T.PIn):
            self.gets.add(p.index)
            f = self._fun("mem", "(Val Rel) Bool", ("mem",))
            self.gets.add(1)
            return f"({f} ({sym('get!%d' % p.index)} {h}) {self.rel(p.rel)})"
        if isinstance(p, T.PAnd):
            return f"(and {self.pred_body(p.left, h)} {self.pred_body(p.right, h)})"
        if isinstance(p, T.POr):
            return f"(or {self.pred_body(p.left, h)} {self.pred_body(p.right, h)})"
        if isinstance(p, T.PNot):
            return f"(not {self.pred_body(p.arg, h)})"
        raise TypeError(p)

    # -- formulas -------------------------------------------------------------
    def formula(self, f) -> str:
        if isinstance(f, T.FTrue):
            return "true"
        if isinstance(f, T.FFalse):
            return "false"
        if isinstance(f, T.Eq):
            return f"(= {self.term(f.left)} {self.term(f.right)})"
        if isinstance(f, T.FAnd):
            return "(and " + " ".join(self.formula(a) for a in f.args) + ")" if f.args else "true"
        if isinstance(f, T.FOr):
            return "(or " + " ".join(self.formula(a) for a in f.args) + ")" if f.args else "false"
        if isinstance(f, T.FNot):
            return f"(not {self.formula(f.arg)})"
        if isinstance(f, T.Implies):
            return f"(=> {self.formula(f.left)} {self.formula(f.right)})"
        if isinstance(f, T.Iff):
            return f"(= {self.formula(f.left)} {self.formula(f.right)})"
        if isinstance(f, (T.Exists, T.Forall)):
            q = "exists" if isinstance(f, T.Exists) else "forall"
            return f"({q} ({self._binders(f.vars)}) {self.formula(f.body)})"
        if isinstance(f, T.Holds):
            name = self._pred_name(f.pred)
            return f"({sym(name)} {self.tup(f.tup)})"
        if isinstance(f, T.Mem):
            fn = self._fun("mem", "(Val Rel) Bool", ("mem",))
            self.gets.add(1)
            return f"({fn} {self.val(f.value)} {self.rel(f.rel)})"
        raise TypeError(f)

    def _binders(self, vs) -> str:
        return " ".join(f"({sym(v.name)} {_SORT[v.sort]})" for v in vs)

    def axiom(self, ax: Axiom) -> str:
        vs, body, triggers = one_point(ax)
        text = self.formula(body)
        if not vs:
            return f"(assert {text})"
        pats = "".join(" :pattern (" + " ".join(self.term(p) for p in pat) + ")" for pat in triggers)
        return f"(assert (forall ({self._binders(vs)}) (! {text}{pats} :qid |{ax.label}|)))"

    # -- helper definitions ---------------------------------------------------
    def _nth_tail(self, h: str, k: int) -> str:
        for _ in range(k):
            h = f"(ttl {h})"
        return h

    def definitions(self) -> list[str]:
        lines = []
        for i in sorted(self.gets):
            lines.append(f"(define-fun {sym('get!%d' % i)} ((h Tup)) Val (thd {self._nth_tail('h', i - 1)}))")
        for idx, name in self.projts.items():
            body = "tnil"
            for i in reversed(idx):
                body = f"(tcons ({sym('get!%d' % i)} h) {body})"
            lines.append(f"(define-fun {sym(name)} ((h Tup)) Tup {body})")
        for n in sorted(self.cats):
            body = "g"
            for i in range(n, 0, -1):
                body = f"(tcons ({sym('get!%d' % i)} h) {body})"
            lines.append(f"(define-fun {sym('cat!%d' % n)} ((h Tup) (g Tup)) Tup {body})")
        for (i, v), name in self.updts.items():
            body = f"(tcons {self.val(v)} {self._nth_tail('h', i)})"
            for j in range(i - 1, 0, -1):
                body = f"(tcons ({sym('get!%d' % j)} h) {body})"
            lines.append(f"(define-fun {sym(name)} ((h Tup)) Tup {body})")
        return lines


    # -- recursive definitions for ground goals ------------------------------
    _REC_ORDER = ("mem", "delfirst", "diff", "app", "prodrow", "prod", "proj", "sel", "upd")

    def _rec_body(self, name: str) -> str:
        kind = self.kinds[name]
        f = sym(name)
        k = kind[0]
        if k == "mem":
            return (f"(define-fun-rec {f} ((v Val) (x Rel)) Bool (ite ((_ is rnil) x) false "
                    f"(or (= ({sym('get!1')} (rhd x)) v) ({f} v (rtl x)))))")
        if k == "delfirst":
            return (f"(define-fun-rec {f} ((h Tup) (x Rel)) Rel (ite ((_ is rnil) x) rnil "
                    f"(ite (= (rhd x) h) (rtl x) (rcons (rhd x) ({f} h (rtl x))))))")
        if k == "diff":
            return (f"(define-fun-rec {f} ((x Rel) (y Rel)) Rel (ite ((_ is rnil) y) x "
                    f"({f} ({sym('delfirst')} (rhd y) x) (rtl y))))")
        if k == "app":
            return (f"(define-fun-rec {f} ((x Rel) (y Rel)) Rel (ite ((_ is rnil) x) y "
                    f"(rcons (rhd x) ({f} (rtl x) y))))")
        if k == "prodrow":
            return (f"(define-fun-rec {f} ((h Tup) (y Rel)) Rel (ite ((_ is rnil) y) rnil "
                    f"(rcons ({sym('cat!%d' % kind[1])} h (rhd y)) ({f} h (rtl y)))))")
        if k == "prod":
            return (f"(define-fun-rec {f} ((x Rel) (y Rel)) Rel (ite ((_ is rnil) x) rnil "
                    f"({sym('app')} ({sym('prodrow!%d' % kind[1])} (rhd x) y) ({f} (rtl x) y))))")
        if k == "proj":
            pt = self.projts.setdefault(kind[1], "projt!" + "!".join(map(str, kind[1])))
            self.gets.update(kind[1])
            return (f"(define-fun-rec {f} ((x Rel)) Rel (ite ((_ is rnil) x) rnil "
                    f"(rcons ({sym(pt)} (rhd x)) ({f} (rtl x)))))")
        if k == "sel":
            return (f"(define-fun-rec {f} ((x Rel)) Rel (ite ((_ is rnil) x) rnil "
                    f"(ite ({sym(kind[1])} (rhd x)) (rcons (rhd x) ({f} (rtl x))) ({f} (rtl x)))))")
        if k == "upd":
            return (f"(define-fun-rec {f} ((x Rel)) Rel (ite ((_ is rnil) x) rnil "
                    f"(rcons ({sym(kind[1])} (rhd x)) ({f} (rtl x)))))")
        raise ValueError(kind)

    def recursive_definitions(self) -> tuple[list[str], list[str]]:
        """(membership, everything else): predicates sit between the two."""
        names = sorted(self.kinds, key=lambda n: (self._REC_ORDER.index(self.kinds[n][0]), n))
        lines = [self._rec_body(n) for n in names]
        split = sum(1 for n in names if self.kinds[n][0] == "mem")
        return lines[:split], lines[split:]


def _ground(goal: list) -> bool:
    """No free relation or tuple constants: every operator meets concrete lists
    (up to unknown values), so recursive definitions evaluate it outright."""
    return all(sort == T.VAL for g in goal for _, sort in T.free_vars(g))


def _declare_datatypes(strings: str) -> list[str]:
    sort = "Str" if strings == INTERNED else "String"
    out = ["(declare-sort Str 0)"] if strings == INTERNED else []
    out.append("(declare-datatypes ((Val 0) (Tup 0) (Rel 0)) ("
               f"((VInt (ival Int)) (VStr (sval {sort}))) "
               "((tnil) (tcons (thd Val) (ttl Tup))) "
               "((rnil) (rcons (rhd Tup) (rtl Rel)))))")
    return out


def prepare_goal(F: T.Formula, simplified: bool = True) -> list[T.Formula]:
    """The assertions whose joint satisfiability refutes F."""
    goal, _ = negated_assertions(F)
    if simplified:
        goal = eliminate_definitions([simplify(g) for g in goal])
    return goal


def goal_axioms(F: T.Formula, simplified: bool = True) -> AxiomSet:
    """The axioms :func:`encode` would assert for F in quantified mode."""
    return full_axioms(T.conj(*prepare_goal(F, simplified)))


def encode(F: T.Formula, axioms: Optional[Iterable[Axiom]] = None,
           opts: Optional[EncodeOptions] = None) -> str:
    """Script asserting ``axioms`` and ¬F; ``unsat`` means F is valid.

    With ``axioms`` omitted, schema and redundant axioms for F are generated.
    """
    opts = opts or EncodeOptions()
    goal = prepare_goal(F, opts.simplify)
    # A ground goal gets exact recursive definitions instead of quantified
    # axioms; the solver can then report sat as well as unsat.
    rec = axioms is None and _ground(goal)
    if axioms is None:
        axioms = [] if rec else full_axioms(T.conj(*goal))
    axioms = list(axioms)
    enc = Encoder(opts)

    ax_lines = [enc.axiom(a) for a in axioms]
    goal_lines = [f"(assert {enc.formula(g)})" for g in goal]
    # Predicate bodies may introduce further symbols; render them before
    # emitting declarations.
    pred_lines = []
    done: set[str] = set()
    while len(done) < len(enc.preds):
        for p, name in list(enc.preds.items()):
            if name in done:
                continue
            done.add(name)
            pred_lines.append(f"(define-fun {sym(name)} ((h Tup)) Bool {enc.pred_body(p, 'h')})")

    consts: dict[str, str] = {}
    used = {k for g in goal for k in T.free_vars(g)} | _axiom_free(axioms)
    for n, sort in sorted(used, key=lambda k: (k[1], k[0])):
        consts.setdefault(n, _SORT[sort])

    lines: list[str] = []
    if opts.comment:
        lines.extend("; " + ln for ln in opts.comment.splitlines())
    if opts.timeout_ms:
        lines.append(f"(set-option :timeout {opts.timeout_ms})")
    if opts.mbqi is not None:
        lines.append(f"(set-option :smt.mbqi {'true' if opts.mbqi else 'false'})")
    lines.extend(_declare_datatypes(opts.strings))
    for name in enc.strings.values():
        lines.append(f"(declare-const {sym(name)} Str)")
    if len(enc.strings) > 1:
        lines.append("(assert (distinct " + " ".join(sym(n) for n in enc.strings.values()) + "))")
    for name, sort in consts.items():
        lines.append(f"(declare-const {sym(name)} {sort})")
    for name, sort in consts.items():
        ty = opts.value_types.get(name)
        if sort == "Val" and ty is not None:
            lines.append(f"(assert (({'_ is VInt' if ty == 'Int' else '_ is VStr'}) {sym(name)}))")
    if rec:
        mem_lines, rec_lines = enc.recursive_definitions()
        lines.extend(enc.definitions())
        lines.extend(mem_lines)
        lines.extend(pred_lines)
        lines.extend(rec_lines)
    else:
        for name, decl in enc.relfuns.items():
            lines.append(f"(declare-fun {sym(name)} {decl})")
        lines.extend(enc.definitions())
        lines.extend(pred_lines)
    lines.extend(ax_lines)
    lines.extend(goal_lines)
    lines.append("(check-sat)")
    lines.append("(get-info :reason-unknown)")
    return "\n".join(lines) + "\n"


def _axiom_free(axioms) -> set:
    out: set = set()
    for a in axioms:
        out |= T.free_vars(a.formula)
    return out


def full_axioms(F: T.Formula) -> AxiomSet:
    """Schema axioms for F and its lemmas, plus the lemmas themselves."""
    red = redundant_axioms(F)
    carrier = T.conj(F, *red.formulas())
    out = instantiate_axioms(carrier)
    for a in red:
        out.add(a)
    return out
