"""Reference interpreter for the IR under list semantics, and a concrete
evaluator for T_RA formulas.

Rows seen by queries are tuples of ``((qualifier, attribute), value)`` pairs
and attributes are looked up by name at run time, independently of the
positional indices the validator assigns.  That keeps the interpreter a
genuine second opinion on the translation to T_RA.

Stored relations are positional: ``Instance`` keeps each relation as a tuple
of value tuples in declaration order, which is exactly the ς encoding of the
instance.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Optional, Sequence, Union

from .ir import ast as A
from .tra import terms as T
from .tra.translate import IDENTITY, Side

Value = Union[int, str]
Key = tuple[str, str]
Row = tuple[tuple[Key, Value], ...]
Valuation = Mapping[str, Value]
ResultTable = list[list[Value]]

_CMP = {
    "==": operator.eq, "!=": operator.ne, "<": operator.lt,
    "<=": operator.le, ">": operator.gt, ">=": operator.ge,
}


class TraceError(ValueError):
    """An invocation sequence that does not fit the program."""


@dataclass(frozen=True)
class Instance:
    """Database state: relation name to a tuple of positional rows."""

    schema: A.Schema
    data: Mapping[str, tuple[tuple[Value, ...], ...]]

    @classmethod
    def empty(cls, schema: A.Schema) -> "Instance":
        return cls(schema, {r.name: () for r in schema.relations})

    @classmethod
    def of(cls, schema: A.Schema, data: Mapping[str, Iterable[Sequence[Value]]]) -> "Instance":
        base = {r.name: () for r in schema.relations}
        for name, rows in data.items():
            if schema.get(name) is None:
                raise KeyError(name)
            base[name] = tuple(tuple(r) for r in rows)
        return cls(schema, base)

    def __getitem__(self, name: str) -> tuple[tuple[Value, ...], ...]:
        return self.data[name]

    def items(self):
        return self.data.items()

    def with_rel(self, name: str, rows: Iterable[tuple[Value, ...]]) -> "Instance":
        d = dict(self.data)
        d[name] = tuple(rows)
        return Instance(self.schema, d)

    def tuples(self, name: str) -> list[dict[str, Value]]:
        """Rows of ``name`` as ordered attribute-name maps."""
        names = self.schema[name].attr_names
        return [dict(zip(names, row)) for row in self.data[name]]


@dataclass(frozen=True)
class Invocation:
    txn: str
    args: Mapping[str, Value]


# ----------------------------------------------------------------- queries

def vals(row: Row) -> list[Value]:
    return [v for _, v in row]


def _keyed(inst: Instance, name: str) -> list[Row]:
    names = inst.schema[name].attr_names
    return [tuple(((name, a), v) for a, v in zip(names, row)) for row in inst[name]]


def lookup(row: Row, ref: A.AttrRef) -> Value:
    for (qual, name), v in row:
        if name == ref.name and (ref.rel is None or qual == ref.rel):
            return v
    raise KeyError(f"row has no attribute {ref.text()!r}")


def _operand(o, sigma: Valuation, row: Row) -> Value:
    if isinstance(o, A.AttrRef):
        return lookup(row, o)
    if isinstance(o, (A.IntLit, A.StrLit)):
        return o.value
    if isinstance(o, A.Param):
        return sigma[o.name]
    raise TypeError(o)


def eval_value(v: A.Value, sigma: Valuation) -> Value:
    if isinstance(v, (A.IntLit, A.StrLit)):
        return v.value
    return sigma[v.name]


def eval_pred(p: A.Pred, sigma: Valuation, inst: Instance, x: Row) -> bool:
    if isinstance(p, A.PTrue):
        return True
    if isinstance(p, A.Cmp):
        return _CMP[p.op](_operand(p.left, sigma, x), _operand(p.right, sigma, x))
    if isinstance(p, A.In):
        col = [vals(y)[0] for y in eval_query(p.query, sigma, inst)]
        return lookup(x, p.attr) in col
    if isinstance(p, A.And):
        return eval_pred(p.left, sigma, inst, x) and eval_pred(p.right, sigma, inst, x)
    if isinstance(p, A.Or):
        return eval_pred(p.left, sigma, inst, x) or eval_pred(p.right, sigma, inst, x)
    if isinstance(p, A.Not):
        return not eval_pred(p.arg, sigma, inst, x)
    raise TypeError(p)


def _natural_match(x: Row, y: Row) -> bool:
    for (_, n1), v1 in x:
        for (_, n2), v2 in y:
            if n1 == n2 and v1 != v2:
                return False
    return True


def eval_query(q: A.Query, sigma: Valuation, inst: Instance) -> list[Row]:
    if isinstance(q, A.Rel):
        return _keyed(inst, q.name)
    if isinstance(q, A.Proj):
        out = []
        for row in eval_query(q.query, sigma, inst):
            picked = []
            for ref in q.attrs:
                hit = next(((k, v) for k, v in row
                            if k[1] == ref.name and (ref.rel is None or k[0] == ref.rel)), None)
                if hit is None:
                    raise KeyError(ref.text())
                picked.append(hit)
            out.append(tuple(picked))
        return out
    if isinstance(q, A.Sel):
        return [r for r in eval_query(q.query, sigma, inst) if eval_pred(q.pred, sigma, inst, r)]
    if isinstance(q, (A.Join, A.NJoin)):
        left = eval_query(q.left, sigma, inst)
        right = eval_query(q.right, sigma, inst)
        # foldl over the left operand: left rows form the outer loop
        prod = [x + y for x in left for y in right]
        if isinstance(q, A.NJoin) or q.natural:
            n = len(left[0]) if left else 0
            return [r for r in prod if _natural_match(r[:n], r[n:])]
        return [r for r in prod if eval_pred(q.pred, sigma, inst, r)]
    if isinstance(q, A.Union_):
        left = eval_query(q.left, sigma, inst)
        keys = _keys_of(q.left, inst.schema, left)
        return left + [_rekey(r, keys) for r in eval_query(q.right, sigma, inst)]
    if isinstance(q, A.Minus):
        left = eval_query(q.left, sigma, inst)
        out = list(left)
        for y in eval_query(q.right, sigma, inst):
            target = vals(y)
            for i, x in enumerate(out):
                if vals(x) == target:
                    del out[i]
                    break
        return out
    raise TypeError(q)


def _keys_of(q: A.Query, schema: A.Schema, rows: list[Row]) -> tuple[Key, ...]:
    if rows:
        return tuple(k for k, _ in rows[0])
    from .ir.check import query_scope
    return tuple((c.qual, c.name) for c in query_scope(schema, q))


def _rekey(row: Row, keys: tuple[Key, ...]) -> Row:
    # Union rows take the left operand's column names.
    return tuple((k, v) for k, (_, v) in zip(keys, row))


# ----------------------------------------------------------------- updates

def eval_update(u: Union[A.Stmt, Sequence[A.Stmt], A.UpdateTxn], sigma: Valuation,
                inst: Instance) -> Instance:
    if isinstance(u, A.UpdateTxn):
        u = u.body
    if isinstance(u, (list, tuple)):
        for s in u:
            inst = eval_update(s, sigma, inst)
        return inst
    rel = inst.schema[u.rel]
    if isinstance(u, A.Ins):
        fields = dict(u.fields)
        row = tuple(eval_value(fields[a], sigma) for a in rel.attr_names)
        return inst.with_rel(u.rel, inst[u.rel] + (row,))
    keyed = _keyed(inst, u.rel)
    hits = [eval_pred(u.pred, sigma, inst, r) for r in keyed]
    if isinstance(u, A.Del):
        return inst.with_rel(u.rel, (row for row, h in zip(inst[u.rel], hits) if not h))
    if isinstance(u, A.Upd):
        i = rel.attr_names.index(u.attr.name)
        v = eval_value(u.value, sigma)
        kept = [row for row, h in zip(inst[u.rel], hits) if not h]
        changed = [row[:i] + (v,) + row[i + 1:] for row, h in zip(inst[u.rel], hits) if h]
        return inst.with_rel(u.rel, kept + changed)
    raise TypeError(u)


# ----------------------------------------------------------------- programs

def check_args(txn, args: Mapping[str, Any]) -> dict[str, Value]:
    names = [p.name for p in txn.params]
    missing = [n for n in names if n not in args]
    extra = [n for n in args if n not in names]
    if missing or extra:
        raise TraceError(f"{txn.name}: expected arguments {names}, got {sorted(args)}")
    out = {}
    for p in txn.params:
        v = args[p.name]
        ok = (isinstance(v, int) and not isinstance(v, bool)) if p.type == A.INT else isinstance(v, str)
        if not ok:
            raise TraceError(f"{txn.name}: argument {p.name!r} must be {p.type}, got {v!r}")
        out[p.name] = v
    return out


def check_sequence(p: A.Program, seq: Sequence[Invocation]) -> None:
    if not seq:
        raise TraceError("invocation sequence is empty")
    for k, inv in enumerate(seq):
        last = k == len(seq) - 1
        txn = p.query(inv.txn) if last else p.update(inv.txn)
        if txn is None:
            kind = "query" if last else "update"
            if last and p.update(inv.txn) is not None:
                raise TraceError("the last invocation must be a query transaction")
            raise TraceError(f"step {k + 1}: no {kind} transaction named {inv.txn!r}")
        check_args(txn, inv.args)


def run_updates(p: A.Program, seq: Sequence[Invocation], inst: Optional[Instance] = None) -> Instance:
    inst = inst if inst is not None else Instance.empty(p.schema)
    for inv in seq:
        inst = eval_update(p.update(inv.txn), inv.args, inst)
    return inst


def eval_program(p: A.Program, seq: Sequence[Invocation], inst: Optional[Instance] = None) -> ResultTable:
    """Run all updates of ``seq`` then return the final query's rows as value lists."""
    check_sequence(p, seq)
    inst = run_updates(p, seq[:-1], inst)
    last = seq[-1]
    return [vals(r) for r in eval_query(p.query(last.txn).body, last.args, inst)]


# ----------------------------------------------------------------- T_RA models

class ModelError(ValueError):
    """Formula cannot be evaluated: unbound variable or ill-shaped tuple."""


def _rel(x) -> tuple:
    return tuple(tuple(r) for r in x)


def _get(h, i):
    if not 1 <= i <= len(h):
        raise ModelError(f"attribute a{i} out of range for a tuple of arity {len(h)}")
    return h[i - 1]


def _del_first(h, rel):
    rel = list(rel)
    for k, g in enumerate(rel):
        if g == h:
            del rel[k]
            break
    return tuple(rel)


class Evaluator:
    """Evaluate T_RA nodes over Python values.

    ``env`` binds names to relations (tuples of tuples), tuples and values.
    All three sorts share one namespace keyed by (name, sort).
    """

    def __init__(self, env: Mapping[tuple[str, str], Any]):
        self.env = dict(env)

    def var(self, name, sort):
        try:
            return self.env[(name, sort)]
        except KeyError:
            raise ModelError(f"unbound {sort} variable {name!r}") from None

    def val(self, t):
        if isinstance(t, T.Const):
            return t.value
        if isinstance(t, T.VVar):
            return self.var(t.name, T.VAL)
        if isinstance(t, T.Get):
            return _get(self.tup(t.tup), t.index)
        raise TypeError(t)

    def tup(self, t):
        if isinstance(t, T.TVar):
            return tuple(self.var(t.name, T.TUP))
        if isinstance(t, T.TLit):
            return tuple(self.val(v) for v in t.vals)
        if isinstance(t, T.ProjT):
            h = self.tup(t.tup)
            return tuple(_get(h, i) for i in t.indices)
        if isinstance(t, T.Cat):
            h = self.tup(t.left)
            if len(h) != t.n:
                raise ModelError(f"cat expects a left tuple of arity {t.n}, got {len(h)}")
            return h + self.tup(t.right)
        if isinstance(t, T.UpdT):
            h = self.tup(t.tup)
            _get(h, t.index)
            return h[:t.index - 1] + (self.val(t.value),) + h[t.index:]
        raise TypeError(t)

    def pred(self, p, row) -> bool:
        if isinstance(p, T.PTrue):
            return True
        if isinstance(p, T.PCmp):
            l = _get(row, p.left.index) if isinstance(p.left, T.PAttr) else self.val(p.left)
            r = _get(row, p.right.index) if isinstance(p.right, T.PAttr) else self.val(p.right)
            if p.op not in ("==", "!=") and type(l) is not type(r):
                raise ModelError(f"cannot order {l!r} and {r!r}")
            return _CMP[p.op](l, r)
        if isinstance(p, T.PIn):
            return _get(row, p.index) in [_get(y, 1) for y in self.rel(p.rel)]
        if isinstance(p, T.PAnd):
            return self.pred(p.left, row) and self.pred(p.right, row)
        if isinstance(p, T.POr):
            return self.pred(p.left, row) or self.pred(p.right, row)
        if isinstance(p, T.PNot):
            return not self.pred(p.arg, row)
        raise TypeError(p)

    def rel(self, t) -> tuple:
        if isinstance(t, T.RVar):
            return _rel(self.var(t.name, T.REL))
        if isinstance(t, T.Table):
            return tuple(tuple(self.val(v) for v in row) for row in t.rows)
        if isinstance(t, T.Cons):
            return (self.tup(t.head),) + self.rel(t.tail)
        if isinstance(t, T.Proj):
            return tuple(tuple(_get(h, i) for i in t.indices) for h in self.rel(t.arg))
        if isinstance(t, T.Sel):
            return tuple(h for h in self.rel(t.arg) if self.pred(t.pred, h))
        if isinstance(t, T.Prod):
            left, right = self.rel(t.left), self.rel(t.right)
            for h in left:
                if len(h) != t.n:
                    raise ModelError(f"product expects left rows of arity {t.n}, got {len(h)}")
            return tuple(x + y for x in left for y in right)
        if isinstance(t, T.Union_):
            return self.rel(t.left) + self.rel(t.right)
        if isinstance(t, T.Diff):
            out = self.rel(t.left)
            for y in self.rel(t.right):
                out = _del_first(y, out)
            return out
        if isinstance(t, T.UpdAttr):
            v = self.val(t.value)
            out = []
            for h in self.rel(t.arg):
                _get(h, t.index)
                out.append(h[:t.index - 1] + (v,) + h[t.index:])
            return tuple(out)
        if isinstance(t, T.ProdRow):
            h = self.tup(t.head)
            if len(h) != t.n:
                raise ModelError(f"row product expects arity {t.n}, got {len(h)}")
            return tuple(h + y for y in self.rel(t.arg))
        if isinstance(t, T.DelFirst):
            return _del_first(self.tup(t.head), self.rel(t.arg))
        raise TypeError(t)

    def term(self, t):
        if isinstance(t, (T.Const, T.VVar, T.Get)):
            return self.val(t)
        if isinstance(t, (T.TVar, T.TLit, T.ProjT, T.Cat, T.UpdT)):
            return self.tup(t)
        return self.rel(t)

    def formula(self, f, witnesses: Mapping[tuple[str, str], Any]) -> bool:
        if isinstance(f, T.FTrue):
            return True
        if isinstance(f, T.FFalse):
            return False
        if isinstance(f, T.Eq):
            return self.term(f.left) == self.term(f.right)
        if isinstance(f, T.FAnd):
            return all(self.formula(a, witnesses) for a in f.args)
        if isinstance(f, T.FOr):
            return any(self.formula(a, witnesses) for a in f.args)
        if isinstance(f, T.FNot):
            return not self.formula(f.arg, witnesses)
        if isinstance(f, T.Implies):
            return (not self.formula(f.left, witnesses)) or self.formula(f.right, witnesses)
        if isinstance(f, T.Iff):
            return self.formula(f.left, witnesses) == self.formula(f.right, witnesses)
        if isinstance(f, (T.Exists, T.Forall)):
            saved = dict(self.env)
            try:
                for v in f.vars:
                    key = (v.name, v.sort)
                    if key not in witnesses:
                        raise ModelError(f"no witness for quantified variable {v.name!r}")
                    w = witnesses[key]
                    self.env[key] = _rel(w) if v.sort == T.REL else (tuple(w) if v.sort == T.TUP else w)
                return self.formula(f.body, witnesses)
            finally:
                self.env = saved
        if isinstance(f, T.Holds):
            return self.pred(f.pred, self.tup(f.tup))
        if isinstance(f, T.Mem):
            return self.val(f.value) in [_get(y, 1) for y in self.rel(f.rel)]
        raise TypeError(f)


def _norm_witnesses(w) -> dict[tuple[str, str], Any]:
    out: dict[tuple[str, str], Any] = {}
    for k, v in (w or {}).items():
        if isinstance(k, tuple):
            out[k] = v
        else:
            out[(k, T.REL)] = v
    return out


def evaluate(F, env: Mapping[tuple[str, str], Any], witnesses=None) -> bool:
    """Truth of ``F`` under a (name, sort)-keyed environment.

    Quantified variables take their value from ``witnesses``; plain string
    keys there denote relation variables.  For a universal formula this
    checks one instance, which is how axiom soundness is sampled.
    """
    return Evaluator(env).formula(F, _norm_witnesses(witnesses))


def ground_env(inst: Optional[Instance], inst_new: Optional[Instance], sigma: Optional[Valuation],
               old: Side = IDENTITY, new: Optional[Side] = None) -> dict[tuple[str, str], Any]:
    env: dict[tuple[str, str], Any] = {}
    if inst is not None:
        for r, rows in inst.items():
            env[(old.rel(r), T.REL)] = rows
    if inst_new is not None:
        side = new if new is not None else IDENTITY
        for r, rows in inst_new.items():
            env[(side.rel(r), T.REL)] = rows
    for name, v in (sigma or {}).items():
        env[(name, T.VAL)] = v
    return env


def models(inst: Optional[Instance], inst_new: Optional[Instance], sigma: Optional[Valuation], F,
           witnesses=None, old: Side = IDENTITY, new: Optional[Side] = None) -> bool:
    """(Δ, Δ', σ) ⊨ F under the positional encoding of both instances.

    ``sigma`` maps value-variable names (already side-qualified) to values.
    """
    return evaluate(F, ground_env(inst, inst_new, sigma, old, new), witnesses)
