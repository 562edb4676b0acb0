"""Random generators shared by the property suites and the acceptance tests."""

from __future__ import annotations

import random
from typing import Optional

from relcheck import interp, ir
from relcheck.interp import Evaluator, Instance, ModelError
from relcheck.tra import terms as T

INTS = (0, 1, 2)
STRS = ("", "a")

SCHEMA = """schema {
  R(a:Int, b:Int, c:String);
  S(d:Int, e:String);
}
"""
PARAMS = (("p", "Int"), ("q", "Int"), ("s", "String"))
COLS = {"R": (("a", "Int"), ("b", "Int"), ("c", "String")), "S": (("d", "Int"), ("e", "String"))}


def _lit(rng: random.Random, type_: str) -> str:
    if type_ == "Int":
        return rng.choice(("p", "q") + tuple(str(i) for i in INTS))
    return rng.choice(("s", '""', '"a"'))


def pred_text(rng: random.Random, rel: str, depth: int = 0) -> str:
    cols = COLS[rel]
    k = rng.random()
    if depth < 2 and k < 0.2:
        op = rng.choice(("&&", "||"))
        return f"({pred_text(rng, rel, depth + 1)} {op} {pred_text(rng, rel, depth + 1)})"
    if depth < 2 and k < 0.28:
        return f"!({pred_text(rng, rel, depth + 1)})"
    if k < 0.36 and rel == "R":
        inner = pred_text(rng, "S", 2)
        return f"a in proj[d](sel({inner}, S))"
    if k < 0.4:
        return "true"
    name, type_ = rng.choice(cols)
    ints = [c for c, t in cols if t == "Int"]
    if type_ == "Int" and len(ints) > 1 and rng.random() < 0.25:
        other = rng.choice([c for c in ints if c != name])
        return f"{name} {rng.choice(('==', '<', '!='))} {other}"
    ops = ("==", "!=", "<", ">=") if type_ == "Int" else ("==", "!=")
    return f"{name} {rng.choice(ops)} {_lit(rng, type_)}"


def stmt_text(rng: random.Random) -> str:
    rel = rng.choice(("R", "S"))
    kind = rng.choice(("ins", "del", "upd"))
    if kind == "ins":
        fields = ", ".join(f"{c}: {_lit(rng, t)}" for c, t in COLS[rel])
        return f"ins({rel}, {{{fields}}});"
    if kind == "del":
        return f"del({rel}, {pred_text(rng, rel)});"
    c, t = rng.choice(COLS[rel])
    return f"upd({rel}, {pred_text(rng, rel)}, {c}, {_lit(rng, t)});"


def update_program(rng: random.Random, n_stmts: int) -> ir.Program:
    params = ", ".join(f"{n}:{t}" for n, t in PARAMS)
    body = "\n  ".join(stmt_text(rng) for _ in range(n_stmts))
    text = f"{SCHEMA}\nupdate u({params}) {{\n  {body}\n}}\n\nquery all() {{ R }}\n"
    return ir.parse_program(text)


def row(rng: random.Random, cols) -> tuple:
    return tuple(rng.choice(INTS) if t == "Int" else rng.choice(STRS) for _, t in cols)


def instance(rng: random.Random, schema, max_rows: int = 3) -> Instance:
    return Instance.of(schema, {r: [row(rng, COLS[r]) for _ in range(rng.randint(0, max_rows))]
                                for r in COLS})


def valuation(rng: random.Random) -> dict:
    return {n: (rng.choice(INTS) if t == "Int" else rng.choice(STRS)) for n, t in PARAMS}


def describing_formula(rng: random.Random, inst: Instance, sigma: dict) -> T.Formula:
    """A conjunction of atoms that the state satisfies by construction."""
    env = interp.ground_env(inst, None, sigma)
    ev = Evaluator(env)
    atoms = []
    for _ in range(rng.randint(1, 3)):
        rel = rng.choice(("R", "S"))
        w = len(COLS[rel])
        L = tuple(sorted(rng.sample(range(1, w + 1), rng.randint(1, w))))
        t: T.RelTerm = T.RVar(rel)
        if rng.random() < 0.4:
            t = T.Sel(T.PCmp("==", T.PAttr(1), T.VVar("p")), t)
        t = T.Proj(L, t)
        atoms.append(T.Eq(t, T.table(ev.rel(t))))
    if rng.random() < 0.3:
        atoms.append(T.Eq(T.RVar("R"), T.RVar("R")))
    return T.conj(*atoms)


# ------------------------------------------------------------ ground terms

def ground_table(rng: random.Random, width: int, max_rows: int = 4) -> T.Table:
    return T.table([tuple(rng.choice(INTS) for _ in range(width)) for _ in range(rng.randint(0, max_rows))])


def ground_term(rng: random.Random, width: int, depth: int = 0) -> T.RelTerm:
    """Random ground relation term of the given output width (at most 3 columns per table)."""
    k = rng.random()
    if depth >= 2 or k < 0.25:
        return ground_table(rng, width)
    if k < 0.4:
        return T.Union_(ground_term(rng, width, depth + 1), ground_term(rng, width, depth + 1))
    if k < 0.5:
        return T.Diff(ground_term(rng, width, depth + 1), ground_term(rng, width, depth + 1))
    if k < 0.68:
        i = rng.randint(1, width)
        op = rng.choice(("==", "<", "!="))
        return T.Sel(T.PCmp(op, T.PAttr(i), T.Const(rng.choice(INTS))), ground_term(rng, width, depth + 1))
    if k < 0.8:
        inner = rng.randint(width, 3) if width <= 3 else width
        L = tuple(rng.choice(range(1, inner + 1)) for _ in range(width))
        return T.Proj(L, ground_term(rng, inner, depth + 1))
    if k < 0.9:
        return T.UpdAttr(rng.randint(1, width), T.Const(rng.choice(INTS)), ground_term(rng, width, depth + 1))
    if width >= 2:
        n = rng.randint(1, width - 1)
        return T.Prod(ground_term(rng, n, depth + 1), ground_term(rng, width - n, depth + 1), n)
    return ground_table(rng, width)


def perturb(rng: random.Random, t: T.Table, width: int) -> T.Table:
    rows = [list(r) for r in t.rows]
    k = rng.random()
    if rows and k < 0.4:
        i = rng.randrange(len(rows))
        j = rng.randrange(width)
        rows[i][j] = T.Const((rows[i][j].value + 1) % 3)
    elif len(rows) > 1 and k < 0.7:
        rows.reverse()
        if rows == [list(r) for r in t.rows]:
            rows.append([T.Const(0)] * width)
    elif rows and k < 0.85:
        rows.pop()
    else:
        rows.append([T.Const(rng.choice(INTS)) for _ in range(width)])
    return T.Table(tuple(tuple(r) for r in rows))


def ground_equality(rng: random.Random) -> T.Eq:
    width = rng.randint(1, 3)
    t = ground_term(rng, width)
    value = T.table(Evaluator({}).rel(t))
    k = rng.random()
    if k < 0.45:
        return T.Eq(t, value)
    if k < 0.8:
        return T.Eq(t, perturb(rng, value, width))
    return T.Eq(t, ground_term(rng, width))


# ------------------------------------------------------------ axiom sampling

def _widths(body) -> tuple[dict[str, int], dict[str, int]]:
    """Column counts the body forces on relation and tuple variables."""
    rel: dict[str, int] = {}
    tup: dict[str, int] = {}

    def need_rel(t, k):
        if isinstance(t, T.RVar):
            rel[t.name] = max(rel.get(t.name, 1), k)
        elif isinstance(t, (T.Sel, T.UpdAttr, T.DelFirst)):
            need_rel(t.arg, k)
        elif isinstance(t, (T.Union_, T.Diff)):
            need_rel(t.left, k)
            need_rel(t.right, k)
        elif isinstance(t, T.Cons):
            need_rel(t.tail, k)
            need_tup(t.head, k)

    def need_tup(t, k):
        if isinstance(t, T.TVar):
            tup[t.name] = max(tup.get(t.name, 1), k)
        elif isinstance(t, T.UpdT):
            need_tup(t.tup, k)

    for n in T.walk(body):
        if isinstance(n, T.Proj):
            need_rel(n.arg, max(n.indices))
        elif isinstance(n, T.Sel):
            need_rel(n.arg, max(T.pred_indices(n.pred), default=1))
        elif isinstance(n, T.UpdAttr):
            need_rel(n.arg, n.index)
        elif isinstance(n, T.Prod):
            need_rel(n.left, n.n)
        elif isinstance(n, T.ProdRow):
            need_tup(n.head, n.n)
        elif isinstance(n, T.Cat):
            need_tup(n.left, n.n)
        elif isinstance(n, T.ProjT):
            need_tup(n.tup, max(n.indices))
        elif isinstance(n, T.Get):
            need_tup(n.tup, n.index)
        elif isinstance(n, T.UpdT):
            need_tup(n.tup, n.index)
    return rel, tup


def _guards(f) -> list[T.Eq]:
    if isinstance(f, T.Implies):
        return [g for g in T.conjuncts(f.left) if isinstance(g, T.Eq)]
    return []


def sample_axiom_env(rng: random.Random, ax_formula: T.Formula, free_sorts: dict):
    """(env, witnesses) for one randomized instance of a guarded universal axiom."""
    body = ax_formula.body if isinstance(ax_formula, T.Forall) else ax_formula
    bound = ax_formula.vars if isinstance(ax_formula, T.Forall) else ()
    rel_w, tup_w = _widths(body)

    def rel_val(name):
        w = rel_w.get(name, 2)
        return tuple(tuple(rng.choice(INTS) for _ in range(w)) for _ in range(rng.randint(0, 3)))

    env: dict = {}
    for (name, sort) in free_sorts:
        if sort == T.REL:
            env[(name, sort)] = rel_val(name)
        elif sort == T.VAL:
            env[(name, sort)] = rng.choice(INTS)
    wit: dict = {}
    for v in bound:
        if v.sort == T.REL:
            wit[(v.name, v.sort)] = rel_val(v.name)
        elif v.sort == T.TUP:
            wit[(v.name, v.sort)] = tuple(rng.choice(INTS) for _ in range(tup_w.get(v.name, 2)))
        else:
            wit[(v.name, v.sort)] = rng.choice(INTS)
    # Make the guard true most of the time so samples are not vacuous.
    for g in _guards(body):
        lhs, rhs = g.left, g.right
        if isinstance(lhs, T.RVar) and (lhs.name, T.REL) in wit:
            key = (lhs.name, T.REL)
            if rhs == T.NIL and rng.random() < 0.5:
                wit[key] = ()
            elif isinstance(rhs, T.Cons) and isinstance(rhs.head, T.TVar) and isinstance(rhs.tail, T.RVar):
                if not wit[key]:
                    w = rel_w.get(lhs.name, tup_w.get(rhs.head.name, 2))
                    wit[key] = (tuple(rng.choice(INTS) for _ in range(w)),)
                wit[(rhs.head.name, T.TUP)] = wit[key][0]
                wit[(rhs.tail.name, T.REL)] = wit[key][1:]
        if (isinstance(lhs, T.Proj) and isinstance(rhs, T.Proj) and isinstance(lhs.arg, T.RVar)
                and isinstance(rhs.arg, T.RVar) and rng.random() < 0.7):
            # Rebuild the right relation so that the projections agree.
            a, b = (lhs.arg.name, T.REL), (rhs.arg.name, T.REL)
            src = wit.get(a, env.get(a))
            wb = rel_w.get(rhs.arg.name, 2)
            rows = []
            for r in src:
                new = [rng.choice(INTS) for _ in range(wb)]
                for i, j in zip(lhs.indices, rhs.indices):
                    new[j - 1] = r[i - 1]
                rows.append(tuple(new))
            if b in wit:
                wit[b] = tuple(rows)
            elif b in env:
                env[b] = tuple(rows)
    return env, wit


def check_axiom(ax_formula: T.Formula, samples: int, rng: random.Random,
                max_attempts: Optional[int] = None) -> tuple[int, int]:
    """(evaluated samples, violations) for one axiom."""
    free = {k: None for k in T.free_vars(ax_formula)}
    done = bad = 0
    attempts = 0
    max_attempts = max_attempts or samples * 20
    while done < samples and attempts < max_attempts:
        attempts += 1
        env, wit = sample_axiom_env(rng, ax_formula, free)
        try:
            ok = interp.evaluate(ax_formula, env, wit)
        except (ModelError, IndexError):
            continue
        done += 1
        bad += not ok
    return done, bad


# ------------------------------------------------------------ conjunctive pairs

_OLD_CQ = """schema {
  R(a:Int, b:Int, c:String);
  S(d:Int, e:String);
}
update addR(p:Int, q:Int, s:String) { ins(R, {a: p, b: q, c: s}); }
update addS(p:Int, s:String) { ins(S, {d: p, e: s}); }
"""
# Same data with permuted columns and primed names.
_NEW_CQ = """schema {
  R'(c':String, a':Int, b':Int);
  S'(e':String, d':Int);
}
update addR(p:Int, q:Int, s:String) { ins(R', {a': p, b': q, c': s}); }
update addS(p:Int, s:String) { ins(S', {d': p, e': s}); }
"""


def _cq_atoms(rng: random.Random, cols) -> list[tuple[str, str]]:
    """Equalities as (lhs, rhs) text pairs over ``cols``."""
    out = []
    for _ in range(rng.randint(1, 3)):
        name, type_ = rng.choice(cols)
        same = [c for c, t in cols if t == type_ and c != name]
        if same and rng.random() < 0.3:
            out.append((name, rng.choice(same)))
        elif type_ == "Int":
            out.append((name, rng.choice(("p", "q", "0", "1"))))
        else:
            out.append((name, rng.choice(("s", '"a"'))))
    return out


def _prime(atom: str) -> str:
    return atom + "'" if atom[:1].isalpha() and atom not in ("p", "q", "s") else atom


def conjunctive_pair(rng: random.Random) -> tuple[ir.Program, ir.Program]:
    """Old and new programs with one conjunctive query each, equal up to
    column order, primes, and the order and orientation of equalities."""
    join = rng.random() < 0.4
    cols = list(COLS["R"]) + (list(COLS["S"]) if join else [])
    atoms = _cq_atoms(rng, cols)
    out = rng.sample([c for c, _ in cols], rng.randint(1, min(3, len(cols))))
    src, src2 = ("join(R, S, a == d)", "join(R', S', a' == d')") if join else ("R", "R'")
    old_pred = " && ".join(f"{l} == {r}" for l, r in atoms)
    new_atoms = [(_prime(l), _prime(r)) if rng.random() < 0.5 else (_prime(r), _prime(l)) for l, r in atoms]
    rng.shuffle(new_atoms)
    new_pred = " && ".join(f"{l} == {r}" for l, r in new_atoms)
    params = "p:Int, q:Int, s:String"
    old_q = f"query look({params}) {{ proj[{', '.join(out)}](sel({old_pred}, {src})) }}\n"
    new_q = f"query look({params}) {{ proj[{', '.join(c + chr(39) for c in out)}](sel({new_pred}, {src2})) }}\n"
    return ir.parse_program(_OLD_CQ + old_q), ir.parse_program(_NEW_CQ + new_q)
