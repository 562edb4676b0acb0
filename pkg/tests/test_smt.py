import re

import pytest

from conftest import requires_z3
from relcheck import interp, smt
from relcheck.tra import terms as T

X, Y, Z = T.RVar("x"), T.RVar("y"), T.RVar("z")


def ge(i, v):
    return T.PCmp(">=", T.PAttr(i), T.Const(v))


def qids(script: str) -> list[str]:
    return re.findall(r":qid \|([^|]+)\|", script)


def test_selection_script_has_both_schema_instances():
    f = T.Eq(T.Sel(ge(1, 2), X), T.Sel(T.PCmp(">", T.PAttr(2), T.Const(1)), Y))
    s = smt.encode(f)
    assert qids(s).count("sel-cons") == 2
    # The nil cases are eliminated by the one-point rule into ground assertions.
    assert s.count("(assert (= (|sel!0| rnil) rnil))") == 1
    assert s.count("(assert (= (|sel!1| rnil) rnil))") == 1
    assert s.endswith("(check-sat)\n(get-info :reason-unknown)\n")


def test_ground_goals_use_recursive_definitions():
    f = T.Eq(T.Union_(T.table([(1,)]), T.NIL), T.table([(1,)]))
    s = smt.encode(f, opts=smt.EncodeOptions(simplify=False))
    assert "(define-fun-rec |app|" in s
    assert "forall" not in s


def test_union_recursion_in_quantified_mode():
    s = smt.encode(T.Eq(T.Union_(X, T.NIL), X), opts=smt.EncodeOptions(simplify=False))
    assert {"union-cons", "union-right-nil"} <= set(qids(s))


def test_existential_antecedent_becomes_constant():
    w = T.Var("w", T.REL)
    f = T.Implies(T.Exists((w,), T.Eq(X, T.Union_(w.term(), T.table([(1,)])))), T.Eq(X, X))
    s = smt.encode(f, opts=smt.EncodeOptions(simplify=False))
    assert re.search(r"\(declare-const \|w[^|]*\| Rel\)", s)
    assert "exists" not in s


def test_string_escaping():
    assert smt.encode(T.Eq(T.table([("a\"b",)]), X)).count('"a""b"') == 1
    assert "\\u{e9}" in smt.encode(T.Eq(T.table([("é",)]), X))


def test_interned_strings_are_distinct_constants():
    f = T.Eq(T.table([("a",), ("b",)]), X)
    s = smt.encode(f, opts=smt.EncodeOptions(strings=smt.INTERNED))
    assert "(declare-sort Str 0)" in s and "(assert (distinct" in s


@requires_z3
def test_union_with_nil_is_valid():
    assert smt.check_validity(T.Eq(T.Union_(T.table([(1, 2)]), T.NIL), T.table([(1, 2)]))).valid
    assert smt.check_validity(T.Eq(T.Union_(T.table([(1,)]), T.NIL), T.table([(1,)])),
                              smt.SolverConfig(simplify=False)).valid


@requires_z3
def test_append_is_not_commutative():
    f = T.Eq(T.Union_(X, Y), T.Union_(Y, X))
    v = smt.check_validity(f)
    assert v.status == smt.NOT_VALID and v.reason == smt.COUNTERMODEL
    cm = smt.find_countermodel(f)
    assert cm is not None and not interp.evaluate(f, cm.env)


@requires_z3
def test_no_countermodel_means_unknown():
    v = smt.check_validity(T.Eq(T.Union_(X, Y), T.Union_(Y, X)), countermodel=False)
    assert v.status == smt.UNKNOWN and not v.valid


@requires_z3
def test_tiny_budget_times_out():
    f = T.Eq(T.Proj((1,), T.Prod(T.Union_(X, Z), T.Sel(T.PCmp("==", T.PAttr(1), T.Const(1)), Y), 1)),
             T.Union_(Y, X))
    v = smt.check_validity(f, smt.SolverConfig(timeout_ms=1), countermodel=False)
    assert (v.status, v.reason) == (smt.UNKNOWN, smt.TIMEOUT)


@requires_z3
def test_ground_disequality_is_sat():
    f = T.Eq(T.Prod(T.table([(1,), (2,)]), T.table([(0,)]), 1), T.table([(2, 0), (1, 0)]))
    assert smt.check_validity(f, smt.SolverConfig(simplify=False), countermodel=False).status == smt.NOT_VALID


def test_missing_solver_reported():
    cfg = smt.SolverConfig(cmd=("no-such-solver-binary",))
    with pytest.raises(smt.SolverEnvironmentError):
        smt.check_environment(cfg)
    v = smt.check_script("(check-sat)\n", cfg)
    assert v.status == smt.UNKNOWN and v.reason == smt.SOLVER_ERROR


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        smt.SolverConfig(timeout_ms=0)


@requires_z3
def test_cache_round_trip(tmp_path):
    path = tmp_path / "c.json"
    cfg = smt.SolverConfig(cache=smt.VerdictCache(path))
    f = T.Eq(T.Union_(X, T.NIL), X)
    first = smt.check_validity(f, cfg)
    cfg.cache.save()
    again = smt.check_validity(f, smt.SolverConfig(cache=smt.VerdictCache(path)))
    assert again.cached and again.status == first.status


def test_emit_dir(tmp_path):
    cfg = smt.SolverConfig(cmd=("no-such-solver-binary",), emit_dir=tmp_path)
    smt.check_validity(T.Eq(X, X), cfg, countermodel=False)
    assert [p.name for p in tmp_path.iterdir()] == ["q1.smt2"]
