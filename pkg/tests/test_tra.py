import pytest

from conftest import CORPUS
from relcheck import interp, ir
from relcheck.tra import (CaptureError, instantiate_axioms, redundant_axioms, sexpr, show, substitute,
                          substitute_many)
from relcheck.tra import terms as T
from relcheck.tra import translate as tr
from relcheck.tra.simplify import eliminate_definitions, simplify

OLD = ir.load_program(CORPUS / "cdx" / "old.ir")
NEW = ir.load_program(CORPUS / "cdx" / "new.ir")
R, S, X, Y = T.RVar("R"), T.RVar("S"), T.RVar("x"), T.RVar("y")


def ge(i, v):
    return T.PCmp(">=", T.PAttr(i), T.Const(v))


def test_translate_projection_selection():
    t = tr.query(OLD.queries[0].body, OLD.schema)
    assert t == T.Proj((2,), T.Sel(T.PCmp("==", T.PAttr(1), T.VVar("id")), T.RVar("Subscriber")))


def test_translate_offsets_right_operand():
    t = tr.query(NEW.queries[1].body, NEW.schema)
    # Filter' has three columns, so Subscriber'.sid' is column 4 and fid_fk' column 6.
    assert show(t) == "Π[3](σ[a4 = id](σ[a1 = a6]((Filter' × Subscriber'))))"


def test_translate_base_relation():
    p = ir.parse_program("schema { R(a:Int); } query q() { R }")
    assert tr.query(p.queries[0].body, p.schema) == R


def test_selection_schema_axioms():
    f = T.Eq(T.Sel(ge(1, 2), X), T.Sel(T.PCmp(">", T.PAttr(2), T.Const(1)), Y))
    ax = instantiate_axioms(f)
    assert ax.labels() == ["sel-nil", "sel-cons", "sel-nil", "sel-cons"]
    assert show(ax[0].formula) == "∀?x. (?x = [] → σ[a1 ≥ 2](?x) = [])"
    assert "¬(a1 ≥ 2 @ ?h) → σ[a1 ≥ 2](?x) = σ[a1 ≥ 2](?t)" in show(ax[1].formula)


def test_no_operators_no_axioms():
    assert instantiate_axioms(T.Eq(X, Y)) == []
    assert redundant_axioms(T.Eq(X, Y)) == []


def test_union_axioms():
    f = T.Eq(T.Union_(R, S), Y)
    assert instantiate_axioms(f).labels() == ["union-nil", "union-cons"]
    assert "union-right-nil" in redundant_axioms(f).labels()


def test_product_pulls_in_helpers():
    labels = instantiate_axioms(T.Eq(T.Prod(R, S, 1), Y)).labels()
    assert {"prod-nil", "prod-cons", "prodrow-nil", "prodrow-cons", "union-nil", "union-cons"} <= set(labels)


def test_every_occurrence_instantiated_once():
    f = T.Eq(T.Sel(ge(1, 2), T.Sel(ge(1, 2), R)), T.Sel(ge(1, 2), S))
    assert instantiate_axioms(f).labels() == ["sel-nil", "sel-cons"]


def test_proj_sel_intro_instance():
    f = T.Implies(T.Eq(T.Proj((1, 2), R), T.Proj((2, 1), S)),
                  T.Eq(T.Proj((1,), T.Sel(ge(2, 0), R)), T.Proj((2,), T.Sel(ge(1, 0), S))))
    assert "proj-sel-intro" in redundant_axioms(f).labels()


def test_proj_sel_intro_ignores_conjunct_order():
    p = T.PAnd(ge(1, 0), T.PCmp("==", T.PAttr(2), T.VVar("v")))
    q = T.PAnd(T.PCmp("==", T.VVar("w"), T.PAttr(1)), ge(2, 0))
    f = T.Implies(T.Eq(T.Proj((1, 2), R), T.Proj((2, 1), S)),
                  T.Eq(T.Proj((1,), T.Sel(p, R)), T.Proj((2,), T.Sel(q, S))))
    ax = [a for a in redundant_axioms(f) if a.label == "proj-sel-intro"]
    assert any("v = w" in show(a.formula) for a in ax)


def test_substitute_unprimed_only():
    f = T.Eq(T.Proj((1,), R), T.Proj((1,), T.RVar("R'")))
    assert substitute(f, "R", X) == T.Eq(T.Proj((1,), X), T.Proj((1,), T.RVar("R'")))
    assert substitute(T.Eq(R, R), "R", X) == T.Eq(X, X)


def test_substitute_respects_binders():
    y = T.Var("y", T.REL)
    f = T.Exists((y,), T.Eq(R, y.term()))
    assert substitute(f, "R", T.RVar("z")) == T.Exists((y,), T.Eq(T.RVar("z"), y.term()))
    # The bound name shadows the target.
    shadow = T.Exists((T.Var("R", T.REL),), T.Eq(R, S))
    assert substitute(shadow, "R", X) == shadow
    with pytest.raises(CaptureError):
        substitute(f, "R", y.term())


def test_substitute_many_is_simultaneous():
    f = T.Eq(R, S)
    out = substitute_many(f, {("R", T.REL): S, ("S", T.REL): R})
    assert out == T.Eq(S, R)


def test_simplify_preserves_meaning():
    t = T.Proj((1,), T.Union_(T.Union_(T.table([(1, 2)]), T.NIL), T.Sel(ge(1, 1), T.table([(2, 3), (0, 1)]))))
    assert interp.Evaluator({}).rel(simplify(t)) == interp.Evaluator({}).rel(t)
    assert T.NIL not in list(T.walk(simplify(t)))


def test_eliminate_definitions():
    fs = [T.Eq(X, T.Union_(R, S)), T.Eq(T.Proj((1,), X), T.NIL)]
    out = eliminate_definitions(fs)
    assert len(out) == 1 and ("x", T.REL) not in T.free_vars(out[0])
    kept = eliminate_definitions(fs, protected=frozenset({("x", T.REL)}))
    assert len(kept) == 2


def test_printers():
    t = T.Proj((1, 2), T.Sel(ge(1, 2), R))
    assert show(t) == "Π[1, 2](σ[a1 ≥ 2](R))"
    assert sexpr(t).startswith("(proj (1 2)")
