from conftest import requires_z3
from relcheck import ir
from relcheck.pairing import pair_programs
from relcheck.synth import (FAST_PATH, VerifyConfig, check_base_case, check_inductiveness,
                            check_sufficiency, conjunctive_fast_path, generate_predicates,
                            verify_equivalence)
from relcheck.tra import show
from relcheck.tra import terms as T

R, R2 = T.RVar("R"), T.RVar("R'")

COUNTER = """schema { R(a:Int, b:Int); }
update add(x:Int, y:Int) { ins(R, {a: x, b: y}); }
update drop(x:Int) { del(R, a == x); }
query get(x:Int) { proj[b](sel(a == x, R)) }
"""


def eq(i, j):
    return T.PCmp("==", T.PAttr(i), T.PAttr(j) if isinstance(j, int) else T.VVar(j))


def test_cdx_universe_contains_projection_conjuncts(cdx_programs):
    u = generate_predicates(pair_programs(*cdx_programs))
    text = [str(c) for c in u]
    assert "Π[1, 2](Subscriber) = Π[1, 2](Subscriber')" in text
    assert {c.template for c in u} == {1, 3}


def test_self_pairing_gives_identity_conjunct():
    p = ir.parse_program(COUNTER)
    u = generate_predicates(pair_programs(p, p))
    assert [str(c) for c in u] == ["Π[1, 2](R) = Π[1, 2](R')"]


def test_unrelated_inserts_give_empty_universe():
    old = ir.parse_program("schema { R(a:Int); } update u(x:Int, y:Int) { ins(R, {a: x}); } query q() { R }")
    new = ir.parse_program("schema { R(a:Int); } update u(x:Int, y:Int) { ins(R, {a: y}); } query q() { R }")
    assert len(generate_predicates(pair_programs(old, new))) == 0


def test_fast_path_swapped_equalities():
    phi = T.Eq(T.Proj((1, 2), R), T.Proj((2, 1), R2))
    q = T.Proj((2,), T.Sel(T.PAnd(eq(1, "x"), eq(2, "y")), R))
    q2 = T.Proj((1,), T.Sel(T.PAnd(T.PCmp("==", T.VVar("y'"), T.PAttr(1)), eq(2, "x'")), R2))
    v = conjunctive_fast_path(phi, q, q2, {"x": "x'", "y": "y'"}, {"R'": 2})
    assert v is not None and v.reason == FAST_PATH


def test_fast_path_declines_union():
    phi = T.Eq(R, R2)
    assert conjunctive_fast_path(phi, T.Union_(R, R), T.Union_(R2, R2), {}, {"R'": 1}) is None


def test_base_case():
    assert check_base_case(T.Eq(T.Proj((1,), R), T.Proj((1,), R2)))
    assert not check_base_case(T.FNot(T.Eq(R, R)))
    many = T.conj(*(T.Eq(T.Proj((i % 3 + 1,), R), T.Proj((1,), R2)) for i in range(50)))
    assert check_base_case(many)


@requires_z3
def test_sufficiency_and_inductiveness():
    p = ir.parse_program(COUNTER)
    pairing = pair_programs(p, p)
    good = generate_predicates(pairing)[0].formula
    assert check_sufficiency(good, pairing)
    assert check_inductiveness(good, pairing, good)
    weak = T.Eq(T.Proj((1,), R), T.Proj((1,), R2))
    assert not check_sufficiency(weak, pairing, VerifyConfig(fast_path=False))
    assert check_inductiveness(weak, pairing, weak)


@requires_z3
def test_program_equivalent_to_itself():
    p = ir.parse_program(COUNTER)
    v = verify_equivalence(p, p)
    assert v.proved and v.iterations == 1
    assert show(v.formula) == "Π[1, 2](R) = Π[1, 2](R')"


@requires_z3
def test_mutant_not_proved(verdicts):
    report, _ = verdicts.get("cdx", "mutant")
    assert not report.verdict.proved


@requires_z3
def test_changed_query_not_proved():
    p = ir.parse_program(COUNTER)
    q = ir.parse_program(COUNTER.replace("proj[b]", "proj[a]"))
    v = verify_equivalence(p, q)
    assert not v.proved and v.failing_query is not None
