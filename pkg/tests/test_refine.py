from fractions import Fraction

import pytest

from conftest import requires_z3
from relcheck import ir
from relcheck.pairing import PairingError
from relcheck.refine import enumerate_attr_mappings, similarity, verify_refinement

BASE = """schema { R(a:Int, b:String); }
update add(x:Int, y:String) { ins(R, {a: x, b: y}); }
query get(x:Int) { proj[b](sel(a == x, R)) }
"""

WIDER = """schema { R(a:Int, b:String, c:Int); }
update add(x:Int, y:String, z:Int) { ins(R, {a: x, b: y, c: z}); }
query get(x:Int) { proj[b, c](sel(a == x, R)) }
"""


def test_similarity():
    assert similarity("sname", "sname'") == 1
    assert similarity("Name", "name") == 1
    assert similarity("abcd", "abce") == Fraction(3, 4)


def test_mappings_best_first():
    cols = [("id", "Int"), ("name", "String")]
    cols2 = [("name'", "String"), ("age'", "Int"), ("id'", "Int")]
    ms = list(enumerate_attr_mappings(cols, cols2))
    assert [m.targets for m in ms] == [(3, 1), (2, 1)]
    assert ms[0].score == 2
    assert [m.score for m in ms] == sorted((m.score for m in ms), reverse=True)


def test_mappings_respect_types_and_width():
    assert list(enumerate_attr_mappings([("a", "Int")], [("a", "String")])) == []
    assert list(enumerate_attr_mappings([("a", "Int"), ("b", "Int")], [("a", "Int")])) == []


def test_mappings_injective():
    cols = [("a", "Int"), ("b", "Int")]
    ms = list(enumerate_attr_mappings(cols, [("x", "Int"), ("y", "Int"), ("z", "Int")]))
    assert len(ms) == 6
    assert all(len(set(m.targets)) == 2 for m in ms)


@requires_z3
def test_program_refines_itself():
    p = ir.parse_program(BASE)
    v = verify_refinement(p, p)
    assert v.proved
    assert v.mappings["get"].targets == (1,)


@requires_z3
def test_added_column_refines():
    v = verify_refinement(ir.parse_program(BASE), ir.parse_program(WIDER))
    assert v.proved and v.mappings["get"].targets == (1,)


@requires_z3
def test_dropped_column_not_refined():
    narrow = ir.parse_program(WIDER.replace("proj[b, c]", "proj[b]"))
    v = verify_refinement(ir.parse_program(WIDER), narrow)
    assert not v.proved and v.failing_query == "get"


def test_parameter_prefix_required():
    with pytest.raises(PairingError):
        verify_refinement(ir.parse_program(WIDER), ir.parse_program(BASE))


@requires_z3
def test_corpus_new_attribute(verdicts):
    report, _ = verdicts.get("new_attribute")
    assert report.verdict.proved
    assert report.verdict.mappings["getProduct"].targets == (1, 2)
