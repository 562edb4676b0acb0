import pytest

from conftest import CORPUS
from relcheck import ir
from relcheck.ir import ast as A

CDX_OLD = (CORPUS / "cdx" / "old.ir").read_text()
CDX_NEW = (CORPUS / "cdx" / "new.ir").read_text()


def test_minimal_program():
    p = ir.parse_program("schema S { R(a:Int) } query q() { R }")
    assert (len(p.schema.relations), len(p.updates), len(p.queries)) == (1, 0, 1)


def test_cdx_fragment_shape():
    p = ir.parse_program(CDX_NEW)
    assert [u.name for u in p.updates] == ["createSub", "deleteSub", "updateSub"]
    assert [q.name for q in p.queries] == ["getSubName", "getSubFilter"]


def test_unknown_attribute_is_named():
    with pytest.raises(ir.IRValidationError) as e:
        ir.parse_program("schema { R(a:Int); } query q() { proj[zname](R) }")
    assert len(e.value.diagnostics) == 1
    assert "zname" in str(e.value)


def test_syntax_error_has_position():
    with pytest.raises(ir.IRSyntaxError) as e:
        ir.parse_program("schema { R(a:Int); }\nquery q() { proj[a](R) ")
    assert e.value.pos.line == 2


@pytest.mark.parametrize("text", [
    "schema { R(a:Int); R(b:Int); } query q() { R }",
    "schema { R(a:Int, a:Int); } query q() { R }",
    "schema { R(a:Int); } query q() { R } query q() { R }",
    "schema { R(a:Int); } query q() { S }",
    "schema { R(a:Int); } query q() { sel(a == x, R) }",
    "schema { R(a:String); } query q() { sel(a < 1, R) }",
    "schema { R(a:Int); } update u(x:String) { ins(R, {a: x}); } query q() { R }",
    "schema { R(a:Int, b:Int); } update u() { ins(R, {a: 1}); } query q() { R }",
    "schema { R(a:Int); S(b:String); } query q() { union(R, S) }",
    "schema { R(a:Int); S(b:String); } query q() { sel(a in S, R) }",
])
def test_rejected_programs(text):
    with pytest.raises(ir.IRError):
        ir.parse_program(text)


def test_attr_index():
    s = ir.parse_program(CDX_OLD).schema
    assert ir.attr_index(s, "Subscriber", "sid") == 1
    assert ir.attr_index(s, "Subscriber", "sname") == 2
    with pytest.raises(ir.IRError):
        ir.attr_index(s, "Subscriber", "age")


def test_attr_index_matches_declaration_order():
    for d in CORPUS.iterdir():
        if not (d / "new.ir").exists():
            continue
        s = ir.load_program(d / "new.ir").schema
        for r in s.relations:
            for i, a in enumerate(r.attrs, 1):
                assert ir.attr_index(s, r.name, a.name) == i


def test_output_attrs():
    p = ir.parse_program("schema { R(a:Int, b:String); } query q() { proj[b](R) }")
    assert [tuple(c) for c in ir.output_attrs(p.schema, p.queries[0].body)] == [("b", "String")]
    new = ir.parse_program(CDX_NEW)
    q = ir.parse_program(CDX_NEW.replace("proj[params'](sel(sid' == id, join(Filter', Subscriber', fid' == fid_fk')))",
                                         "join(Subscriber', Filter', fid' == fid_fk')")).queries[1].body
    names = [c[0] for c in ir.output_attrs(new.schema, q)]
    assert names == ["sid'", "sname'", "fid_fk'", "fid'", "fname'", "params'"]


def test_natural_join_desugars_to_shared_names():
    p = ir.parse_program("schema { R(a:Int, b:Int); S(b:Int, c:Int); } query q() { njoin(R, S) }")
    j = p.queries[0].body
    assert isinstance(j, A.Join) and j.natural
    assert isinstance(j.pred, A.Cmp) and j.pred.op == "=="


def test_bare_name_must_be_unambiguous():
    text = "schema { R(a:Int); S(a:Int); } query q() { proj[a](join(R, S, R.a == S.a)) }"
    with pytest.raises(ir.IRValidationError):
        ir.parse_program(text)
    ok = text.replace("proj[a]", "proj[R.a]")
    assert ir.parse_program(ok).queries[0].name == "q"


@pytest.mark.parametrize("entry", sorted(d.name for d in CORPUS.iterdir() if (d / "meta.json").exists()))
def test_round_trip(entry):
    for f in ("old.ir", "new.ir", "mutant.ir"):
        p = ir.load_program(CORPUS / entry / f)
        again = ir.parse_program(ir.pretty(p))
        assert again == p
        assert ir.pretty(again) == ir.pretty(p)


def test_positions_do_not_affect_equality():
    a = ir.parse_program("schema { R(a:Int); } query q() { R }")
    b = ir.parse_program("schema {\n\n  R(a:Int);\n}\n\nquery q() {\n   R\n}\n")
    assert a == b
