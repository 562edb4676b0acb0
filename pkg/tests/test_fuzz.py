from conftest import CORPUS
from relcheck import interp, ir
from relcheck.fuzz import Fuzzer, fuzz, literals
from relcheck.pairing import pair_programs

OLD = ir.load_program(CORPUS / "cdx" / "old.ir")
NEW = ir.load_program(CORPUS / "cdx" / "new.ir")
MUTANT = ir.load_program(CORPUS / "cdx" / "mutant.ir")


def test_cdx_mutant_distinguished_after_shrinking():
    res = fuzz(OLD, MUTANT, seqs=500, seed=0)
    assert res.found
    cx = res.counterexample
    assert len(cx.old_trace) <= 2
    assert cx.old_result != cx.new_result


def test_no_sequences_no_counterexample():
    res = fuzz(OLD, MUTANT, seqs=0)
    assert not res.found and res.tried == 0


def test_identical_programs_agree():
    res = fuzz(OLD, OLD, seqs=300)
    assert not res.found and res.tried == 300


def test_deterministic_per_seed():
    a = fuzz(OLD, NEW, seqs=500, seed=3)
    b = fuzz(OLD, NEW, seqs=500, seed=3)
    assert a == b


def test_counterexample_replays():
    cx = fuzz(OLD, NEW, seqs=500, seed=0).counterexample
    assert cx is not None
    assert interp.eval_program(OLD, list(cx.old_trace)) == cx.old_result
    assert interp.eval_program(NEW, list(cx.new_trace)) == cx.new_result
    assert cx.as_dict()["length"] == len(cx.new_trace)


def test_sequences_end_with_query():
    f = Fuzzer(pair_programs(OLD, NEW), seed=1)
    queries = {q.name for q in OLD.queries}
    for i in range(50):
        old, new = f.sequence(i, 5)
        assert old[-1].txn in queries and len(old) == len(new) <= 5
        assert all(s.txn not in queries for s in old[:-1])


def test_literals_enter_pool():
    p = ir.parse_program("schema { R(a:Int); } query q() { sel(a == 42, R) }")
    assert literals(p) == ((42,), ())
    assert 42 in Fuzzer(pair_programs(p, p)).ints


def test_refinement_agreement():
    f = Fuzzer(pair_programs(OLD, OLD, "refine"), mode="refine")
    assert f.agree([[1]], [[0, 1]])
    assert not f.agree([[1]], [[0, 2]])
    assert not f.agree([], [[1]])
