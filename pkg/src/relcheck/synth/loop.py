"""Invariant inference by greedy weakening, and the obligations it checks.

Φ starts as the conjunction of the whole universe.  Each round first asks
whether Φ equates every pair of queries; if not, no subset can, and the
run fails.  Otherwise the conjuncts are tested for preservation by every
pair of updates in universe order and the first one that is not preserved
is dropped.  A round that drops nothing ends the run with a proof.
"""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

from .. import interp, smt
from ..interp import Instance
from ..pairing import Pairing, TxnPair, pair_programs
from ..sp import NameAllocator, sp
from ..tra import printer as P
from ..tra import terms as T
from ..tra import translate as tr
from .fastpath import FAST_PATH, conjunctive_fast_path
from .universe import Candidate, PredicateUniverse, generate_predicates

log = logging.getLogger(__name__)

FRAMED = "framed"


@dataclass
class VerifyConfig:
    solver: smt.SolverConfig = field(default_factory=smt.SolverConfig)
    max_iters: Optional[int] = None  # None: |universe| + 1
    jobs: int = 1
    fast_path: bool = True
    max_mappings: int = 64  # refinement only


@dataclass
class QueryStats:
    """Validity obligations by outcome.  ``total = valid + not_valid + unknown``."""

    total: int = 0
    fast_path: int = 0
    framed: int = 0
    valid: int = 0
    not_valid: int = 0
    unknown: int = 0
    timeout: int = 0
    cached: int = 0
    solver_ms: float = 0.0

    @property
    def solver_calls(self) -> int:
        return self.total - self.fast_path - self.framed

    def record(self, v: smt.Verdict) -> None:
        self.total += 1
        if v.reason == FAST_PATH:
            self.fast_path += 1
        elif v.reason == FRAMED:
            self.framed += 1
        if v.status == smt.VALID:
            self.valid += 1
        elif v.status == smt.NOT_VALID:
            self.not_valid += 1
        else:
            self.unknown += 1
            if v.reason == smt.TIMEOUT:
                self.timeout += 1
        if v.cached:
            self.cached += 1
        self.solver_ms += v.wall_ms

    def as_dict(self) -> dict:
        return {"total": self.total, "fast_path": self.fast_path, "framed": self.framed,
                "solver": self.solver_calls, "valid": self.valid, "not_valid": self.not_valid,
                "unknown": self.unknown, "timeout": self.timeout}


@dataclass(frozen=True)
class Removal:
    iteration: int
    conjunct: str
    update: str
    verdict: str


@dataclass
class EquivVerdict:
    proved: bool
    invariant: tuple[Candidate, ...]
    iterations: int
    removed: list[Removal]
    stats: QueryStats
    universe_size: int
    reason: Optional[str] = None
    failing_query: Optional[str] = None

    @property
    def formula(self) -> T.Formula:
        return T.conj(*(c.formula for c in self.invariant))

    def __str__(self) -> str:
        if self.proved:
            return f"proved ({len(self.invariant)} conjuncts, {self.iterations} iterations)"
        return f"not proved: {self.reason}"


class Prover:
    """Discharges obligations, keeps counts, runs windows of them in parallel."""

    def __init__(self, cfg: VerifyConfig):
        self.cfg = cfg
        self.stats = QueryStats()
        self._lock = threading.Lock()

    def note(self, v: smt.Verdict) -> smt.Verdict:
        with self._lock:
            self.stats.record(v)
        return v

    def solve(self, F: T.Formula, comment: str, value_types=None) -> smt.Verdict:
        v = smt.check_validity(F, self.cfg.solver, comment=comment, value_types=value_types,
                               countermodel=False)
        if v.reason == smt.SOLVER_ERROR:
            log.warning("solver error on %s; counted as not valid", comment)
        return self.note(v)

    def first_failure(self, tasks: Sequence[Callable[[], smt.Verdict]]):
        """(index, verdict) of the first task in order that is not Valid, or None.

        Tasks run in consecutive windows of ``jobs``; the answer depends
        only on the verdicts, never on completion order.
        """
        jobs = max(1, self.cfg.jobs)
        if jobs == 1:
            for i, t in enumerate(tasks):
                v = t()
                if not v.valid:
                    return i, v
            return None
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for start in range(0, len(tasks), jobs):
                window = list(pool.map(lambda t: t(), tasks[start:start + jobs]))
                for k, v in enumerate(window):
                    if not v.valid:
                        return start + k, v
        return None


# ------------------------------------------------------------ obligations

def _widths(prog, names) -> dict[str, int]:
    return {names[r.name]: r.arity for r in prog.schema.relations}


def _param_map(pair: TxnPair) -> dict[str, str]:
    return {pair.old_side.param(a.name): pair.new_side.param(b.name)
            for a, b in zip(pair.old.params[:pair.shared], pair.new.params[:pair.shared])}


def query_terms(pairing: Pairing, pair: TxnPair) -> tuple[T.RelTerm, T.RelTerm]:
    return (tr.query(pair.old.body, pairing.old.schema, pair.old_side),
            tr.query(pair.new.body, pairing.new.schema, pair.new_side))


def sufficiency_formula(phi: T.Formula, pairing: Pairing, pair: TxnPair) -> T.Formula:
    q, q2 = query_terms(pairing, pair)
    return T.Implies(T.conj(phi, *pair.param_eqs), T.Eq(q, q2))


def _sufficiency_task(phi, pairing, pair, prover: Prover):
    def run():
        if prover.cfg.fast_path:
            q, q2 = query_terms(pairing, pair)
            v = conjunctive_fast_path(phi, q, q2, _param_map(pair), _widths(pairing.new, pairing.new_rels),
                                      _widths(pairing.old, pairing.old_rels))
            if v is not None:
                return prover.note(v)
        return prover.solve(sufficiency_formula(phi, pairing, pair), f"sufficiency {pair.label}",
                            pair.value_types)
    return run


def check_sufficiency(phi: T.Formula, pairing: Pairing, cfg: Optional[VerifyConfig] = None,
                      prover: Optional[Prover] = None) -> bool:
    """Φ ∧ x = y implies equal results for every paired query."""
    prover = prover or Prover(cfg or VerifyConfig())
    tasks = [_sufficiency_task(phi, pairing, q, prover) for q in pairing.queries]
    return prover.first_failure(tasks) is None


def post_state(phi: T.Formula, pairing: Pairing, pair: TxnPair) -> T.Formula:
    """sp(Φ ∧ x = y, U ; U') with both programs' existentials."""
    alloc = NameAllocator()
    s1 = sp(T.conj(phi, *pair.param_eqs), pair.old, pairing.old.schema, alloc, pair.old_side)
    return sp(s1.formula, pair.new, pairing.new.schema, alloc, pair.new_side).formula


def written(pair: TxnPair) -> set[str]:
    return ({pair.old_side.rel(s.rel) for s in pair.old.body}
            | {pair.new_side.rel(s.rel) for s in pair.new.body})


def _rels_of(f: T.Formula) -> set[str]:
    return {n for n, s in T.free_vars(f) if s == T.REL}


def _inductive_task(conjunct: T.Formula, post: T.Formula, pair: TxnPair, prover: Prover):
    def run():
        if not (_rels_of(conjunct) & written(pair)):
            # Neither side writes what the conjunct reads: sp keeps it verbatim.
            return prover.note(smt.Verdict(smt.VALID, FRAMED))
        return prover.solve(T.Implies(post, conjunct), f"inductive {pair.label}: {P.show(conjunct)}",
                            pair.value_types)
    return run


def check_inductiveness(phi: T.Formula, pairing: Pairing, conjunct: T.Formula,
                        cfg: Optional[VerifyConfig] = None, prover: Optional[Prover] = None) -> bool:
    """Every paired update, run from a state satisfying Φ ∧ x = y, re-establishes ``conjunct``."""
    if isinstance(conjunct, T.FTrue):
        return True
    prover = prover or Prover(cfg or VerifyConfig())
    tasks = [_inductive_task(conjunct, post_state(phi, pairing, u), u, prover) for u in pairing.updates]
    return prover.first_failure(tasks) is None


def check_base_case(phi: T.Formula, pairing: Optional[Pairing] = None) -> bool:
    """Φ holds on the pair of empty databases (evaluated, no solver)."""
    if pairing is None:
        env = {(n, s): () for n, s in T.free_vars(phi) if s == T.REL}
        return interp.evaluate(phi, env)
    return interp.models(Instance.empty(pairing.old.schema), Instance.empty(pairing.new.schema), {},
                         phi, old=pairing.old_side(), new=pairing.new_side())


# ------------------------------------------------------------ the loop

SufficiencyFn = Callable[[T.Formula], Optional[str]]


def weaken(pairing: Pairing, universe: PredicateUniverse, sufficient: SufficiencyFn,
           prover: Prover, max_iters: Optional[int] = None) -> EquivVerdict:
    """Greedy weakening.  ``sufficient(Φ)`` returns None or the failing query's label."""
    current = list(universe)
    removed: list[Removal] = []
    cap = max_iters if max_iters is not None else len(universe) + 1
    it = 0

    def result(ok, reason=None, failing=None):
        return EquivVerdict(ok, tuple(current), it, removed, prover.stats, len(universe), reason, failing)

    while True:
        if it >= cap:
            return result(False, f"iteration cap {cap} reached")
        it += 1
        phi = T.conj(*(c.formula for c in current))
        if not check_base_case(phi, pairing):
            return result(False, "candidate fails on empty databases")
        failing = sufficient(phi)
        if failing is not None:
            return result(False, f"invariant does not equate query {failing}", failing)
        posts = [post_state(phi, pairing, u) for u in pairing.updates]
        tasks, index = [], []
        for ci, c in enumerate(current):
            for u, post in zip(pairing.updates, posts):
                tasks.append(_inductive_task(c.formula, post, u, prover))
                index.append((ci, u))
        hit = prover.first_failure(tasks)
        if hit is None:
            return result(True)
        ci, u = index[hit[0]]
        removed.append(Removal(it, str(current[ci]), u.label, str(hit[1])))
        log.info("iteration %d: dropping %s (%s: %s)", it, current[ci], u.label, hit[1])
        del current[ci]


def equivalence_sufficiency(pairing: Pairing, prover: Prover) -> SufficiencyFn:
    def sufficient(phi):
        tasks = [_sufficiency_task(phi, pairing, q, prover) for q in pairing.queries]
        hit = prover.first_failure(tasks)
        return None if hit is None else pairing.queries[hit[0]].label
    return sufficient


def verify_equivalence(old, new, cfg: Optional[VerifyConfig] = None,
                       mapping=None, pairing: Optional[Pairing] = None) -> EquivVerdict:
    """Search for a bisimulation invariant proving ``old`` and ``new`` equivalent."""
    cfg = cfg or VerifyConfig()
    prover = Prover(cfg)
    pairing = pairing or pair_programs(old, new, "equiv", mapping)
    if len(old.updates) != len(new.updates) or len(old.queries) != len(new.queries):
        return EquivVerdict(False, (), 0, [], prover.stats, 0,
                            f"transaction counts differ: {len(old.updates)}+{len(old.queries)} vs "
                            f"{len(new.updates)}+{len(new.queries)}")
    universe = generate_predicates(pairing)
    return weaken(pairing, universe, equivalence_sufficiency(pairing, prover), prover, cfg.max_iters)
