"""Refinement: the new program answers every old query with extra columns.

The invariant only has to survive the update pairs both programs have, and
each old query must come out as some column projection of its new
counterpart.  Candidate projections are tried in order of how similar the
attribute names are.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from . import ir
from .pairing import Pairing, TxnPair, pair_programs
from .synth.fastpath import conjunctive_fast_path
from .synth.loop import (EquivVerdict, Prover, VerifyConfig, _param_map, _widths, query_terms,
                         weaken)
from .synth.universe import generate_predicates
from .tra import terms as T

Col = tuple[str, str]  # (name, type)


def normalize_name(name: str) -> str:
    return name.replace("'", "").replace('"', "").lower()


def _edit_distance(a: str, b: str) -> int:
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, 1):
        cur = [i]
        for j, cb in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def similarity(a: str, b: str) -> Fraction:
    """1 for equal names up to case and primes, else 1 - normalized edit distance."""
    a, b = normalize_name(a), normalize_name(b)
    if a == b:
        return Fraction(1)
    return 1 - Fraction(_edit_distance(a, b), max(len(a), len(b)))


@dataclass(frozen=True)
class AttrMapping:
    """Column i of Q (1-based) is column ``targets[i-1]`` of Q'."""

    targets: tuple[int, ...]
    score: Fraction
    names: tuple[tuple[str, str], ...] = ()

    def as_dict(self) -> dict:
        return {"targets": list(self.targets), "score": float(self.score),
                "columns": [list(p) for p in self.names]}


def enumerate_attr_mappings(cols: Sequence[Col], cols2: Sequence[Col]) -> Iterator[AttrMapping]:
    """Injective, type-preserving mappings by descending total similarity.

    Best-first search: a partial assignment is keyed by its score plus the
    best possible score of the remaining columns, so complete mappings come
    out in order.  Equal scores are broken by the target tuple.
    """
    k = len(cols)
    if k > len(cols2):
        return
    sims = [[similarity(a, b) if ta == tb else None for b, tb in cols2] for a, ta in cols]
    best_rest = [Fraction(0)] * (k + 1)
    for i in range(k - 1, -1, -1):
        opts = [s for s in sims[i] if s is not None]
        if not opts:
            return
        best_rest[i] = best_rest[i + 1] + max(opts)
    heap: list = [(-best_rest[0], (), Fraction(0))]
    while heap:
        neg_bound, prefix, score = heapq.heappop(heap)
        i = len(prefix)
        if i == k:
            targets = tuple(j + 1 for j in prefix)
            yield AttrMapping(targets, score, tuple((cols[a][0], cols2[j][0]) for a, j in enumerate(prefix)))
            continue
        for j, s in enumerate(sims[i]):
            if s is None or j in prefix:
                continue
            sc = score + s
            heapq.heappush(heap, (-(sc + best_rest[i + 1]), prefix + (j,), sc))


@dataclass
class RefineVerdict(EquivVerdict):
    mappings: dict[str, AttrMapping] = field(default_factory=dict)


def projective_formula(phi: T.Formula, pairing: Pairing, pair: TxnPair, m: AttrMapping) -> T.Formula:
    q, q2 = query_terms(pairing, pair)
    return T.Implies(T.conj(phi, *pair.param_eqs), T.Eq(q, T.Proj(m.targets, q2)))


def _columns(pairing: Pairing, pair: TxnPair) -> tuple[list[Col], list[Col]]:
    return (ir.output_attrs(pairing.old.schema, pair.old.body),
            ir.output_attrs(pairing.new.schema, pair.new.body))


def check_projective(phi: T.Formula, pairing: Pairing, pair: TxnPair, prover: Prover,
                     cap: int) -> tuple[Optional[AttrMapping], str]:
    """First mapping making the old query a projection of the new one."""
    cols, cols2 = _columns(pairing, pair)
    q, q2 = query_terms(pairing, pair)
    tried = 0
    for m in enumerate_attr_mappings(cols, cols2):
        if tried >= cap:
            return None, f"mapping budget exhausted for {pair.label} ({cap} tried)"
        tried += 1
        if prover.cfg.fast_path:
            v = conjunctive_fast_path(phi, q, T.Proj(m.targets, q2), _param_map(pair),
                                      _widths(pairing.new, pairing.new_rels),
                                      _widths(pairing.old, pairing.old_rels))
            if v is not None:
                prover.note(v)
                return m, ""
        v = prover.solve(projective_formula(phi, pairing, pair, m),
                         f"projective {pair.label} {list(m.targets)}", pair.value_types)
        if v.valid:
            return m, ""
    if tried == 0:
        return None, f"no injective type-preserving column mapping for {pair.label}"
    return None, f"no column mapping makes {pair.label} a projection"


def verify_refinement(old, new, cfg: Optional[VerifyConfig] = None, mapping=None,
                      pairing: Optional[Pairing] = None) -> RefineVerdict:
    """Search for a simulation invariant under which each old query is a projection of the new one."""
    cfg = cfg or VerifyConfig()
    prover = Prover(cfg)
    pairing = pairing or pair_programs(old, new, "refine", mapping)
    if len(new.updates) < len(old.updates) or len(new.queries) < len(old.queries):
        return RefineVerdict(False, (), 0, [], prover.stats, 0,
                             "the new program has fewer transactions than the old one")
    universe = generate_predicates(pairing)
    chosen: dict[str, AttrMapping] = {}
    why: list[str] = []

    def sufficient(phi):
        chosen.clear()
        for pair in pairing.queries:
            m, reason = check_projective(phi, pairing, pair, prover, cfg.max_mappings)
            if m is None:
                why.append(reason)
                return pair.label
            chosen[pair.label] = m
        return None

    res = weaken(pairing, universe, sufficient, prover, cfg.max_iters)
    reason = res.reason
    if not res.proved and res.failing_query is not None and why:
        reason = why[-1]
    return RefineVerdict(res.proved, res.invariant, res.iterations, res.removed, res.stats,
                         res.universe_size, reason, res.failing_query,
                         dict(chosen) if res.proved else {})
