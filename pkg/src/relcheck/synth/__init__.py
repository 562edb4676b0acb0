"""Invariant synthesis: candidate universe, fast path and the weakening loop."""

from .fastpath import FAST_PATH, conjunctive, conjunctive_fast_path
from .loop import (FRAMED, EquivVerdict, Prover, QueryStats, Removal, VerifyConfig, check_base_case,
                   check_inductiveness, check_sufficiency, post_state, sufficiency_formula,
                   verify_equivalence, weaken)
from .universe import Candidate, PredicateUniverse, Structure, generate_predicates

__all__ = [
    "FAST_PATH", "conjunctive", "conjunctive_fast_path", "FRAMED", "EquivVerdict", "Prover",
    "QueryStats", "Removal", "VerifyConfig", "check_base_case", "check_inductiveness",
    "check_sufficiency", "post_state", "sufficiency_formula", "verify_equivalence", "weaken",
    "Candidate", "PredicateUniverse", "Structure", "generate_predicates",
]
