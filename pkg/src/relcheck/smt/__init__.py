from .encode import (INTERNED, NATIVE, EncodeOptions, encode, full_axioms, goal_axioms,
                     negated_assertions, prepare_goal)
from .countermodel import Countermodel, find_countermodel
from .solver import (COUNTERMODEL, DEFAULT_CMD, NOT_VALID, SOLVER_ERROR, SOLVER_UNKNOWN, TIMEOUT, UNKNOWN, VALID,
                     SolverConfig, SolverEnvironmentError, Verdict, VerdictCache,
                     check_environment, check_script, check_validity)

__all__ = [
    "INTERNED", "NATIVE", "EncodeOptions", "encode", "full_axioms", "goal_axioms", "negated_assertions", "prepare_goal",
    "Countermodel", "find_countermodel", "COUNTERMODEL", "DEFAULT_CMD", "NOT_VALID", "SOLVER_ERROR", "SOLVER_UNKNOWN", "TIMEOUT", "UNKNOWN", "VALID",
    "SolverConfig", "SolverEnvironmentError", "Verdict", "VerdictCache",
    "check_environment", "check_script", "check_validity",
]
