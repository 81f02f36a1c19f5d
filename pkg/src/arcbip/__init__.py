"""Interior-point solver with adaptive cubic regularisation for inequality-constrained NLP."""
from .cubic import CubicSolution, minimize_cubic_1d, solve_cubic
from .driver import IterationRecord, SolveResult, SolverConfig, Status, solve
from .exceptions import (ArcbipError, DomainError, InvariantViolation, MaxSecularIterations,
                         MismatchedProblemSets, NonFiniteEvaluation, NotPositiveDefinite,
                         NotSymmetric, RankDeficient, Unbounded, UnknownProblem)
from .hs_suite import SuiteEntry, get_problem, list_problems
from .kernels import BACKEND
from .problem import EvalCounters, NlpProblem, finite_difference_check

__version__ = "0.1.0"

__all__ = [
    "ArcbipError", "BACKEND", "CubicSolution", "DomainError", "EvalCounters", "InvariantViolation",
    "IterationRecord", "MaxSecularIterations", "MismatchedProblemSets", "NlpProblem",
    "NonFiniteEvaluation", "NotPositiveDefinite", "NotSymmetric", "RankDeficient", "SolveResult",
    "SolverConfig", "Status", "SuiteEntry", "Unbounded", "UnknownProblem",
    "finite_difference_check", "get_problem", "list_problems", "minimize_cubic_1d", "solve",
    "solve_cubic",
]
