"""Predictor-corrector tracing of Pareto fronts with matrix-free Krylov solvers."""

from .continuation import ExploreConfig, ExploreResult, corrector, explore, predictor
from .core import (
    CountingProblem,
    MethodTag,
    MooProblem,
    ParetoArchive,
    ParetoPoint,
    ProblemError,
    RunRecord,
    ValidationReport,
    validate_problem,
)
from .hvp import HvpMode, PredictorWeights, build_operator
from .krylov import KrylovBreakdown, LinearOperator, SolveReport, Solver, SolverConfig, solve
from .metrics import FrontMetrics, dominates, front_metrics, hypervolume_2d, pareto_filter
from .mgd import MgdConfig, mgd_run, min_norm_weights
from .problems import FonsecaFleming, QuadraticBiObjective, SyntheticFairness, analytic_front, make_problem

__all__ = [
    "CountingProblem",
    "ExploreConfig",
    "ExploreResult",
    "FonsecaFleming",
    "FrontMetrics",
    "HvpMode",
    "KrylovBreakdown",
    "LinearOperator",
    "MethodTag",
    "MgdConfig",
    "MooProblem",
    "ParetoArchive",
    "ParetoPoint",
    "PredictorWeights",
    "ProblemError",
    "QuadraticBiObjective",
    "RunRecord",
    "SolveReport",
    "Solver",
    "SolverConfig",
    "SyntheticFairness",
    "ValidationReport",
    "analytic_front",
    "build_operator",
    "corrector",
    "dominates",
    "explore",
    "front_metrics",
    "hypervolume_2d",
    "make_problem",
    "mgd_run",
    "min_norm_weights",
    "pareto_filter",
    "predictor",
    "solve",
    "validate_problem",
]
