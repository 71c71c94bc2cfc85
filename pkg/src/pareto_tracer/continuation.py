"""Predictor-corrector exploration of a Pareto front.

Starting from one (approximately) Pareto-stationary point, every traversal
direction ``beta`` runs a breadth-first queue: pop a parent, solve
``H(x) v = J^T beta`` for the tangent step, move ``x + step * v``, pull the
result back with a few multi-gradient descent steps, and enqueue the child.
"""

from __future__ import annotations

import logging
import time
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .core import (
    CountingProblem,
    MethodTag,
    MooProblem,
    ParetoArchive,
    ParetoPoint,
    RunRecord,
    as_param,
    checked_evaluate,
    checked_gradients,
)
from .hvp import HvpMode, PredictorWeights, build_operator, predictor_rhs
from .krylov import KrylovBreakdown, SolveReport, Solver, SolverConfig, solve
from .mgd import mgd_step, min_norm_weights

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ExploreConfig:
    n_points: int = 100  # children generated per beta direction
    children_per_parent: int = 1
    predictor_step: float = 0.1
    corrector_steps: int = 5
    corrector_step_size: float = 0.01
    beta_directions: tuple[tuple[float, ...], ...] = ((1.0, -1.0), (-1.0, 1.0))
    solver: Solver = Solver.CR
    hvp_mode: HvpMode = HvpMode.GN_SUM
    damping: float | None = None  # None -> hvp.default_damping
    solver_config: SolverConfig = SolverConfig()
    normalize_direction: bool = True
    random_beta: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.n_points < 1 or self.children_per_parent < 1:
            raise ValueError("n_points and children_per_parent must be >= 1")
        if not self.predictor_step > 0:
            raise ValueError("predictor_step must be positive")
        if self.corrector_steps < 0:
            raise ValueError("corrector_steps must be >= 0")
        object.__setattr__(self, "solver", Solver(self.solver))
        object.__setattr__(self, "hvp_mode", HvpMode(self.hvp_mode))
        betas = tuple(tuple(float(b) for b in beta) for beta in self.beta_directions)
        for beta in betas:
            arr = np.asarray(beta)
            if np.any(np.abs(arr) > 1) or not np.any(arr != 0):
                raise ValueError(f"beta {beta} must be nonzero and inside [-1, 1]^m")
        object.__setattr__(self, "beta_directions", betas)


@dataclass
class SolveLog:
    """Residual history of one predictor solve."""

    solve_id: int
    parent_id: int
    report: SolveReport
    fallback: bool = False


@dataclass
class ExploreResult:
    archive: ParetoArchive
    raw_points: list[ParetoPoint]
    cost: RunRecord
    solves: list[SolveLog] = field(default_factory=list)


def predictor(
    problem: MooProblem,
    x,
    weights: PredictorWeights,
    mode: HvpMode | str = HvpMode.GN_SUM,
    solver: Solver | str = Solver.CR,
    solver_config: SolverConfig = SolverConfig(),
    grads=None,
    damping: float | None = None,
):
    """Solve ``H(x) v = J^T beta`` with the chosen curvature model and solver.

    ``grads`` may be passed to reuse a cached Jacobian. Raises
    :class:`~pareto_tracer.krylov.KrylovBreakdown` with the partial solution.
    """
    x = np.asarray(x, dtype=np.float64)
    if grads is None:
        grads = checked_gradients(problem, x)
    mode = HvpMode(mode)
    if mode is HvpMode.EXACT and not problem.has_hvp:
        mode = HvpMode.FD_EXACT
    op = build_operator(problem, x, grads, weights.alpha, mode, damping)
    rhs = predictor_rhs(grads, weights.beta)
    return solve(op, rhs, solver, solver_config)


def corrector(problem: MooProblem, x, steps: int, step_size: float) -> np.ndarray:
    """``steps`` multi-gradient descent steps; ``steps=0`` returns ``x`` untouched."""
    if steps < 0:
        raise ValueError("steps must be >= 0")
    for _ in range(steps):
        x, _ = mgd_step(problem, x, step_size)
    return x


def _unit(v: np.ndarray) -> np.ndarray | None:
    norm = float(np.linalg.norm(v))
    if norm == 0.0 or not np.isfinite(norm):
        return None
    return v / norm


def explore(problem: MooProblem, x0, config: ExploreConfig = ExploreConfig(), method: str = "pc") -> ExploreResult:
    """Trace the front from ``x0`` along every configured beta direction.

    Each direction gets its own queue seeded with ``x0`` and generates exactly
    ``config.n_points`` children. When the solver breaks down (or produces a
    non-finite step) the normalised right-hand side is used as the step.
    """
    counted = CountingProblem(problem)
    x0 = as_param(problem, x0)
    rng = np.random.default_rng(config.seed)
    record = RunRecord(method=method, problem=problem.name, seed=config.seed)
    start = time.perf_counter()
    tag = MethodTag.PC_CORRECTED if config.corrector_steps > 0 else MethodTag.PC_PREDICTED

    def elapsed_ms() -> int:
        return int(round(1000 * (time.perf_counter() - start)))

    root = ParetoPoint(x0.copy(), checked_evaluate(counted, x0), 0, None, tag)
    raw = [root]
    solves: list[SolveLog] = []

    for beta_dir in config.beta_directions:
        beta_dir = np.asarray(beta_dir)
        if beta_dir.size != problem.n_obj:
            raise ValueError(f"beta {beta_dir.tolist()} does not match {problem.n_obj} objectives")
        queue = deque([root])
        count = 0
        while count < config.n_points and queue:
            parent = queue.popleft()
            grads = checked_gradients(counted, parent.x)
            lam, d = min_norm_weights(grads)
            logger.debug("parent %d: min-norm direction %.3e", parent.point_id, np.linalg.norm(d))
            for _ in range(config.children_per_parent):
                if count >= config.n_points:
                    break
                beta = beta_dir
                if config.random_beta:
                    beta = rng.uniform(-1.0, 1.0, problem.n_obj)
                    while not np.any(beta):
                        beta = rng.uniform(-1.0, 1.0, problem.n_obj)
                weights = PredictorWeights(lam, beta)
                rhs = predictor_rhs(grads, beta)
                fallback = False
                try:
                    v, report = predictor(
                        counted, parent.x, weights, config.hvp_mode, config.solver,
                        config.solver_config, grads=grads, damping=config.damping,
                    )
                except (KrylovBreakdown, FloatingPointError) as exc:
                    logger.info("predictor fallback at parent %d: %s", parent.point_id, exc)
                    report = getattr(exc, "report", SolveReport())
                    v = rhs
                    fallback = True
                step = _unit(v) if config.normalize_direction else v
                if step is None or not np.all(np.isfinite(step)):
                    step = _unit(rhs)
                    fallback = True
                if step is None:
                    step = np.zeros_like(rhs)

                record.predictor_fallbacks += int(fallback)
                record.solver_iterations_total += report.iterations_used
                record.hvp_applies += report.matvec_count
                solves.append(SolveLog(len(solves), parent.point_id, report, fallback))

                child_x = corrector(counted, parent.x + config.predictor_step * step,
                                    config.corrector_steps, config.corrector_step_size)
                child = ParetoPoint(
                    child_x, checked_evaluate(counted, child_x), len(raw), parent.point_id, tag,
                    solver_iters=report.iterations_used,
                    grad_evals_cum=counted.gradient_evals,
                    wall_ms_cum=elapsed_ms(),
                )
                raw.append(child)
                queue.append(child)
                count += 1

    record.gradient_evals = counted.gradient_evals
    record.objective_evals = counted.objective_evals
    record.points_generated = len(raw)
    record.wall_time_ms = elapsed_ms()
    archive = ParetoArchive(raw).filtered()
    return ExploreResult(archive, raw, record, solves)
