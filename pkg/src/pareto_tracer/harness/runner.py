"""Method runners, single experiments and multi-method comparisons."""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ..continuation import ExploreConfig, SolveLog, explore
from ..core import (
    CountingProblem,
    MethodTag,
    MooProblem,
    ParetoArchive,
    ParetoPoint,
    ProblemError,
    RunRecord,
    as_param,
    checked_evaluate,
    checked_gradients,
)
from ..krylov import KrylovBreakdown
from ..metrics import (
    FrontMetrics,
    clipped_hypervolume_2d,
    front_metrics,
    hypervolume_2d,
    pareto_filter,
    shared_reference,
)
from ..mgd import MgdConfig, MgdDivergence, mgd_run
from ..problems import UnsupportedFront, analytic_front
from . import export
from .config import ConfigError, ExperimentConfig

logger = logging.getLogger("pareto_tracer")
# run.log wants progress messages; the root logger's handlers still filter by their own level
logger.setLevel(logging.INFO)

# errors that mean the numbers went bad rather than the configuration
NUMERICAL_ERRORS = (MgdDivergence, FloatingPointError, ProblemError, KrylovBreakdown, np.linalg.LinAlgError)
REACH_FRACTION = 0.95
THREADS_ENV = "PARETO_TRACER_THREADS"


class _Clock:
    def __init__(self):
        self.start = time.perf_counter()

    def ms(self) -> int:
        return int(round(1000 * (time.perf_counter() - self.start)))


def _smgd_points(problem: MooProblem, init_count: int, epochs: int, config: MgdConfig, seed: int):
    if init_count < 1:
        raise ValueError("init_count must be >= 1")
    counted = CountingProblem(problem)
    rng = np.random.default_rng(seed)
    clock = _Clock()
    record = RunRecord(method="smgd", problem=problem.name, seed=seed)
    budget = dataclasses.replace(config, max_iters=epochs)
    points: list[ParetoPoint] = []
    runs = []
    for _ in range(init_count):
        x0 = as_param(problem, problem.sample_point(rng))
        base = counted.gradient_evals
        result = mgd_run(counted, x0, budget, record_trace=True)
        runs.append(result)
        wall = clock.ms()
        parent = None
        # trace entry k follows k descent steps, each costing one gradient set
        for k, (x, f) in enumerate(zip(result.iterates, result.trace)):
            pid = len(points)
            points.append(ParetoPoint(x, f, pid, parent, MethodTag.SMGD, grad_evals_cum=base + k, wall_ms_cum=wall))
            parent = pid
    record.gradient_evals = counted.gradient_evals
    record.objective_evals = counted.objective_evals
    record.points_generated = len(points)
    record.wall_time_ms = clock.ms()
    return points, record, runs


def run_smgd_baseline(problem: MooProblem, init_count: int, epochs: int, config: MgdConfig = MgdConfig(),
                      seed: int = 0) -> tuple[ParetoArchive, RunRecord]:
    """Multi-gradient descent from ``init_count`` random starts; every iterate is pooled."""
    points, record, _ = _smgd_points(problem, init_count, epochs, config, seed)
    return ParetoArchive(points).filtered(), record


def _scalarized_points(problem: MooProblem, lambdas: Sequence[float], inner: MgdConfig, seed: int):
    if any(lam < 0 for lam in lambdas):
        raise ValueError("lambdas must be non-negative")
    counted = CountingProblem(problem)
    rng = np.random.default_rng(seed)
    clock = _Clock()
    record = RunRecord(method="scalarization", problem=problem.name, seed=seed)
    x0 = as_param(problem, problem.sample_point(rng))
    points = []
    for lam in lambdas:
        # normalised so the step size means the same thing for every lambda
        w = np.full(problem.n_obj, float(lam))
        w[0] = 1.0
        w /= w.sum()
        x = x0.copy()
        for _ in range(inner.max_iters):
            g = w @ checked_gradients(counted, x)
            if np.linalg.norm(g) <= inner.stationarity_tol:
                break
            x = x - inner.step_size * g
        f = checked_evaluate(counted, x)
        points.append(ParetoPoint(x, f, len(points), None, MethodTag.SCALARIZED,
                                  grad_evals_cum=counted.gradient_evals, wall_ms_cum=clock.ms()))
    record.gradient_evals = counted.gradient_evals
    record.objective_evals = counted.objective_evals
    record.points_generated = len(points)
    record.wall_time_ms = clock.ms()
    return points, record


def run_scalarization_baseline(problem: MooProblem, lambdas: Sequence[float],
                               inner_config: MgdConfig = MgdConfig(step_size=0.1, max_iters=500),
                               seed: int = 0) -> tuple[ParetoArchive, RunRecord]:
    """Gradient descent on ``(f_1 + lam * f_2) / (1 + lam)`` for each ``lam``; one point each."""
    points, record = _scalarized_points(problem, lambdas, inner_config, seed)
    return ParetoArchive(points).filtered(), record


def run_pc(problem: MooProblem, explore_config: ExploreConfig, warm_start: MgdConfig = MgdConfig(),
           seed: int = 0, method: str = "pc"):
    """Warm-start with multi-gradient descent, then trace the front.

    Cost counters and per-point ``grad_evals_cum`` include the warm start.
    """
    counted = CountingProblem(problem)
    rng = np.random.default_rng(seed)
    clock = _Clock()
    warm = mgd_run(counted, as_param(problem, problem.initial_point(rng)), warm_start)
    logger.info("warm start: %d steps, converged=%s", warm.iterations, warm.converged)
    result = explore(problem, warm.x, dataclasses.replace(explore_config, seed=seed), method=method)
    warm_ms = clock.ms() - result.cost.wall_time_ms
    shift = counted.gradient_evals

    def shifted(p: ParetoPoint) -> ParetoPoint:
        return dataclasses.replace(p, grad_evals_cum=p.grad_evals_cum + shift, wall_ms_cum=p.wall_ms_cum + warm_ms)

    raw = [shifted(p) for p in result.raw_points]
    record = result.cost
    record.gradient_evals += counted.gradient_evals
    record.objective_evals += counted.objective_evals
    record.wall_time_ms = clock.ms()
    return raw, record, result.solves


@dataclass
class RunOutcome:
    config: ExperimentConfig
    raw_points: list[ParetoPoint]
    archive: ParetoArchive
    record: RunRecord
    metrics: FrontMetrics | None
    solves: list[SolveLog] = field(default_factory=list)
    out_dir: Path | None = None


def truth_front(problem: MooProblem, resolution: int) -> np.ndarray | None:
    try:
        return analytic_front(problem, resolution)
    except UnsupportedFront:
        return None


class _ThreadFilter(logging.Filter):
    def __init__(self):
        super().__init__()
        self.thread = threading.get_ident()

    def filter(self, record):
        return record.thread == self.thread


def execute(config: ExperimentConfig):
    """Run the configured method in memory.

    Returns ``(raw_points, record, extras)`` where ``extras`` holds predictor
    solve logs for PC methods and per-start descent results for SMGD.
    """
    problem = config.problem.build()
    if config.method == "smgd":
        block = config.smgd
        return _smgd_points(problem, block.init_count, block.epochs, block.mgd, config.seed)
    if config.method == "scalarization":
        block = config.scalarization
        points, record = _scalarized_points(problem, block.lambdas, block.inner, config.seed)
        return points, record, []
    return run_pc(problem, config.explore, config.warm_start, config.seed, method=config.method)


def run_experiment(config: ExperimentConfig, out: str | Path | None = None, metrics: bool = True) -> RunOutcome:
    """Run one configuration and write points.csv, archive.json, metrics.json,
    residuals.csv (PC methods) and run.log into the output directory.

    Raises :class:`ConfigError` for bad configurations and re-raises numerical
    failures after logging them to run.log.
    """
    digest = config.digest()
    out_dir = Path(out or config.out or Path("runs") / f"{config.method}-{digest}")
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out_dir}: {exc}") from exc

    handler = logging.FileHandler(out_dir / "run.log", mode="w")
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    handler.addFilter(_ThreadFilter())
    logger.addHandler(handler)
    try:
        logger.info("config_hash=%s method=%s problem=%s seed=%d",
                    digest, config.method, config.problem.name, config.seed)
        try:
            raw, record, extras = execute(config)
        except NUMERICAL_ERRORS as exc:
            logger.error("numerical failure: %s: %s", type(exc).__name__, exc)
            raise
        problem = config.problem.build()
        archive = ParetoArchive(raw).filtered()
        export.write_points(out_dir / "points.csv", raw, problem.n_obj, digest, config.timing)
        solves = extras if config.is_pc else []
        if config.is_pc:
            export.write_residuals(out_dir / "residuals.csv", solves, digest)
        elif config.method == "smgd":
            export.write_mgd_traces(out_dir / "trace.csv", extras, problem.n_obj, digest)
        saved, cost = archive, record.to_dict()
        if not config.timing:
            # keep the file reproducible, as with points.csv
            saved = ParetoArchive([dataclasses.replace(p, wall_ms_cum=0) for p in archive])
            cost.pop("wall_time_ms")
        export.write_json(out_dir / "archive.json", export.archive_payload(saved, config.to_dict(), digest, cost))
        fm = None
        if metrics and problem.n_obj == 2:
            truth = truth_front(problem, config.front_resolution)
            fronts = [archive.objectives()] + ([truth] if truth is not None else [])
            fm = front_metrics(archive.objectives(), shared_reference(*fronts), truth)
            export.write_json(out_dir / "metrics.json", fm.to_dict())
        logger.info("done: %d points, %d in archive, %d gradient evals",
                    len(raw), len(archive), record.gradient_evals)
        return RunOutcome(config, raw, archive, record, fm, solves, out_dir)
    finally:
        logger.removeHandler(handler)
        handler.close()


def evals_to_reach(points: Sequence[ParetoPoint], target: float, reference) -> int | None:
    """Smallest cumulative gradient-eval count at which the points generated so
    far reach hypervolume ``target``; ``None`` if they never do.

    Hypervolume of a growing point set never decreases, so a bisection over
    the generation order suffices.
    """
    ordered = sorted(points, key=lambda p: p.grad_evals_cum)
    if not ordered:
        return None
    f = np.vstack([p.f for p in ordered])

    def reached(k: int) -> bool:
        return clipped_hypervolume_2d(f[:k], reference) >= target

    if not reached(len(ordered)):
        return None
    lo, hi = 1, len(ordered)
    while lo < hi:
        mid = (lo + hi) // 2
        if reached(mid):
            hi = mid
        else:
            lo = mid + 1
    return ordered[lo - 1].grad_evals_cum


def thread_limit(count: int) -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return max(1, count)
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} must be >= 1")
    return min(value, max(1, count))


SUMMARY_COLUMNS = ("run", "method", "seed", "hypervolume", "generational_distance", "spread", "point_count",
                   "gradient_evals", "hvp_applies", "solver_iterations_total", "wall_time_ms", "evals_to_reach")


def compare_methods(configs: Sequence[ExperimentConfig], out: str | Path,
                    use_shared_reference: bool = True) -> list[dict]:
    """Run every config, score all archives against one reference and write summary.csv.

    ``evals_to_reach`` is the first cumulative gradient-eval count at which a
    run's points reach 95% of the target hypervolume: the analytic front's
    when it is known, otherwise that of the pooled non-dominated set of all
    runs. Runs are executed in parallel, capped by ``PARETO_TRACER_THREADS``.
    """
    if not configs:
        raise ConfigError("nothing to compare")
    problems = {(c.problem.name, repr(sorted(c.problem.options.items()))) for c in configs}
    if len(problems) != 1:
        raise ConfigError("all compared configs must share one problem")
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    dirs = [out / f"{i:02d}-{c.method}" for i, c in enumerate(configs)]

    with ThreadPoolExecutor(max_workers=thread_limit(len(configs))) as pool:
        outcomes = list(pool.map(lambda args: run_experiment(*args, metrics=False), zip(configs, dirs)))

    problem = configs[0].problem.build()
    truth = truth_front(problem, max(c.front_resolution for c in configs))
    fronts = [o.archive.objectives() for o in outcomes]
    extra = [truth] if truth is not None else []
    shared = shared_reference(*fronts, *extra)
    if truth is not None:
        target_front, target_label = truth, "analytic"
    else:
        target_front, target_label = np.vstack(pareto_filter(list(np.vstack(fronts)))), "pooled-best"

    rows = []
    for i, o in enumerate(outcomes):
        ref = shared if use_shared_reference else shared_reference(fronts[i], *extra)
        fm = front_metrics(fronts[i], ref, truth)
        export.write_json(o.out_dir / "metrics.json", fm.to_dict())
        target = REACH_FRACTION * hypervolume_2d(target_front, ref)
        rows.append({
            "run": o.out_dir.name,
            "method": o.config.method,
            "seed": o.config.seed,
            "hypervolume": fm.hypervolume,
            "generational_distance": fm.generational_distance,
            "spread": fm.spread,
            "point_count": fm.point_count,
            "gradient_evals": o.record.gradient_evals,
            "hvp_applies": o.record.hvp_applies,
            "solver_iterations_total": o.record.solver_iterations_total,
            "wall_time_ms": o.record.wall_time_ms,
            "evals_to_reach": evals_to_reach(o.raw_points, target, ref),
        })

    digest = hashlib.sha256("".join(c.digest() for c in configs).encode()).hexdigest()[:16]
    with open(out / "summary.csv", "w", newline="") as fh:
        fh.write(f"# config_hash={digest}\n")
        fh.write(f"# evals_to_reach: gradient evals until hypervolume >= {REACH_FRACTION:.0%} "
                 f"of the {target_label} front's hypervolume (blank: never)\n")
        fh.write(",".join(SUMMARY_COLUMNS) + "\n")
        for row in rows:
            fh.write(",".join("" if row[c] is None else str(row[c]) for c in SUMMARY_COLUMNS) + "\n")
    return rows
