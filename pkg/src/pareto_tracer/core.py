"""Shared domain types and the multi-objective problem contract."""

from __future__ import annotations

import abc
import enum
from dataclasses import dataclass, field

import numpy as np


class ProblemError(ValueError):
    """Raised when a problem returns malformed or non-finite values."""


class MooProblem(abc.ABC):
    """Differentiable problem with ``n_obj`` objectives over ``R^n_dim``.

    Subclasses implement :meth:`evaluate` and :meth:`gradients`. Both must be
    pure: the same ``x`` gives bitwise-identical output. Problems that can
    compute weighted Hessian-vector products analytically override
    :meth:`hvp` and set ``has_hvp = True``.
    """

    name: str = "problem"
    has_hvp: bool = False

    @property
    @abc.abstractmethod
    def n_dim(self) -> int: ...

    @property
    @abc.abstractmethod
    def n_obj(self) -> int: ...

    @abc.abstractmethod
    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Objective vector, shape ``(n_obj,)``."""

    @abc.abstractmethod
    def gradients(self, x: np.ndarray) -> np.ndarray:
        """Per-objective gradients stacked as rows, shape ``(n_obj, n_dim)``."""

    def hvp(self, x: np.ndarray, alpha: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Return ``(sum_i alpha_i H_i(x)) @ v``."""
        raise NotImplementedError(f"{self.name} has no analytic Hessian-vector product")

    def sample_point(self, rng: np.random.Generator) -> np.ndarray:
        """Random point used for validation probes."""
        return rng.standard_normal(self.n_dim)

    def initial_point(self, rng: np.random.Generator) -> np.ndarray:
        """Random starting point for warm starts and baselines."""
        return self.sample_point(rng)


class CountingProblem(MooProblem):
    """Wraps a problem and counts every call into it."""

    def __init__(self, inner: MooProblem):
        self.inner = inner
        self.name = inner.name
        self.has_hvp = inner.has_hvp
        self.objective_evals = 0
        self.gradient_evals = 0
        self.hvp_evals = 0

    @property
    def n_dim(self) -> int:
        return self.inner.n_dim

    @property
    def n_obj(self) -> int:
        return self.inner.n_obj

    def evaluate(self, x):
        self.objective_evals += 1
        return self.inner.evaluate(x)

    def gradients(self, x):
        self.gradient_evals += 1
        return self.inner.gradients(x)

    def hvp(self, x, alpha, v):
        self.hvp_evals += 1
        return self.inner.hvp(x, alpha, v)

    def sample_point(self, rng):
        return self.inner.sample_point(rng)

    def initial_point(self, rng):
        return self.inner.initial_point(rng)


def as_param(problem: MooProblem, x) -> np.ndarray:
    """Coerce ``x`` to a finite float64 vector of the problem's dimension."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (problem.n_dim,):
        raise ProblemError(f"expected parameter of shape ({problem.n_dim},), got {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ProblemError("parameter vector has non-finite entries")
    return x


def checked_evaluate(problem: MooProblem, x: np.ndarray) -> np.ndarray:
    f = np.asarray(problem.evaluate(x), dtype=np.float64)
    if f.shape != (problem.n_obj,):
        raise ProblemError(f"{problem.name}: evaluate returned shape {f.shape}")
    if not np.all(np.isfinite(f)):
        raise ProblemError(f"{problem.name}: non-finite objective at x={x.tolist()}")
    return f


def checked_gradients(problem: MooProblem, x: np.ndarray) -> np.ndarray:
    g = np.asarray(problem.gradients(x), dtype=np.float64)
    if g.shape != (problem.n_obj, problem.n_dim):
        raise ProblemError(f"{problem.name}: gradients returned shape {g.shape}")
    if not np.all(np.isfinite(g)):
        raise ProblemError(f"{problem.name}: non-finite gradient at x={x.tolist()}")
    return g


class MethodTag(str, enum.Enum):
    SMGD = "SMGD"
    PC_PREDICTED = "PC_PREDICTED"
    PC_CORRECTED = "PC_CORRECTED"
    SCALARIZED = "SCALARIZED"


@dataclass(frozen=True)
class ParetoPoint:
    x: np.ndarray
    f: np.ndarray
    point_id: int
    parent_id: int | None = None
    method_tag: MethodTag = MethodTag.SMGD
    # cost snapshot taken when the point was created
    solver_iters: int = 0
    grad_evals_cum: int = 0
    wall_ms_cum: int = 0

    def to_dict(self) -> dict:
        return {
            "point_id": self.point_id,
            "parent_id": self.parent_id,
            "method_tag": self.method_tag.value,
            "x": self.x.tolist(),
            "f": self.f.tolist(),
            "solver_iters": self.solver_iters,
            "grad_evals_cum": self.grad_evals_cum,
            "wall_ms_cum": self.wall_ms_cum,
        }

    @classmethod
    def from_dict(cls, d: dict) -> ParetoPoint:
        return cls(
            x=np.asarray(d["x"], dtype=np.float64),
            f=np.asarray(d["f"], dtype=np.float64),
            point_id=int(d["point_id"]),
            parent_id=None if d.get("parent_id") is None else int(d["parent_id"]),
            method_tag=MethodTag(d["method_tag"]),
            solver_iters=int(d.get("solver_iters", 0)),
            grad_evals_cum=int(d.get("grad_evals_cum", 0)),
            wall_ms_cum=int(d.get("wall_ms_cum", 0)),
        )


@dataclass
class ParetoArchive:
    """Ordered collection of points; :meth:`filtered` drops dominated ones."""

    points: list[ParetoPoint] = field(default_factory=list)

    def add(self, point: ParetoPoint) -> None:
        self.points.append(point)

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def objectives(self) -> np.ndarray:
        if not self.points:
            return np.empty((0, 0))
        return np.vstack([p.f for p in self.points])

    def filtered(self) -> ParetoArchive:
        from .metrics import pareto_filter

        return ParetoArchive(pareto_filter(self.points))

    def to_list(self) -> list[dict]:
        return [p.to_dict() for p in self.points]

    @classmethod
    def from_list(cls, items: list[dict]) -> ParetoArchive:
        return cls([ParetoPoint.from_dict(d) for d in items])


@dataclass
class RunRecord:
    """Per-run cost accounting. Counters only ever grow during a run."""

    method: str
    problem: str
    seed: int = 0
    wall_time_ms: int = 0
    gradient_evals: int = 0
    objective_evals: int = 0
    hvp_applies: int = 0
    solver_iterations_total: int = 0
    points_generated: int = 0
    predictor_fallbacks: int = 0

    def to_dict(self) -> dict:
        return dict(self.__dict__)


@dataclass
class ValidationReport:
    problem: str
    gradient_errors: np.ndarray  # max relative error per objective
    hvp_error: float | None
    failures: list[str]
    grad_tol: float
    hvp_tol: float

    @property
    def passed(self) -> bool:
        if self.failures:
            return False
        if np.any(self.gradient_errors > self.grad_tol):
            return False
        return self.hvp_error is None or self.hvp_error <= self.hvp_tol

    def flagged_objectives(self) -> list[int]:
        return [i for i, e in enumerate(self.gradient_errors) if e > self.grad_tol]

    def summary(self) -> str:
        lines = [f"problem: {self.problem}"]
        for i, e in enumerate(self.gradient_errors):
            lines.append(f"  grad f_{i + 1}: max rel err {e:.3e}")
        if self.hvp_error is not None:
            lines.append(f"  hvp: max rel err {self.hvp_error:.3e}")
        for msg in self.failures:
            lines.append(f"  FAIL {msg}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


def _rel_err(approx: np.ndarray, ref: np.ndarray) -> float:
    scale = max(float(np.linalg.norm(ref)), float(np.linalg.norm(approx)) * 0.5, 1e-8)
    return float(np.linalg.norm(approx - ref) / scale)


def fd_gradients(problem: MooProblem, x: np.ndarray) -> np.ndarray:
    """Central-difference Jacobian, step ``1e-5 * (1 + |x_j|)``."""
    n = problem.n_dim
    out = np.empty((problem.n_obj, n))
    for j in range(n):
        h = 1e-5 * (1.0 + abs(x[j]))
        e = np.zeros(n)
        e[j] = h
        out[:, j] = (problem.evaluate(x + e) - problem.evaluate(x - e)) / (2 * h)
    return out


def validate_problem(
    problem: MooProblem,
    probe_count: int = 20,
    seed: int = 0,
    grad_tol: float = 1e-6,
    hvp_tol: float = 1e-4,
) -> ValidationReport:
    """Check analytic gradients (and HVPs, if present) against finite differences."""
    if probe_count < 1:
        raise ValueError("probe_count must be >= 1")
    rng = np.random.default_rng(seed)
    grad_err = np.zeros(problem.n_obj)
    hvp_err = 0.0 if problem.has_hvp else None
    failures: list[str] = []

    for _ in range(probe_count):
        x = np.asarray(problem.sample_point(rng), dtype=np.float64)
        f = np.asarray(problem.evaluate(x), dtype=np.float64)
        g = np.asarray(problem.gradients(x), dtype=np.float64)
        if not (np.all(np.isfinite(f)) and np.all(np.isfinite(g))):
            failures.append(f"non-finite value at x={x.tolist()}")
            continue
        g_fd = fd_gradients(problem, x)
        for i in range(problem.n_obj):
            grad_err[i] = max(grad_err[i], _rel_err(g[i], g_fd[i]))

        if problem.has_hvp:
            alpha = rng.dirichlet(np.ones(problem.n_obj))
            v = rng.standard_normal(problem.n_dim)
            hv = np.asarray(problem.hvp(x, alpha, v), dtype=np.float64)
            h = 1e-5 / max(1.0, float(np.linalg.norm(v)))
            hv_fd = alpha @ (problem.gradients(x + h * v) - problem.gradients(x - h * v)) / (2 * h)
            if not np.all(np.isfinite(hv)):
                failures.append(f"non-finite hvp at x={x.tolist()}")
                continue
            hvp_err = max(hvp_err, _rel_err(hv, hv_fd))

    return ValidationReport(problem.name, grad_err, hvp_err, failures, grad_tol, hvp_tol)
