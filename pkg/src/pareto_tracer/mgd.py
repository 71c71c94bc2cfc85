"""Min-norm common descent direction and the multi-gradient descent loop."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import MooProblem, as_param, checked_evaluate, checked_gradients

DIVERGENCE_LIMIT = 1e12


@dataclass(frozen=True)
class MgdConfig:
    step_size: float = 0.005
    max_iters: int = 75
    stationarity_tol: float = 1e-6

    def __post_init__(self):
        if not (self.step_size > 0 and self.stationarity_tol > 0):
            raise ValueError("step_size and stationarity_tol must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")


class MgdDivergence(ArithmeticError):
    def __init__(self, message: str, trace: list[np.ndarray]):
        super().__init__(message)
        self.trace = trace


def project_to_simplex(y: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{lam >= 0, sum(lam) = 1}`` (sort-based)."""
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1)
    return np.maximum(y - theta, 0.0)


def _polish(gram: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Solve the QP exactly on the support of ``lam``.

    The projected-gradient iterate identifies the active face; the KKT system
    restricted to that face removes the remaining iteration error. The
    candidate is only kept when it is feasible and no worse.
    """
    support = lam > 1e-9
    k = int(support.sum())
    if k < 2:
        return lam
    g = gram[np.ix_(support, support)]
    kkt = np.zeros((k + 1, k + 1))
    kkt[:k, :k] = g
    kkt[:k, k] = 1.0
    kkt[k, :k] = 1.0
    rhs = np.zeros(k + 1)
    rhs[k] = 1.0
    try:
        sol = np.linalg.lstsq(kkt, rhs, rcond=None)[0]
    except np.linalg.LinAlgError:
        return lam
    cand = np.zeros_like(lam)
    cand[support] = sol[:k]
    if np.any(cand < 0) or not np.all(np.isfinite(cand)):
        return lam
    cand /= cand.sum()
    if cand @ gram @ cand <= lam @ gram @ lam:
        return cand
    return lam


def min_norm_weights(grads) -> tuple[np.ndarray, np.ndarray]:
    """Simplex weights minimising ``||sum_i lam_i g_i||``, and that combination.

    Returns ``(lam, d)``. Ties (identical or all-zero gradients) resolve to
    uniform weights.
    """
    g = np.asarray(grads, dtype=np.float64)
    m = g.shape[0]
    if not np.all(np.isfinite(g)):
        raise ValueError("gradients must be finite")
    if m == 1:
        return np.ones(1), g[0].copy()
    uniform = np.full(m, 1.0 / m)
    if not np.any(g):
        return uniform, np.zeros(g.shape[1])

    if m == 2:
        diff = g[0] - g[1]
        denom = float(diff @ diff)
        if denom == 0.0:
            return uniform, g[0].copy()
        t = float(np.clip((g[1] - g[0]) @ g[1] / denom, 0.0, 1.0))
        lam = np.array([t, 1.0 - t])
        return lam, lam @ g

    gram = g @ g.T
    lipschitz = float(np.linalg.eigvalsh(gram)[-1])
    lam = uniform
    obj = lam @ gram @ lam
    for _ in range(1000):
        lam_new = project_to_simplex(lam - (gram @ lam) / lipschitz)
        obj_new = lam_new @ gram @ lam_new
        lam, done = lam_new, obj - obj_new < 1e-12
        obj = obj_new
        if done:
            break
    lam = _polish(gram, lam)
    return lam, lam @ g


def mgd_step(problem: MooProblem, x, step_size: float):
    """One step along the negative min-norm direction. Returns ``(x_next, ||d||)``."""
    if not step_size > 0:
        raise ValueError("step_size must be positive")
    x = np.asarray(x, dtype=np.float64)
    _, d = min_norm_weights(checked_gradients(problem, x))
    return x - step_size * d, float(np.linalg.norm(d))


@dataclass
class MgdResult:
    x: np.ndarray
    iterations: int
    converged: bool
    trace: list[np.ndarray] | None = None
    direction_norms: list[float] = field(default_factory=list)
    iterates: list[np.ndarray] | None = None


def mgd_run(problem: MooProblem, x0, config: MgdConfig = MgdConfig(), record_trace: bool = False) -> MgdResult:
    """Iterate :func:`mgd_step` until ``||d|| <= stationarity_tol`` or the budget runs out.

    With ``record_trace`` the objective vector and the iterate at ``x0`` and
    after every step are kept (``iterations + 1`` entries each).
    """
    x = as_param(problem, x0).copy()
    trace = [checked_evaluate(problem, x)] if record_trace else None
    iterates = [x.copy()] if record_trace else None
    norms: list[float] = []
    converged = False
    iterations = 0
    while iterations < config.max_iters:
        _, d = min_norm_weights(checked_gradients(problem, x))
        dnorm = float(np.linalg.norm(d))
        if dnorm <= config.stationarity_tol:
            converged = True
            break
        x = x - config.step_size * d
        iterations += 1
        norms.append(dnorm)
        f = checked_evaluate(problem, x)
        if record_trace:
            trace.append(f)
            iterates.append(x.copy())
        if np.any(np.abs(f) > DIVERGENCE_LIMIT):
            raise MgdDivergence(f"objective exceeded {DIVERGENCE_LIMIT:g}", trace or [f])
    return MgdResult(x, iterations, converged, trace, norms, iterates)
