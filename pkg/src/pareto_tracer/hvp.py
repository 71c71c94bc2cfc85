"""Linear operators for the predictor system and its right-hand side.

Four curvature models are available:

* ``EXACT``: the problem's analytic ``sum_i alpha_i H_i(x) v``.
* ``FD_EXACT``: the same product by central differences of the weighted
  gradient; two gradient-set evaluations per application.
* ``GN_SUM``: ``sum_i alpha_i g_i g_i^T + mu I`` (one rank-one term per
  objective).
* ``GN_RANK_ONE``: ``J J^T + mu I`` with ``J = sum_i alpha_i g_i``.

The Gauss-Newton forms only touch the cached gradients, so applying them costs
no problem evaluations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import MooProblem
from .krylov import LinearOperator


class HvpMode(str, enum.Enum):
    EXACT = "exact"
    FD_EXACT = "fd"
    GN_RANK_ONE = "gn-rank-one"
    GN_SUM = "gn-sum"

    @property
    def is_gauss_newton(self) -> bool:
        return self in (HvpMode.GN_RANK_ONE, HvpMode.GN_SUM)


@dataclass(frozen=True)
class PredictorWeights:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=np.float64)
        beta = np.asarray(self.beta, dtype=np.float64)
        if alpha.shape != beta.shape:
            raise ValueError("alpha and beta must have the same length")
        if np.any(alpha < 0) or abs(alpha.sum() - 1.0) > 1e-8:
            raise ValueError("alpha must lie on the probability simplex")
        if np.any(np.abs(beta) > 1) or not np.any(beta != 0):
            raise ValueError("beta must be a nonzero vector in [-1, 1]^m")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)


def exact_hvp_operator(problem: MooProblem, x, alpha, finite_difference: bool = False) -> LinearOperator:
    """Weighted Hessian operator at ``x``, analytic or by central differences."""
    x = np.asarray(x, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)

    if not finite_difference:
        return LinearOperator(problem.n_dim, lambda v: problem.hvp(x, alpha, v))

    def fd_matvec(v):
        h = 1e-5 / max(1.0, float(np.linalg.norm(v)))
        gp = alpha @ problem.gradients(x + h * v)
        gm = alpha @ problem.gradients(x - h * v)
        return (gp - gm) / (2 * h)

    return LinearOperator(problem.n_dim, fd_matvec)


def gn_rank_one_operator(grads, alpha, mu: float = 0.0) -> LinearOperator:
    """``v -> <J, v> J + mu v`` with ``J`` the alpha-weighted gradient."""
    j = np.asarray(alpha, dtype=np.float64) @ np.asarray(grads, dtype=np.float64)
    j.flags.writeable = False
    return LinearOperator(j.size, lambda v: (j @ v) * j + mu * v)


def gn_sum_operator(grads, alpha, mu: float = 0.0) -> LinearOperator:
    """``v -> sum_i alpha_i <g_i, v> g_i + mu v``."""
    g = np.array(grads, dtype=np.float64)
    a = np.asarray(alpha, dtype=np.float64)
    g.flags.writeable = False
    return LinearOperator(g.shape[1], lambda v: (a * (g @ v)) @ g + mu * v)


def predictor_rhs(grads, beta) -> np.ndarray:
    """``J^T beta = sum_i beta_i g_i``."""
    grads = np.asarray(grads, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (grads.shape[0],):
        raise ValueError("beta length must equal the number of objectives")
    return beta @ grads


def default_damping(grads, alpha, mode: HvpMode | str = HvpMode.GN_SUM) -> float:
    """``1e-6 * (trace(GN) / n + 1)`` for the selected Gauss-Newton form."""
    grads = np.asarray(grads, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    n = grads.shape[1]
    if HvpMode(mode) is HvpMode.GN_RANK_ONE:
        j = alpha @ grads
        trace = float(j @ j)
    else:
        trace = float(alpha @ np.einsum("ij,ij->i", grads, grads))
    return 1e-6 * (trace / n + 1.0)


def build_operator(
    problem: MooProblem,
    x,
    grads,
    alpha,
    mode: HvpMode | str,
    mu: float | None = None,
) -> LinearOperator:
    """Operator for ``mode``; ``mu=None`` picks :func:`default_damping` for GN forms."""
    mode = HvpMode(mode)
    if mode is HvpMode.EXACT:
        return exact_hvp_operator(problem, x, alpha)
    if mode is HvpMode.FD_EXACT:
        return exact_hvp_operator(problem, x, alpha, finite_difference=True)
    if mu is None:
        mu = default_damping(grads, alpha, mode)
    if mu < 0:
        raise ValueError("damping must be non-negative")
    if mode is HvpMode.GN_RANK_ONE:
        return gn_rank_one_operator(grads, alpha, mu)
    return gn_sum_operator(grads, alpha, mu)
