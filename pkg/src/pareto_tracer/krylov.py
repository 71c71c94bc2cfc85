"""Matrix-free solvers for symmetric systems ``H v = b``.

All solvers start from ``v0 = 0``, so the initial residual is ``b`` and no
product with ``H`` is spent on it. Convergence is judged on the recursively
updated residual norm, never on a recomputed ``||b - H v||``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass
class LinearOperator:
    """Square linear map given only through its action ``apply(v) -> H v``."""

    dim: int
    matvec: Callable[[np.ndarray], np.ndarray]

    def apply(self, v: np.ndarray) -> np.ndarray:
        out = np.asarray(self.matvec(v), dtype=np.float64)
        if not np.all(np.isfinite(out)):
            raise FloatingPointError("linear operator produced non-finite values")
        return out

    def __matmul__(self, v):
        return self.apply(v)

    @classmethod
    def from_matrix(cls, a) -> LinearOperator:
        a = np.asarray(a, dtype=np.float64)
        return cls(a.shape[0], lambda v: a @ v)

    def to_matrix(self) -> np.ndarray:
        """Dense assembly by applying to unit vectors (testing only)."""
        return np.column_stack([self.apply(e) for e in np.eye(self.dim)])


class Solver(str, enum.Enum):
    CG = "cg"
    CR = "cr"
    MINRES = "minres"


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-6
    max_iter: int = 50
    record_residuals: bool = True

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass
class SolveReport:
    iterations_used: int = 0
    final_residual_norm: float = 0.0
    residual_history: list[float] | None = field(default_factory=list)
    converged: bool = False
    matvec_count: int = 0


class KrylovBreakdown(ArithmeticError):
    """Solver hit a zero denominator; carries the partial iterate."""

    def __init__(self, message: str, solution: np.ndarray, report: SolveReport):
        super().__init__(message)
        self.solution = solution
        self.report = report


def _check(op: LinearOperator, b) -> np.ndarray:
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (op.dim,):
        raise ValueError(f"rhs has shape {b.shape}, operator dim is {op.dim}")
    return b


def _finish(report: SolveReport, rnorm: float, config: SolverConfig) -> SolveReport:
    report.final_residual_norm = float(rnorm)
    report.converged = bool(rnorm <= config.tol)
    if not config.record_residuals:
        report.residual_history = None
    return report


def cg_solve(op: LinearOperator, b, config: SolverConfig = SolverConfig()):
    """Conjugate gradients. Returns ``(v, report)``."""
    b = _check(op, b)
    report = SolveReport()
    v = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rr = float(r @ r)
    rnorm = np.sqrt(rr)
    report.residual_history.append(rnorm)

    while report.iterations_used < config.max_iter and rnorm > config.tol:
        hp = op.apply(p)
        report.matvec_count += 1
        php = float(p @ hp)
        if php == 0.0:
            _finish(report, rnorm, config)
            raise KrylovBreakdown("CG breakdown: p^T H p = 0", v, report)
        alpha = rr / php
        v = v + alpha * p
        r = r - alpha * hp
        rr_new = float(r @ r)
        beta = rr_new / rr
        p = r + beta * p
        rr = rr_new
        rnorm = np.sqrt(rr)
        report.iterations_used += 1
        report.residual_history.append(rnorm)

    return v, _finish(report, rnorm, config)


def cr_solve(op: LinearOperator, b, config: SolverConfig = SolverConfig()):
    """Conjugate residuals, one operator product per iteration after the first.

    ``H p`` is carried by the recurrence ``H p_new = H r_new + beta H p``.
    """
    b = _check(op, b)
    report = SolveReport()
    v = np.zeros_like(b)
    r = b.copy()
    rnorm = float(np.linalg.norm(r))
    report.residual_history.append(rnorm)
    if rnorm <= config.tol:
        return v, _finish(report, rnorm, config)

    p = r.copy()
    hr = op.apply(r)
    report.matvec_count += 1
    hp = hr.copy()
    rhr = float(hr @ r)

    while report.iterations_used < config.max_iter and rnorm > config.tol:
        hphp = float(hp @ hp)
        if hphp == 0.0 or rhr == 0.0:
            _finish(report, rnorm, config)
            raise KrylovBreakdown("CR breakdown: zero denominator", v, report)
        alpha = rhr / hphp
        v = v + alpha * p
        r = r - alpha * hp
        rnorm = float(np.linalg.norm(r))
        report.iterations_used += 1
        report.residual_history.append(rnorm)
        if rnorm <= config.tol or report.iterations_used >= config.max_iter:
            break
        hr = op.apply(r)
        report.matvec_count += 1
        rhr_new = float(hr @ r)
        beta = rhr_new / rhr
        p = r + beta * p
        hp = hr + beta * hp
        rhr = rhr_new

    return v, _finish(report, rnorm, config)


def minres_solve(op: LinearOperator, b, config: SolverConfig = SolverConfig()):
    """MINRES via Lanczos tridiagonalisation and Givens rotations.

    Works for indefinite symmetric operators. Only the two latest Lanczos
    vectors and two search directions are kept.
    """
    b = _check(op, b)
    report = SolveReport()
    x = np.zeros_like(b)
    beta1 = float(np.linalg.norm(b))
    report.residual_history.append(beta1)
    if beta1 <= config.tol:
        return x, _finish(report, beta1, config)

    eps = np.finfo(np.float64).eps
    r1 = b.copy()
    r2 = b.copy()
    y = b.copy()
    oldb = 0.0
    beta = beta1
    dbar = 0.0
    epsln = 0.0
    phibar = beta1
    cs, sn = -1.0, 0.0
    w = np.zeros_like(b)
    w2 = np.zeros_like(b)

    while report.iterations_used < config.max_iter and phibar > config.tol:
        if beta == 0.0:
            # Lanczos terminated with an invariant subspace but the residual
            # did not vanish: the operator is singular on it.
            _finish(report, phibar, config)
            raise KrylovBreakdown("MINRES breakdown: Lanczos beta = 0", x, report)
        v = y / beta
        y = op.apply(v)
        report.matvec_count += 1
        if report.iterations_used >= 1:
            y = y - (beta / oldb) * r1
        alfa = float(v @ y)
        y = y - (alfa / beta) * r2
        r1 = r2
        r2 = y
        oldb = beta
        beta = float(np.linalg.norm(y))

        oldeps = epsln
        delta = cs * dbar + sn * alfa
        gbar = sn * dbar - cs * alfa
        epsln = sn * beta
        dbar = -cs * beta
        gamma = float(np.hypot(gbar, beta))
        if gamma < eps:
            _finish(report, phibar, config)
            raise KrylovBreakdown("MINRES breakdown: singular tridiagonal", x, report)
        cs = gbar / gamma
        sn = beta / gamma
        phi = cs * phibar
        phibar = sn * phibar

        w1 = w2
        w2 = w
        w = (v - oldeps * w1 - delta * w2) / gamma
        x = x + phi * w
        report.iterations_used += 1
        report.residual_history.append(abs(phibar))

    return x, _finish(report, abs(phibar), config)


def solve(op: LinearOperator, b, solver: Solver | str, config: SolverConfig = SolverConfig()):
    solver = Solver(solver)
    fn = {Solver.CG: cg_solve, Solver.CR: cr_solve, Solver.MINRES: minres_solve}[solver]
    return fn(op, b, config)


def dense_solve_oracle(matrix, b) -> np.ndarray:
    """Direct solve of a small symmetric system; a test oracle only."""
    a = np.asarray(matrix, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if a.shape[0] > 500:
        raise ValueError("dense oracle is limited to n <= 500")
    try:
        return np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise np.linalg.LinAlgError(f"singular matrix: {exc}") from exc
