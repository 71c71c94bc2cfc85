"""Benchmark problems with analytic gradients and Hessian-vector products."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import MooProblem


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=np.float64)
    a.flags.writeable = False
    return a


class UnsupportedFront(ValueError):
    pass


class QuadraticBiObjective(MooProblem):
    """``f_i(x) = 1/2 (x - c_i)^T A_i (x - c_i)`` for ``i = 1, 2``.

    With identity curvatures the Pareto set is the segment ``[c1, c2]``.
    Starting points are drawn around the segment midpoint with isotropic
    Gaussian noise of standard deviation ``start_scale``.
    """

    name = "quadratic"
    has_hvp = True

    def __init__(self, c1, c2, a1=None, a2=None, start_scale: float = 0.005):
        self.c1 = _frozen(c1)
        self.c2 = _frozen(c2)
        if self.c1.shape != self.c2.shape or self.c1.ndim != 1:
            raise ValueError("centers must be vectors of equal length")
        n = self.c1.size
        self.a1 = None if a1 is None else _frozen(a1)
        self.a2 = None if a2 is None else _frozen(a2)
        for a in (self.a1, self.a2):
            if a is not None and a.shape != (n, n):
                raise ValueError("curvature matrices must be n x n")
        self.start_scale = float(start_scale)

    @classmethod
    def default(cls, n: int = 50, separation: float = 10.0, start_scale: float = 0.005) -> QuadraticBiObjective:
        """Centers at ``+-separation/2`` along the all-ones direction."""
        u = np.ones(n) / np.sqrt(n)
        return cls(-0.5 * separation * u, 0.5 * separation * u, start_scale=start_scale)

    @property
    def n_dim(self) -> int:
        return self.c1.size

    @property
    def n_obj(self) -> int:
        return 2

    @property
    def identity_curvature(self) -> bool:
        return self.a1 is None and self.a2 is None

    def _mul(self, a, v):
        return v if a is None else a @ v

    def evaluate(self, x):
        x = np.asarray(x, dtype=np.float64)
        d1, d2 = x - self.c1, x - self.c2
        return np.array([0.5 * d1 @ self._mul(self.a1, d1), 0.5 * d2 @ self._mul(self.a2, d2)])

    def gradients(self, x):
        x = np.asarray(x, dtype=np.float64)
        return np.vstack([self._mul(self.a1, x - self.c1), self._mul(self.a2, x - self.c2)])

    def hvp(self, x, alpha, v):
        v = np.asarray(v, dtype=np.float64)
        return alpha[0] * self._mul(self.a1, v) + alpha[1] * self._mul(self.a2, v)

    def pareto_point(self, t: float) -> np.ndarray:
        """Minimiser of ``(1 - t) f1 + t f2``."""
        if self.identity_curvature:
            return (1 - t) * self.c1 + t * self.c2
        n = self.n_dim
        a1 = np.eye(n) if self.a1 is None else self.a1
        a2 = np.eye(n) if self.a2 is None else self.a2
        return np.linalg.solve((1 - t) * a1 + t * a2, (1 - t) * a1 @ self.c1 + t * a2 @ self.c2)

    def distance_to_pareto_set(self, x) -> float:
        """Euclidean distance to the segment (identity curvatures only)."""
        if not self.identity_curvature:
            raise UnsupportedFront("distance is only closed-form for identity curvatures")
        seg = self.c2 - self.c1
        denom = float(seg @ seg)
        t = 0.0 if denom == 0 else float(np.clip((x - self.c1) @ seg / denom, 0.0, 1.0))
        return float(np.linalg.norm(x - self.c1 - t * seg))

    def sample_point(self, rng):
        mid = 0.5 * (self.c1 + self.c2)
        return mid + rng.standard_normal(self.n_dim)

    def initial_point(self, rng):
        mid = 0.5 * (self.c1 + self.c2)
        return mid + self.start_scale * rng.standard_normal(self.n_dim)


class FonsecaFleming(MooProblem):
    """``f_{1,2} = 1 - exp(-sum_j (x_j -+ 1/sqrt(n))^2)``; concave front."""

    name = "fonseca-fleming"
    has_hvp = True

    def __init__(self, n: int = 3):
        if n < 1:
            raise ValueError("n must be >= 1")
        self.n = n
        self.shift = 1.0 / np.sqrt(n)

    @property
    def n_dim(self) -> int:
        return self.n

    @property
    def n_obj(self) -> int:
        return 2

    def _parts(self, x):
        x = np.asarray(x, dtype=np.float64)
        d1, d2 = x - self.shift, x + self.shift
        return d1, d2, np.exp(-d1 @ d1), np.exp(-d2 @ d2)

    def evaluate(self, x):
        _, _, e1, e2 = self._parts(x)
        return np.array([1.0 - e1, 1.0 - e2])

    def gradients(self, x):
        d1, d2, e1, e2 = self._parts(x)
        return np.vstack([2 * e1 * d1, 2 * e2 * d2])

    def hvp(self, x, alpha, v):
        d1, d2, e1, e2 = self._parts(x)
        v = np.asarray(v, dtype=np.float64)
        h1 = e1 * (2 * v - 4 * d1 * (d1 @ v))
        h2 = e2 * (2 * v - 4 * d2 * (d2 @ v))
        return alpha[0] * h1 + alpha[1] * h2

    def pareto_point(self, t: float) -> np.ndarray:
        """``t = 0`` minimises f1, ``t = 1`` minimises f2."""
        return np.full(self.n, self.shift * (1 - 2 * t))

    def sample_point(self, rng):
        return rng.uniform(-2 * self.shift, 2 * self.shift, self.n)

    def initial_point(self, rng):
        return rng.uniform(-self.shift, self.shift, self.n)


@dataclass(frozen=True)
class FairnessDataset:
    features: np.ndarray  # (samples, d)
    labels: np.ndarray  # 0/1
    groups: np.ndarray  # 0/1

    def to_csv(self, path) -> None:
        d = self.features.shape[1]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{j}" for j in range(d)] + ["label", "group"])
            for row, y, a in zip(self.features, self.labels, self.groups):
                w.writerow([repr(float(v)) for v in row] + [int(y), int(a)])

    @classmethod
    def from_csv(cls, path) -> FairnessDataset:
        with open(Path(path), newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        d = len(header) - 2
        feats = np.array([[float(v) for v in r[:d]] for r in body])
        labels = np.array([int(r[d]) for r in body])
        groups = np.array([int(r[d + 1]) for r in body])
        return cls(_frozen(feats), labels, groups)


def generate_fairness_dataset(
    seed: int = 0,
    samples: int = 500,
    features: int = 20,
    group_imbalance: float = 0.3,
    base_noise: float = 0.05,
    group_fraction: float = 0.5,
) -> FairnessDataset:
    """Linearly generated labels; group 1 gets a higher label-flip rate.

    Labels in group 0 flip with probability ``base_noise`` and labels in
    group 1 with ``base_noise + group_imbalance``.
    """
    if samples < 20 or features < 1:
        raise ValueError("need samples >= 20 and features >= 1")
    if not 0 <= base_noise + group_imbalance <= 1:
        raise ValueError("flip rates must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, features))
    groups = (rng.random(samples) < group_fraction).astype(np.int64)
    if groups.min() == groups.max():
        raise ValueError("degenerate dataset: one group is empty")
    w_true = 2.0 * rng.standard_normal(features) / np.sqrt(features)
    labels = (x @ w_true + 0.5 * rng.standard_normal(samples) > 0).astype(np.int64)
    flip_rate = base_noise + group_imbalance * groups
    labels ^= (rng.random(samples) < flip_rate).astype(np.int64)
    return FairnessDataset(_frozen(x), labels, groups)


class SyntheticFairness(MooProblem):
    """Logistic scorer; f1 is mean cross-entropy, f2 the squared group loss gap.

    Parameters are ``[weights (d), bias]``. Starting points either perturb
    the accuracy-only optimum (``start="pretrained"``, mimicking fine-tuning a
    trained model) or are small random weights (``start="random"``).
    """

    name = "fairness"
    has_hvp = True

    def __init__(self, dataset: FairnessDataset, start_scale: float = 0.01, start: str = "pretrained"):
        if start not in ("pretrained", "random"):
            raise ValueError(f"unknown start {start!r}")
        self.dataset = dataset
        z = np.hstack([dataset.features, np.ones((len(dataset.labels), 1))])
        self.z = _frozen(z)
        self.y = _frozen(dataset.labels)
        g = np.asarray(dataset.groups)
        if g.min() == g.max():
            raise ValueError("both groups must be present")
        # per-sample weights that turn a sum into each group's mean
        self.w0 = _frozen((g == 0) / np.sum(g == 0))
        self.w1 = _frozen((g == 1) / np.sum(g == 1))
        self.start_scale = float(start_scale)
        self.start = start
        self._accuracy_optimum = None

    @classmethod
    def default(cls, seed: int = 0, samples: int = 500, features: int = 20, group_imbalance: float = 0.3):
        return cls(generate_fairness_dataset(seed, samples, features, group_imbalance))

    def accuracy_optimum(self, tol: float = 1e-10, max_iters: int = 100) -> np.ndarray:
        """Minimiser of the cross-entropy alone, by damped Newton steps.

        A tiny ridge keeps the Newton system solvable on separable data.
        """
        if self._accuracy_optimum is None:
            x = np.zeros(self.n_dim)
            ridge = 1e-8 * np.eye(self.n_dim)
            for _ in range(max_iters):
                _, p = self._forward(x)
                grad = self.z.T @ (p - self.y) / len(p)
                if np.linalg.norm(grad) <= tol:
                    break
                hess = (self.z.T * (p * (1 - p))) @ self.z / len(p) + ridge
                x = x - np.linalg.solve(hess, grad)
            self._accuracy_optimum = _frozen(x)
        return self._accuracy_optimum.copy()

    @property
    def n_dim(self) -> int:
        return self.z.shape[1]

    @property
    def n_obj(self) -> int:
        return 2

    def _forward(self, x):
        s = self.z @ np.asarray(x, dtype=np.float64)
        losses = np.logaddexp(0.0, s) - self.y * s
        p = 0.5 * (1.0 + np.tanh(0.5 * s))
        return losses, p

    def evaluate(self, x):
        losses, _ = self._forward(x)
        gap = self.w0 @ losses - self.w1 @ losses
        return np.array([losses.mean(), gap * gap])

    def gradients(self, x):
        losses, p = self._forward(x)
        resid = p - self.y
        g1 = self.z.T @ resid / len(resid)
        gap = self.w0 @ losses - self.w1 @ losses
        dgap = self.z.T @ ((self.w0 - self.w1) * resid)
        return np.vstack([g1, 2 * gap * dgap])

    def hvp(self, x, alpha, v):
        losses, p = self._forward(x)
        v = np.asarray(v, dtype=np.float64)
        curv = p * (1 - p)
        zv = self.z @ v
        h1v = self.z.T @ (curv * zv) / len(curv)
        gap = self.w0 @ losses - self.w1 @ losses
        dw = self.w0 - self.w1
        dgap = self.z.T @ (dw * (p - self.y))
        hgap_v = self.z.T @ (dw * curv * zv)
        h2v = 2 * (dgap @ v) * dgap + 2 * gap * hgap_v
        return alpha[0] * h1v + alpha[1] * h2v

    def sample_point(self, rng):
        return rng.standard_normal(self.n_dim) / np.sqrt(self.n_dim)

    def initial_point(self, rng):
        noise = self.start_scale * rng.standard_normal(self.n_dim)
        if self.start == "random":
            return noise
        return self.accuracy_optimum() + noise


def analytic_front(problem: MooProblem, resolution: int = 100, numerical: bool = False) -> np.ndarray:
    """Objective vectors at ``t = 0, 1/R, ..., 1`` along the known Pareto set.

    Quadratics with non-identity curvature need ``numerical=True``, which
    solves the weighted-sum minimiser for every ``t``.
    """
    if resolution < 1:
        raise ValueError("resolution must be >= 1")
    ts = np.linspace(0.0, 1.0, resolution + 1)
    if isinstance(problem, QuadraticBiObjective):
        if problem.identity_curvature:
            sq = float(np.sum((problem.c2 - problem.c1) ** 2))
            return np.column_stack([0.5 * ts**2 * sq, 0.5 * (1 - ts) ** 2 * sq])
        if not numerical:
            raise UnsupportedFront("non-identity curvatures need numerical=True")
    elif not isinstance(problem, FonsecaFleming):
        raise UnsupportedFront(f"no known front for {problem.name}")
    return np.vstack([problem.evaluate(problem.pareto_point(t)) for t in ts])


def make_problem(name: str, **kwargs) -> MooProblem:
    """Build a suite problem by name; keyword arguments go to its constructor."""
    if name == "quadratic":
        return QuadraticBiObjective.default(**kwargs)
    if name == "fonseca-fleming":
        return FonsecaFleming(**kwargs)
    if name == "fairness":
        dataset_path = kwargs.pop("dataset", None)
        opts = {k: kwargs.pop(k) for k in ("start_scale", "start") if k in kwargs}
        if dataset_path is not None:
            return SyntheticFairness(FairnessDataset.from_csv(dataset_path), **opts)
        return SyntheticFairness(generate_fairness_dataset(**kwargs), **opts)
    raise ValueError(f"unknown problem {name!r}")


PROBLEM_NAMES = ("quadratic", "fonseca-fleming", "fairness")
