"""Dominance, front filtering and front-quality indicators (minimisation)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree


@dataclass(frozen=True)
class FrontMetrics:
    hypervolume: float
    generational_distance: float | None
    spread: float
    point_count: int
    reference_point: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "hypervolume": self.hypervolume,
            "generational_distance": self.generational_distance,
            "spread": self.spread,
            "point_count": self.point_count,
            "reference_point": list(self.reference_point),
        }


def dominates(a, b) -> bool:
    """True iff ``a`` is no worse than ``b`` everywhere and strictly better somewhere."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a <= b) and np.any(a < b))


def _objectives(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        return np.atleast_2d(np.asarray(points, dtype=np.float64)) if points.size else np.empty((0, 0))
    rows = [np.asarray(getattr(p, "f", p), dtype=np.float64) for p in points]
    return np.vstack(rows) if rows else np.empty((0, 0))


def nondominated_mask(f: np.ndarray) -> np.ndarray:
    """Boolean mask of the first occurrence of every non-dominated row."""
    f = np.asarray(f, dtype=np.float64)
    k = len(f)
    keep = np.zeros(k, dtype=bool)
    if k == 0:
        return keep
    if f.shape[1] == 2:
        # lexicographic sweep; stable sort keeps the earliest duplicate first
        order = np.lexsort((np.arange(k), f[:, 1], f[:, 0]))
        best = np.inf
        for i in order:
            if f[i, 1] < best:
                keep[i] = True
                best = f[i, 1]
        return keep
    for i in range(k):
        le = np.all(f <= f[i], axis=1)
        lt = np.any(f < f[i], axis=1)
        if np.any(le & lt):
            continue
        same = np.all(f == f[i], axis=1)
        keep[i] = not np.any(same[:i])
    return keep


def pareto_filter(points: Sequence) -> list:
    """Non-dominated subset in input order; exact duplicates keep the first.

    Items may be ``ParetoPoint``-like (with an ``f`` attribute) or plain
    objective vectors.
    """
    points = list(points)
    if not points:
        return []
    mask = nondominated_mask(_objectives(points))
    return [p for p, k in zip(points, mask) if k]


def hypervolume_2d(front, reference) -> float:
    """Area dominated by ``front`` and bounded by ``reference`` (two objectives)."""
    ref = np.asarray(reference, dtype=np.float64)
    f = _objectives(front) if len(front) else np.empty((0, 2))
    if len(f) == 0:
        return 0.0
    if f.shape[1] != 2 or ref.shape != (2,):
        raise ValueError("hypervolume_2d needs two objectives")
    bad = ~(np.all(f <= ref, axis=1) & np.any(f < ref, axis=1))
    if np.any(bad):
        row = f[np.argmax(bad)]
        raise ValueError(f"point {row.tolist()} does not dominate reference {ref.tolist()}")
    f = f[nondominated_mask(f)]
    f = f[np.argsort(f[:, 0], kind="stable")]
    right = np.append(f[1:, 0], ref[0])
    return float(np.sum((right - f[:, 0]) * (ref[1] - f[:, 1])))


def clipped_hypervolume_2d(front, reference) -> float:
    """Like :func:`hypervolume_2d`, but points outside the reference box count zero."""
    f = _objectives(front) if len(front) else np.empty((0, 2))
    if len(f) == 0:
        return 0.0
    ref = np.asarray(reference, dtype=np.float64)
    inside = np.all(f <= ref, axis=1) & np.any(f < ref, axis=1)
    return hypervolume_2d(f[inside], ref)


def generational_distance(front, truth) -> float:
    """Mean Euclidean distance from each front point to its nearest truth point."""
    f = _objectives(front)
    t = _objectives(truth)
    if len(t) == 0:
        raise ValueError("truth front is empty")
    if len(f) == 0:
        raise ValueError("front is empty")
    if f.shape[1] != t.shape[1]:
        raise ValueError("front and truth have different objective counts")
    dists, _ = cKDTree(t).query(f)
    return float(np.mean(dists))


def spread(front) -> float:
    """Largest Euclidean gap between neighbours after sorting by the first objective."""
    f = _objectives(front)
    if len(f) < 2:
        return 0.0
    f = f[np.argsort(f[:, 0], kind="stable")]
    return float(np.linalg.norm(np.diff(f, axis=0), axis=1).max())


def shared_reference(*fronts, margin: float = 0.1) -> np.ndarray:
    """Componentwise max over all fronts, pushed out by ``margin`` of the range."""
    stacked = np.vstack([_objectives(fr) for fr in fronts if len(fr)])
    hi = stacked.max(axis=0)
    lo = stacked.min(axis=0)
    span = hi - lo
    span = np.where(span > 0, span, np.maximum(np.abs(hi), 1.0))
    return hi + margin * span


def front_metrics(front, reference, truth=None) -> FrontMetrics:
    f = _objectives(front)
    f = f[nondominated_mask(f)] if len(f) else f
    hv = hypervolume_2d(f, reference) if f.size and f.shape[1] == 2 else float("nan")
    gd = generational_distance(f, truth) if truth is not None and len(f) else None
    return FrontMetrics(hv, gd, spread(f), int(len(f)), tuple(float(r) for r in reference))
