"""Independent reference computations used only by the tests.

Each oracle takes a different route from the production code: brute force,
sampling, dense linear algebra or finite differences.
"""

from __future__ import annotations

import numpy as np


def random_spd(rng: np.random.Generator, n: int, shift: float = 1.0) -> np.ndarray:
    """``M^T M / n + shift * I``; the scaling keeps the spectrum roughly in ``[shift, shift + 4]``."""
    m = rng.standard_normal((n, n))
    return m.T @ m / n + shift * np.eye(n)


def brute_force_filter(rows) -> list[int]:
    """Indices of non-dominated rows by the O(n^2) pairwise definition; first duplicate wins."""
    rows = [tuple(map(float, r)) for r in rows]
    keep = []
    for i, a in enumerate(rows):
        dominated = any(
            all(b_k <= a_k for a_k, b_k in zip(a, b)) and any(b_k < a_k for a_k, b_k in zip(a, b))
            for b in rows
        )
        duplicate = any(rows[j] == a for j in range(i))
        if not dominated and not duplicate:
            keep.append(i)
    return keep


def monte_carlo_hypervolume(front, reference, samples: int = 1_000_000, seed: int = 0) -> float:
    """Fraction of uniform samples in the box [min(front), reference] that some point dominates."""
    f = np.asarray(front, dtype=np.float64)
    ref = np.asarray(reference, dtype=np.float64)
    lo = f.min(axis=0)
    rng = np.random.default_rng(seed)
    pts = lo + rng.random((samples, 2)) * (ref - lo)
    hit = np.zeros(samples, dtype=bool)
    for row in f:
        hit |= np.all(pts >= row, axis=1)
    return float(hit.mean() * np.prod(ref - lo))


def grid_min_norm(grads, resolution: int = 10_000) -> float:
    """Minimum of ||sum_i lam_i g_i||^2 over a simplex grid (m = 2 or 3)."""
    g = np.asarray(grads, dtype=np.float64)
    m = g.shape[0]
    if m == 2:
        t = np.linspace(0.0, 1.0, resolution + 1)
        d = np.outer(t, g[0]) + np.outer(1 - t, g[1])
        return float((d * d).sum(axis=1).min())
    if m == 3:
        best = np.inf
        ticks = np.linspace(0.0, 1.0, resolution + 1)
        for a in ticks:
            b = ticks[ticks <= 1 - a + 1e-15]
            c = np.clip(1 - a - b, 0.0, None)
            d = a * g[0] + np.outer(b, g[1]) + np.outer(c, g[2])
            best = min(best, float((d * d).sum(axis=1).min()))
        return best
    raise ValueError("grid oracle supports m = 2 or 3")


def central_difference_gradient(fun, x, h: float = 1e-6) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        out[j] = (fun(x + e) - fun(x - e)) / (2 * h)
    return out


def dense_gn_sum(grads, alpha, mu) -> np.ndarray:
    g = np.asarray(grads, dtype=np.float64)
    mat = mu * np.eye(g.shape[1])
    for a, row in zip(alpha, g):
        mat += a * np.outer(row, row)
    return mat


def distance_to_segment(x, a, b) -> float:
    x, a, b = (np.asarray(v, dtype=np.float64) for v in (x, a, b))
    ab = b - a
    t = np.clip((x - a) @ ab / (ab @ ab), 0.0, 1.0)
    return float(np.linalg.norm(x - (a + t * ab)))


def distance_to_curve(points, curve) -> np.ndarray:
    """Distance of each point to the polyline through ``curve`` (projection onto every segment)."""
    p = np.asarray(points, dtype=np.float64)
    c = np.asarray(curve, dtype=np.float64)
    a, b = c[:-1], c[1:]
    ab = b - a
    denom = np.maximum((ab * ab).sum(axis=1), 1e-300)
    out = np.empty(len(p))
    for i, x in enumerate(p):
        t = np.clip(((x - a) * ab).sum(axis=1) / denom, 0.0, 1.0)
        proj = a + t[:, None] * ab
        out[i] = np.sqrt(((proj - x) ** 2).sum(axis=1).min())
    return out

