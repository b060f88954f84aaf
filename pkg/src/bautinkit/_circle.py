"""Sampled-and-refined extrema of |g| on circles."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize_scalar

GOLDEN_ANGLE = np.pi * (3 - np.sqrt(5))


def circle_points(radius: float, n: int, center: complex = 0j, offset: float = GOLDEN_ANGLE):
    theta = offset + 2 * np.pi * np.arange(n) / n
    return theta, center + radius * np.exp(1j * theta)


def circle_extremum(fn, radius: float, n: int, kind: str = "max", center: complex = 0j,
                    refine: int = 3, xatol: float = 1e-13) -> tuple[float, float]:
    """Extremum of ``|fn|`` on a circle: grid sample, then bounded Brent refinement.

    ``fn`` maps an array of points to complex values.  Returns
    ``(value, theta)``.  The ``refine`` best grid candidates are each
    polished on the bracket of neighbouring grid angles.
    """
    theta, z = circle_points(radius, n, center)
    vals = np.abs(fn(z))
    sign = -1.0 if kind == "max" else 1.0
    order = np.argsort(sign * vals)[:refine]
    best_val = vals[order[0]]
    best_theta = theta[order[0]]
    step = 2 * np.pi / n

    def objective(t):
        return sign * float(np.abs(fn(np.array([center + radius * np.exp(1j * t)])))[0])

    for i in order:
        res = minimize_scalar(objective, bounds=(theta[i] - step, theta[i] + step),
                              method="bounded", options={"xatol": xatol})
        val = sign * res.fun
        if (kind == "max" and val > best_val) or (kind == "min" and val < best_val):
            best_val, best_theta = val, res.x
    return float(best_val), float(best_theta)


def circle_max(fn, radius: float, n: int, center: complex = 0j) -> float:
    if radius == 0:
        return float(np.abs(fn(np.array([center])))[0])
    return circle_extremum(fn, radius, n, "max", center)[0]


def circle_min(fn, radius: float, n: int, center: complex = 0j) -> float:
    return circle_extremum(fn, radius, n, "min", center)[0]


def batched_circle_max(coeffs: np.ndarray, radius: float, n: int, iters: int = 40) -> np.ndarray:
    """Max of |sum_k c_sk z^k| on |z| = radius for every row s of ``coeffs``.

    Grid maximum followed by a vectorised golden-section search on the
    bracket around each row's best grid angle.
    """
    from .family import horner

    coeffs = np.asarray(coeffs, dtype=complex)
    theta = 2 * np.pi * np.arange(n) / n
    vals = np.abs(horner(coeffs, radius * np.exp(1j * theta)))
    idx = np.argmax(vals, axis=1)
    best = vals[np.arange(len(idx)), idx]
    step = 2 * np.pi / n
    lo = theta[idx] - step
    hi = theta[idx] + step
    g = (np.sqrt(5) - 1) / 2

    def f(t):
        z = radius * np.exp(1j * t)
        acc = np.zeros(len(t), dtype=complex)
        for k in range(coeffs.shape[1] - 1, -1, -1):
            acc = acc * z + coeffs[:, k]
        return np.abs(acc)

    for _ in range(iters):
        a = hi - g * (hi - lo)
        b = lo + g * (hi - lo)
        fa, fb = f(a), f(b)
        left = fa > fb
        hi = np.where(left, b, hi)
        lo = np.where(left, lo, a)
        best = np.maximum(best, np.maximum(fa, fb))
    return best
