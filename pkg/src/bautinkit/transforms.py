"""New families from old: products, exponentials and derivatives.

Each transform returns a Callback family with batched coefficients and a
coefficient majorant derived from the inputs' majorants, so tail bounds
stay certified.
"""

from __future__ import annotations

import math

import numpy as np

from .family import AnalyticFamily, Callback, DEFAULT_K_MAX
from .regions import ParameterBox


def _concat_boxes(a: ParameterBox, b: ParameterBox) -> ParameterBox:
    return ParameterBox(a.centers + b.centers, a.radii + b.radii)


def product_box(a: ParameterBox, b: ParameterBox) -> ParameterBox:
    return _concat_boxes(a, b)


def _convolve_rows(A: np.ndarray, B: np.ndarray, kmax: int) -> np.ndarray:
    out = np.zeros((A.shape[0], kmax + 1), dtype=np.result_type(A, B))
    for i in range(kmax + 1):
        out[:, i:] += A[:, i, None] * B[:, : kmax + 1 - i]
    return out


def _majorant(fam: AnalyticFamily, bounds, kmax: int) -> np.ndarray:
    return np.asarray(fam.rule.majorant(np.asarray(bounds, dtype=float), kmax), dtype=float)


def product_family(f: AnalyticFamily, g: AnalyticFamily) -> AnalyticFamily:
    """(lam, nu) -> f_lam * g_nu on the product of the two regions."""
    n = f.dimension

    def batch(lam, kmax):
        return _convolve_rows(f.rule.coefficients(lam[:, :n], kmax),
                              g.rule.coefficients(lam[:, n:], kmax), kmax)

    def majorant(bounds, kmax):
        A = _majorant(f, bounds[:n], kmax)[None]
        B = _majorant(g, bounds[n:], kmax)[None]
        return _convolve_rows(A, B, kmax)[0]

    exact = None
    if f.exact_degree is not None and g.exact_degree is not None:
        exact = f.exact_degree + g.exact_degree
    rule = Callback(lambda k, lam: batch(lam[None], k)[0, k], math.inf, n + g.dimension,
                    batch=batch, majorant_fn=majorant, exact_degree=exact)
    return AnalyticFamily(rule, _concat_boxes(f.region, g.region),
                          default_degree=exact or DEFAULT_K_MAX, name=f"({f.name})*({g.name})")


def _exp_of_series(A: np.ndarray, kmax: int) -> np.ndarray:
    """Taylor coefficients of exp(sum_k A_k z^k) from n e_n = sum_j j A_j e_(n-j)."""
    e = np.zeros((A.shape[0], kmax + 1), dtype=A.dtype)
    e[:, 0] = np.exp(A[:, 0])
    j = np.arange(kmax + 1)
    for n in range(1, kmax + 1):
        e[:, n] = (j[1 : n + 1] * A[:, 1 : n + 1] * e[:, n - 1 :: -1][:, :n]).sum(axis=1) / n
    return e


def exp_family(f: AnalyticFamily) -> AnalyticFamily:
    """lam -> exp(f_lam); coefficients by the exponential recurrence.

    The majorant is exp applied to the majorant series of f, which
    dominates coefficientwise because every recurrence term is positive.
    """
    def batch(lam, kmax):
        return _exp_of_series(f.rule.coefficients(lam, kmax), kmax)

    def majorant(bounds, kmax):
        return _exp_of_series(_majorant(f, bounds, kmax)[None], kmax)[0].real

    rule = Callback(lambda k, lam: batch(lam[None], k)[0, k], math.inf, f.dimension,
                    batch=batch, majorant_fn=majorant)
    return AnalyticFamily(rule, f.region, name=f"exp({f.name})")


def derivative_family(f: AnalyticFamily) -> AnalyticFamily:
    """lam -> f_lam'; a_k becomes (k + 1) a_(k+1)."""
    def batch(lam, kmax):
        A = f.rule.coefficients(lam, kmax + 1)
        return A[:, 1:] * np.arange(1, kmax + 2)

    def majorant(bounds, kmax):
        return _majorant(f, bounds, kmax + 1)[1:] * np.arange(1, kmax + 2)

    exact = None if f.exact_degree is None else max(f.exact_degree - 1, 0)
    rule = Callback(lambda k, lam: batch(lam[None], k)[0, k], math.inf, f.dimension,
                    batch=batch, majorant_fn=majorant, exact_degree=exact)
    return AnalyticFamily(rule, f.region, default_degree=exact or DEFAULT_K_MAX,
                          name=f"d/dz({f.name})")
