"""Zero counting in closed disks and the growth-based multiplicity indicator.

Counting tracks the argument of the function along the circle instead of
integrating f'/f: with every consecutive phase step below pi/2 the total
change divided by 2 pi is an integer by construction.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._circle import circle_extremum, circle_max
from .errors import CentralParameter, NonConvergence, TailDomination, Unstable, ZeroOnContour
from .family import AnalyticFamily, horner

log = logging.getLogger(__name__)

PHASE_STEP = np.pi / 2
RESIDUAL_MAX = 0.25
ZERO_RTOL = 1e-12
SAMPLE_CAP = 2**20
CENTRAL_TOL = 1e-30
STABLE_TOL = 0.1
RETRY_FACTORS = (1.01, 0.99, 1.03, 0.97, 1.05)


@dataclass(frozen=True)
class ZeroCountResult:
    count: int
    contour_radius: float
    min_modulus_on_contour: float
    quadrature_residual: float
    samples_used: int
    degree_used: int | None = None
    tail_bound: float = 0.0


def winding_count(evaluator: Callable, radius: float, initial_samples: int = 64,
                  center: complex = 0j, error: float = 0.0, zero_rtol: float = ZERO_RTOL,
                  max_samples: int = SAMPLE_CAP) -> ZeroCountResult:
    """Number of zeros inside the circle ``|z - center| = radius``.

    ``evaluator`` maps an array of points to values; ``error`` is its
    certified absolute error on the contour.  Intervals whose phase step
    reaches pi/2 are bisected until none remain, then the whole grid is
    doubled once and the count must not change.
    """
    if initial_samples < 16:
        raise ValueError("initial_samples must be >= 16")
    if radius <= 0:
        raise ValueError("radius must be positive")

    theta = 2 * np.pi * np.arange(initial_samples) / initial_samples
    vals = np.asarray(evaluator(center + radius * np.exp(1j * theta)), dtype=complex)
    confirmed = None
    while True:
        theta, vals = _refine_phase(evaluator, theta, vals, radius, center, max_samples,
                                     zero_rtol, error)
        mod = np.abs(vals)
        vmax = float(mod.max())
        vmin = float(mod.min())
        if not vmax > 0 or vmin < zero_rtol * vmax or vmin <= error:
            raise ZeroOnContour(radius, vmin, vmax)
        steps = np.angle(np.roll(vals, -1) / vals)
        winding = float(steps.sum() / (2 * np.pi))
        count = int(round(winding))
        residual = abs(winding - count)
        if residual >= RESIDUAL_MAX:
            raise NonConvergence(f"winding {winding:.3f} not near an integer")
        if confirmed is not None and confirmed == count:
            break
        if len(theta) * 2 > max_samples:
            raise NonConvergence(f"sample cap {max_samples} reached")
        confirmed = count
        mids = theta + np.diff(np.append(theta, 2 * np.pi)) / 2
        mid_vals = np.asarray(evaluator(center + radius * np.exp(1j * mids)), dtype=complex)
        theta = np.column_stack([theta, mids]).ravel()
        vals = np.column_stack([vals, mid_vals]).ravel()
    if count < 0:
        raise NonConvergence(f"negative winding {count} for an analytic function")
    return ZeroCountResult(count, radius, vmin, residual, len(theta))


def _refine_phase(evaluator, theta, vals, radius, center, max_samples, zero_rtol, error):
    while True:
        mod = np.abs(vals)
        vmin, vmax = float(mod.min()), float(mod.max())
        # bisection homes in on any zero sitting on the contour
        if not vmax > 0 or vmin < zero_rtol * vmax or vmin <= error:
            raise ZeroOnContour(radius, vmin, vmax)
        nxt = np.roll(vals, -1)
        steps = np.angle(nxt / vals)
        bad = ~(np.abs(steps) < PHASE_STEP)
        if not bad.any():
            return theta, vals
        if len(theta) + bad.sum() > max_samples:
            raise NonConvergence(f"sample cap {max_samples} reached while tracking phase")
        ends = np.append(theta[1:], 2 * np.pi)
        mids = (theta[bad] + ends[bad]) / 2
        new_vals = np.asarray(evaluator(center + radius * np.exp(1j * mids)), dtype=complex)
        theta = np.concatenate([theta, mids])
        vals = np.concatenate([vals, new_vals])
        order = np.argsort(theta, kind="stable")
        theta, vals = theta[order], vals[order]
        if np.min(np.diff(theta), initial=np.inf) < 1e-15:
            raise NonConvergence("phase tracking step below angular resolution")


def with_retries(count_fn: Callable[[float], ZeroCountResult], radius: float, retries: int = 5):
    """Call ``count_fn(radius)``, perturbing the radius on ZeroOnContour."""
    try:
        return count_fn(radius)
    except ZeroOnContour as first:
        last = first
        for factor in RETRY_FACTORS[:retries]:
            try:
                return count_fn(radius * factor)
            except ZeroOnContour as exc:
                last = exc
        raise last


def polynomial_count(coeffs, radius: float, retries: int = 0) -> ZeroCountResult:
    """Zeros of an ascending-coefficient polynomial in the closed disk of ``radius``."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=complex), "b")
    if coeffs.size == 0:
        raise ZeroOnContour(radius, 0.0, 0.0)
    deg = coeffs.size - 1
    if deg == 0:
        c = abs(coeffs[0])
        return ZeroCountResult(0, radius, c, 0.0, 1, 0)

    def run(r):
        res = winding_count(lambda z: horner(coeffs, z), r, max(64, 8 * deg))
        return ZeroCountResult(res.count, res.contour_radius, res.min_modulus_on_contour,
                               res.quadrature_residual, res.samples_used, deg)

    return with_retries(run, radius, retries) if retries else run(radius)


def count_zeros_family(family: AnalyticFamily, lam, r: float, degree: int | None = None,
                       degree_cap: int = 512, retries: int = 5) -> ZeroCountResult:
    """N_r(f_lambda), counted on the truncation and lifted to f by Rouche.

    The degree doubles until the certified tail is below half of the
    truncation's minimum modulus on the contour.
    """
    if not 0 < r < 1:
        raise ValueError(f"radius must be in (0, 1), got {r}")

    def run(radius):
        d = family.default_degree if degree is None else degree
        exact = family.exact_degree
        while True:
            if exact is not None:
                d = min(d, exact)
            coeffs = family.coefficients(lam, d)
            tail = family.tail_bound(lam, radius, d)
            trimmed = np.trim_zeros(coeffs, "b")
            eff = max(trimmed.size - 1, 1)
            if trimmed.size == 0:
                raise ZeroOnContour(radius, 0.0, 0.0)
            res = winding_count(lambda z: horner(trimmed, z), radius, max(64, 8 * eff), error=tail)
            if tail < 0.5 * res.min_modulus_on_contour:
                return ZeroCountResult(res.count, radius, res.min_modulus_on_contour,
                                       res.quadrature_residual, res.samples_used, d, tail)
            if exact is not None and d >= exact:
                raise TailDomination("exact truncation still reports a tail")
            d *= 2
            if d > degree_cap:
                raise TailDomination(
                    f"tail {tail:.3e} not below half the min modulus "
                    f"{res.min_modulus_on_contour:.3e} within degree cap {degree_cap}"
                )

    return with_retries(run, r, retries)


class Domination(NamedTuple):
    dominates: bool
    margin: float


def rouche_dominates(f_eval: Callable, g_eval: Callable, radius: float, samples: int = 256,
                     f_error: float = 0.0, g_error: float = 0.0, center: complex = 0j) -> Domination:
    """Whether |f - g| + errors < |g| on the circle; margin = min|g| - that sum.

    Both extremes are sampled on ``samples`` points and polished near the
    worst grid points.
    """
    gmin = circle_extremum(g_eval, radius, samples, "min", center)[0]
    diff = lambda z: np.asarray(f_eval(z)) - np.asarray(g_eval(z))
    dmax = circle_extremum(diff, radius, samples, "max", center)[0]
    margin = gmin - (dmax + f_error + g_error)
    return Domination(bool(margin > 0), float(margin))


# --------------------------------------------------------------------------- growth indicator


@dataclass(frozen=True)
class MultiplicityIndicator:
    lam: tuple
    R: float
    m_R: float
    m_R_over_e: float
    value: float
    rounded: int
    stable: bool


def _central_check(coeffs, tol=CENTRAL_TOL):
    if np.all(np.abs(coeffs) < tol):
        raise CentralParameter("all coefficients below the centrality tolerance")


def sup_log_modulus(family: AnalyticFamily, lam, R: float, degree: int | None = None,
                    samples: int | None = None) -> float:
    """log of (max over |z| = R of the truncation, plus its tail bound)."""
    if not 0 < R < 1:
        raise ValueError(f"R must lie in (0, 1), got {R}")
    d = family.default_degree if degree is None else degree
    coeffs = family.coefficients(lam, d)
    _central_check(coeffs)
    trimmed = np.trim_zeros(coeffs, "b")
    n = samples or max(4 * trimmed.size, 512)
    peak = circle_max(lambda z: horner(trimmed, z), R, n)
    return math.log(peak + family.tail_bound(lam, R, d))


def _indicator(lam, R, m_R, m_Re) -> MultiplicityIndicator:
    value = m_R - m_Re
    rounded = max(0, int(round(value)))
    return MultiplicityIndicator(tuple(np.atleast_1d(lam).tolist()), R, m_R, m_Re, value,
                                 rounded, abs(value - rounded) < STABLE_TOL)


def multiplicity_indicator(family: AnalyticFamily, lam, R: float,
                           degree: int | None = None) -> MultiplicityIndicator:
    """m(R) - m(R/e), with m the log of the max modulus on the circle."""
    m_R = sup_log_modulus(family, lam, R, degree)
    m_Re = sup_log_modulus(family, lam, R / math.e, degree)
    return _indicator(lam, R, m_R, m_Re)


def default_R_sequence(start: float = 0.1, ratio: float = 0.5, terms: int = 8) -> list[float]:
    return [start * ratio**i for i in range(terms)]


@dataclass(frozen=True)
class MultiplicityResult:
    value: int
    trace: list = field(default_factory=list)

    def __int__(self):
        return self.value


def terminal_plateau(indicators: Sequence) -> int | None:
    """Rounded value of the last two indicators if both are stable and agree."""
    if len(indicators) < 2:
        return None
    a, b = indicators[-2], indicators[-1]
    if a.stable and b.stable and a.rounded == b.rounded:
        return b.rounded
    return None


def multiplicity_at_zero(family: AnalyticFamily, lam, R_sequence: Sequence[float] | None = None,
                         degree: int | None = None) -> MultiplicityResult:
    """Vanishing order of f_lambda at 0 from the growth indicator as R -> 0.

    The whole decreasing sequence is evaluated and the value of its terminal
    plateau is returned, so an intermediate plateau produced by zeros close
    to (but not at) the origin is visible in the trace without being taken
    as the limit.
    """
    R_sequence = list(R_sequence or default_R_sequence())
    if any(b >= a for a, b in zip(R_sequence, R_sequence[1:])):
        raise ValueError("R_sequence must be strictly decreasing")
    trace = [multiplicity_indicator(family, lam, R, degree) for R in R_sequence]
    value = terminal_plateau(trace)
    if value is None:
        raise Unstable("indicator did not settle along the R sequence", trace)
    return MultiplicityResult(value, trace)
