"""Minimum-modulus certificates on circles and the Bernstein doubling check.

For g holomorphic on the disk of radius (6e+1) r / 2 with m1 = max |g| on
the circle of radius r/2 and m2 = max |g| on the big circle, some t in
[r/2, r] has min_{|z|=t} |g| > m1 (m1/m2)^7.  For a polynomial of degree d
the doubling inequality m2 <= (6e+1)^d m1 turns this into
min > m1 / (6e+1)^(7d) > m1 / 2^(29d).

The existential radius is found by scanning [r/2, r] for the circle with
the largest minimum.  For polynomials the sampled minimum is turned into a
rigorous lower bound by subtracting a Lipschitz term for the angular gap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ._circle import circle_max, circle_min
from .errors import CertificateNotFound, DomainError
from .family import horner

BIG_FACTOR = (6 * math.e + 1) / 2
LEMMA_POWER = 7
WEAK_BASE_LOG2 = 29
REL_TOL = 1e-9
MAX_ANGULAR = 2**16


def cartan_H(eta: float) -> float:
    """H(eta) = 2 + log(3e / (2 eta)) for 0 < eta <= 3e/2 (natural log)."""
    if not 0 < eta <= 1.5 * math.e:
        raise DomainError(f"eta must lie in (0, 3e/2], got {eta}")
    return 2 + math.log(3 * math.e / (2 * eta))


@dataclass(frozen=True)
class MinModulusCertificate:
    t_r: float
    min_on_circle: float
    m1: float
    m2: float
    bound: float
    min_lower: float | None = None
    weak_bound: float | None = None
    samples: int = 0

    @property
    def certified(self) -> bool:
        """Replays the stored inequality (at relative tolerance 1e-9)."""
        lower = self.min_on_circle if self.min_lower is None else self.min_lower
        return lower >= self.bound * (1 - REL_TOL)


def _as_evaluator(g) -> tuple[Callable, np.ndarray | None]:
    if callable(g):
        return g, None
    coeffs = np.trim_zeros(np.atleast_1d(np.asarray(g, dtype=complex)), "b")
    if coeffs.size == 0:
        raise DomainError("g is identically zero")
    return (lambda z: horner(coeffs, z)), coeffs


def _lipschitz(coeffs: np.ndarray, t: float) -> float:
    k = np.arange(1, coeffs.size)
    return float(np.sum(k * np.abs(coeffs[1:]) * t ** (k - 1)))


def _angular_samples(coeffs) -> int:
    if coeffs is None:
        return 512
    return max(4 * (coeffs.size - 1), 64)


def _best_radius(fn, r, grid_size, n):
    ts, mins = _scan_interval(fn, r / 2, r, grid_size, n)
    i = int(np.argmax(mins))
    lo, hi = ts[max(i - 1, 0)], ts[min(i + 1, grid_size - 1)]
    fine, fine_mins = _scan_interval(fn, lo, hi, 33, n)
    j = int(np.argmax(fine_mins))
    if fine_mins[j] >= mins[i]:
        return float(fine[j])
    return float(ts[i])


def _scan_interval(fn, lo, hi, count, n):
    ts = np.linspace(lo, hi, count)
    theta = 2 * np.pi * np.arange(n) / n
    z = ts[:, None] * np.exp(1j * theta)[None, :]
    vals = np.abs(np.asarray(fn(z.ravel()))).reshape(z.shape)
    return ts, vals.min(axis=1)


def _certify_min(fn, coeffs, t, n, bound):
    """(refined min, rigorous lower or None, samples) on |z| = t.

    For polynomials the angular grid is doubled until the Lipschitz lower
    bound clears ``bound`` or the cap is reached.
    """
    refined = circle_min(fn, t, n)
    if coeffs is None:
        return refined, None, n
    lip = _lipschitz(coeffs, t)
    while True:
        theta = 2 * np.pi * np.arange(n) / n
        grid_min = float(np.abs(fn(t * np.exp(1j * theta))).min())
        lower = grid_min - lip * t * math.pi / n
        if lower >= bound * (1 - REL_TOL) or 2 * n > MAX_ANGULAR:
            return min(refined, grid_min), lower, n
        n *= 2


def find_good_radius(g, r: float, grid_size: int = 257) -> MinModulusCertificate:
    """Radius t in [r/2, r] whose circle minimum beats m1 (m1/m2)^7.

    ``g`` is a vectorised evaluator or an ascending coefficient array.
    """
    if r <= 0 or grid_size < 2:
        raise DomainError("need r > 0 and grid_size >= 2")
    fn, coeffs = _as_evaluator(g)
    n = _angular_samples(coeffs)
    m1 = circle_max(fn, r / 2, n)
    m2 = circle_max(fn, BIG_FACTOR * r, n)
    if m1 == 0:
        raise DomainError("g vanishes on the inner circle; identically zero?")
    m2 = max(m2, m1)  # maximum principle; guards sampling noise
    bound = m1 * (m1 / m2) ** LEMMA_POWER
    t = _best_radius(fn, r, grid_size, n)
    found, lower, used = _certify_min(fn, coeffs, t, n, bound)
    cert = MinModulusCertificate(t, found, m1, m2, bound, lower, None, used)
    if not cert.certified:
        raise CertificateNotFound(
            f"best radius {t:.6g} has min {found:.3e} (lower {lower}) below bound {bound:.3e}"
        )
    return cert


def polynomial_min_modulus(g, d: int, r: float, grid_size: int = 257) -> MinModulusCertificate:
    """As :func:`find_good_radius` with the degree-d bound m1 / (6e+1)^(7d).

    ``m2`` is not sampled; it is the doubling majorant m1 (6e+1)^d.  The
    weaker m1 / 2^(29d) is stored as ``weak_bound``.
    """
    fn, coeffs = _as_evaluator(g)
    if coeffs is None:
        raise DomainError("polynomial_min_modulus needs coefficients")
    if coeffs.size - 1 > d:
        raise DomainError(f"degree {coeffs.size - 1} exceeds declared d = {d}")
    n = _angular_samples(coeffs)
    m1 = circle_max(fn, r / 2, n)
    if m1 == 0:
        raise DomainError("g is identically zero")
    m2 = m1 * (2 * BIG_FACTOR) ** d
    bound = m1 * (2 * BIG_FACTOR) ** (-LEMMA_POWER * d)
    weak = m1 * 2.0 ** (-WEAK_BASE_LOG2 * d)
    t = _best_radius(fn, r, grid_size, n)
    found, lower, used = _certify_min(fn, coeffs, t, n, bound)
    cert = MinModulusCertificate(t, found, m1, m2, bound, lower, weak, used)
    if not cert.certified:
        raise CertificateNotFound(f"min {found:.3e} (lower {lower:.3e}) below bound {bound:.3e}")
    return cert


@dataclass(frozen=True)
class DoublingCheck:
    ratio: float
    bound: float
    passed: bool


def bernstein_doubling_check(g, d: int, r: float, s: float, tol: float = REL_TOL) -> DoublingCheck:
    """max_{|z| = s r/2} |g| / max_{|z| = r/2} |g| against s^d."""
    if s <= 1:
        raise DomainError("scale s must exceed 1")
    fn, coeffs = _as_evaluator(g)
    if coeffs is not None and coeffs.size - 1 > d:
        raise DomainError(f"degree {coeffs.size - 1} exceeds declared d = {d}")
    n = _angular_samples(coeffs)
    inner = circle_max(fn, r / 2, n)
    outer = circle_max(fn, s * r / 2, n)
    ratio = outer / inner
    bound = float(s) ** d
    return DoublingCheck(float(ratio), bound, bool(ratio <= bound * (1 + tol)))
