"""Empirical Bautin-type characteristics of a family.

Two independent routes estimate the maximal multiplicity mu_f(K):

* the *inequality* route looks for the least N such that
  |a_k(lam)| <= c(N) * max_U |a_k| * max_{i<=N} |a_i(lam)|  for k > N
  holds with a finite constant on sampled lam;
* the *growth* route takes the sup over sampled lam of
  m(R) - m(R/e) (m = log max modulus on |z| = R) and lets R -> 0.

Both are replaced by plateau detection: the ratio sup must survive a
sample doubling, the R -> 0 limit must be reached on the last two radii,
and the box limit must agree on the last two nested boxes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from ._circle import batched_circle_max
from .errors import (ConfigurationError, NoFiniteN, NotStabilized, RootClusterError,
                     RouteMismatch, Unsupported)
from .family import DEFAULT_K_MAX, DEFAULT_SAFETY, AnalyticFamily, ExplicitPolynomials, coefficient_sup
from .regions import ParameterBox, check_nesting, sample_central, sample_mixed
from .zeros import CENTRAL_TOL, STABLE_TOL, MultiplicityIndicator, terminal_plateau

log = logging.getLogger(__name__)

GROWTH_TOL = 0.05
UNDERFLOW_TOL = 1e-280
INEQ_DEPTH = 12.0
GROWTH_DEPTH = 60.0
PROJECT_STARTS = 16
PROJECT_ITERS = 40
COLLAPSE_TOL = 1e-8
UNBOUNDED_RATIO = 1e12


@dataclass(frozen=True)
class BautinEstimate:
    N: int
    c_of_N: float
    k_max_checked: int
    sample_count: int
    witness: tuple | None
    raw_sup: float = 0.0
    skipped_k: tuple = ()
    trace: tuple = ()
    note: str = "sampled surrogate for the best constant; not a certified bound"


def _ratio_table(A: np.ndarray, maxU: np.ndarray, N: int):
    """Per-sample sup over k > N of |a_k| / (max_U |a_k| * head_N), plus argmax k."""
    head = A[:, : N + 1].max(axis=1)
    tailk = np.arange(N + 1, A.shape[1])
    active = tailk[maxU[tailk] > 0]
    if active.size == 0:
        return None, None, head
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = A[:, active] / (maxU[active][None, :] * head[:, None])
    # only rows lost to underflow are central; a tiny head is evidence of growth,
    # and an absolute floor would cap the ratio and fake stability
    ratios[A.max(axis=1) <= UNDERFLOW_TOL] = -np.inf
    ratios[np.isnan(ratios)] = 0.0
    best_k = active[np.argmax(ratios, axis=1)]
    return ratios.max(axis=1), best_k, head


def _clip_to_box(lam: np.ndarray, box: ParameterBox) -> np.ndarray:
    d = lam - box.center_array
    r = np.abs(d)
    radius = box.radius_array
    scale = np.minimum(1.0, radius / np.maximum(r, 1e-300))
    return box.center_array + d * scale


def project_to_head_zeros(family: AnalyticFamily, lam0: np.ndarray, k: int, box: ParameterBox,
                          iters: int = PROJECT_ITERS) -> np.ndarray:
    """Min-norm Newton steps from each row of ``lam0`` towards {a_0 = ... = a_(k-1) = 0}.

    Iterates stay inside ``box``.  Parameters where low coefficients vanish
    form varieties of positive codimension that sampling never hits; their
    points are where the multiplicity at 0, and the ratios of the
    inequality route, are largest.
    """
    lam = np.array(lam0, dtype=complex)
    S, n = lam.shape
    eye = np.eye(n)
    for _ in range(iters):
        F = family.coefficients(lam, k - 1)[:, :k]
        h = 1e-7 * (1 + np.abs(lam))
        shifted = lam[:, None, :] + eye[None] * h[:, :, None]
        Fs = family.coefficients(shifted.reshape(-1, n), k - 1)[:, :k].reshape(S, n, k)
        J = ((Fs - F[:, None, :]) / h[:, :, None]).transpose(0, 2, 1)
        step = -(np.linalg.pinv(J) @ F[..., None])[..., 0]
        if not np.all(np.isfinite(step)):
            step = np.nan_to_num(step, nan=0.0, posinf=0.0, neginf=0.0)
        lam = _clip_to_box(lam + step, box)
        if np.max(np.abs(step)) < 1e-15:
            break
    return lam


def _projected_rows(family: AnalyticFamily, starts: np.ndarray, k: int, box: ParameterBox,
                    degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Projections of ``starts`` that did not collapse onto the central set, with their coefficients."""
    proj = project_to_head_zeros(family, starts, k, box)
    before = np.abs(family.coefficients(starts, degree)).max(axis=1)
    C = family.coefficients(proj, degree)
    after = np.abs(C).max(axis=1)
    keep = (after > COLLAPSE_TOL * before) & (after > UNDERFLOW_TOL)
    return proj[keep], C[keep]


def _starts(lam: np.ndarray, score: np.ndarray) -> np.ndarray:
    """The best-scoring rows plus the leading (boundary-biased) rows as Newton starts."""
    order = np.argsort(np.nan_to_num(-score, nan=np.inf, posinf=np.inf, neginf=-np.inf), kind="stable")
    idx = np.unique(np.concatenate([order[:PROJECT_STARTS], np.arange(min(PROJECT_STARTS, len(lam)))]))
    return lam[idx]


def _variety_witness(family, lam, score, maxU, N, O, k_max) -> bool:
    _, C = _projected_rows(family, _starts(lam, score), N + 1, O, k_max)
    if not len(C):
        return False
    ratios, _, _ = _ratio_table(np.abs(C), maxU, N)
    return ratios is not None and bool(np.max(ratios) >= UNBOUNDED_RATIO)


def estimate_N_c(family: AnalyticFamily, K: ParameterBox, O: ParameterBox, U: ParameterBox,
                 k_max: int = DEFAULT_K_MAX, samples: int = 256, seed: int = 0,
                 safety: float = DEFAULT_SAFETY, depth: float = INEQ_DEPTH,
                 u_samples: int = 1024) -> BautinEstimate:
    """Least N whose ratio sup stays put when the sample set is doubled.

    The doubled set adds ``samples`` points drawn twice as deep towards the
    centre of ``O``; an unbounded ratio shows up there as growth.
    """
    check_nesting(K, O, U)
    if not family.region.contains_box(U, strict=False):
        raise ConfigurationError("U must lie inside the family's region V")
    if k_max < 1:
        raise ConfigurationError("k_max must be >= 1")
    exact = family.exact_degree is not None and k_max >= family.exact_degree
    if family.exact_degree is not None:
        k_max = min(k_max, max(family.exact_degree, 1))

    small = sample_mixed(O, samples, seed, depth)
    extra = sample_central(O, samples, seed + 104729, 2 * depth)
    lam = np.concatenate([small, extra])
    A = np.abs(family.coefficients(lam, k_max))
    maxU = coefficient_sup(family, U, k_max, u_samples, seed)
    skipped = tuple(int(k) for k in np.flatnonzero(maxU == 0))
    if skipped:
        log.info("coefficients %s vanish on U and are skipped", skipped)

    trace = []
    for N in range(k_max + 1):
        sup_per_sample, best_k, _ = _ratio_table(A, maxU, N)
        if sup_per_sample is None:
            if not exact:
                # coefficients past k_max exist but were never looked at
                break
            return BautinEstimate(N, 0.0, k_max, 2 * samples, None, 0.0, skipped, tuple(trace))
        sup_small = float(np.max(sup_per_sample[:samples]))
        sup_big = float(np.max(sup_per_sample))
        trace.append((N, sup_small, sup_big))
        if not np.isfinite(sup_big):
            # -inf: every sample numerically central for this head; inf: unbounded ratio
            continue
        if sup_big <= sup_small * (1 + GROWTH_TOL):
            if _variety_witness(family, lam, sup_per_sample, maxU, N, O, k_max):
                # a point of O where a_0..a_N vanish but a later a_k does not
                trace[-1] = (N, sup_small, math.inf)
                continue
            s = int(np.argmax(sup_per_sample))
            witness = (int(best_k[s]), tuple(complex(x) for x in lam[s]))
            return BautinEstimate(N, safety * sup_big, k_max, 2 * samples, witness,
                                  sup_big, skipped, tuple(trace))
    raise NoFiniteN(f"no N <= {k_max} gave a stable ratio bound", trace)


# --------------------------------------------------------------------------- growth route


def default_growth_radii() -> list[float]:
    return [0.1 * 0.5**i for i in range(5)]


def growth_indicators(family: AnalyticFamily, lam: np.ndarray, R: float,
                      degree: int | None = None) -> np.ndarray:
    """Vectorised m(R) - m(R/e) for a batch of parameters (NaN where central)."""
    d = family.default_degree if degree is None else degree
    if family.exact_degree is not None:
        d = min(d, family.exact_degree)
    C = family.coefficients(lam, d)
    scale = np.abs(C).max(axis=1)
    # the indicator is invariant under f -> c f, so rows are normalised and
    # only rows lost to underflow count as central here
    keep = scale > UNDERFLOW_TOL
    out = np.full(len(lam), np.nan)
    if not keep.any():
        return out
    rows = lam[keep]
    row_scale = scale[keep]
    C = C[keep] / row_scale[:, None]
    m = []
    for radius in (R, R / math.e):
        weights = np.abs(C) * radius ** np.arange(d + 1)
        wmax = weights.max(axis=1, keepdims=True)
        significant = (weights > 1e-18 * wmax).any(axis=0)
        top = int(np.flatnonzero(significant).max())
        dropped = weights[:, top + 1 :].sum(axis=1)
        n = max(16 * (top + 1), 256)
        peak = batched_circle_max(C[:, : top + 1], radius, n)
        tail = np.full(len(rows), family.uniform_tail_bound(radius, d)) / row_scale
        # the box-uniform tail is loose for small parameters; redo those rows pointwise
        loose = np.flatnonzero(tail > 1e-12 * peak)
        if loose.size:
            tail[loose] = family.tail_bounds(rows[loose], radius, d) / row_scale[loose]
        m.append(np.log(peak + dropped + tail))
    out[keep] = m[0] - m[1]
    return out


@dataclass(frozen=True)
class GrowthProfile:
    box: ParameterBox
    indicators: tuple
    value: int | None


def growth_profile(family: AnalyticFamily, O: ParameterBox, R_sequence=None, samples: int = 512,
                   seed: int = 0, depth: float = GROWTH_DEPTH, degree=None) -> GrowthProfile:
    """sup over sampled lam in O of the indicator, along a decreasing R sequence."""
    R_sequence = list(R_sequence or default_growth_radii())
    lam = sample_mixed(O, samples, seed, depth)
    vals = np.array([growth_indicators(family, lam, R, degree) for R in R_sequence])
    if np.all(np.isnan(vals)):
        raise NoFiniteN("every sample is numerically central")
    # add points where the first k coefficients vanish, for k up to two past the sampled sup
    d = family.default_degree if degree is None else degree
    if family.exact_degree is not None:
        d = min(d, family.exact_degree)
    # (the ceiling is raised as projections reveal higher orders)
    starts = _starts(lam, vals[-1])
    k = 1
    while k <= min(int(round(np.nanmax(vals))) + 2, d):
        proj, _ = _projected_rows(family, starts, k, O, d)
        if len(proj):
            lam = np.concatenate([lam, proj])
            vals = np.concatenate(
                [vals, np.array([growth_indicators(family, proj, R, degree) for R in R_sequence])], axis=1)
        k += 1
    recs = []
    for R, row in zip(R_sequence, vals):
        s = int(np.nanargmax(row))
        v = float(row[s])
        rounded = max(0, int(round(v)))
        recs.append(MultiplicityIndicator(tuple(lam[s].tolist()), R, math.nan, math.nan, v, rounded,
                                          abs(v - rounded) < STABLE_TOL))
    return GrowthProfile(O, tuple(recs), terminal_plateau(recs))


# --------------------------------------------------------------------------- mu_f(K)


@dataclass(frozen=True)
class MaximalMultiplicity:
    value: int
    ineq: int | None = None
    growth: int | None = None
    ineq_estimates: tuple = ()
    growth_profiles: tuple = ()

    def __int__(self):
        return self.value


def _stabilized(values: list, label: str) -> int:
    for a, b in zip(values, values[1:]):
        if a is not None and a == b:
            return a
    raise NotStabilized(f"{label} route did not stabilise over the boxes: {values}", values)


def maximal_multiplicity(family: AnalyticFamily, K: ParameterBox, O_sequence: Sequence[ParameterBox],
                         U: ParameterBox | None = None, route: str = "both", k_max: int = DEFAULT_K_MAX,
                         samples: int = 256, growth_samples: int = 512, seed: int = 0,
                         R_sequence=None, growth_depth: float = GROWTH_DEPTH) -> MaximalMultiplicity:
    """mu_f(K) by the inequality route, the growth route, or both (which must agree)."""
    if route not in ("ineq", "growth", "both"):
        raise ConfigurationError(f"unknown route {route!r}")
    O_sequence = list(O_sequence)
    if len(O_sequence) < 2:
        raise ConfigurationError("need at least two nested boxes")
    for outer, inner in zip(O_sequence, O_sequence[1:]):
        check_nesting(inner, outer)
    check_nesting(K, O_sequence[-1])

    ineq_val = growth_val = None
    estimates, profiles = [], []
    if route in ("ineq", "both"):
        if U is None:
            raise ConfigurationError("the inequality route needs U")
        check_nesting(O_sequence[0], U)
        for O in O_sequence:
            est = estimate_N_c(family, K, O, U, k_max, samples, seed)
            estimates.append(est)
            if len(estimates) >= 2 and estimates[-1].N == estimates[-2].N:
                break
        ineq_val = _stabilized([e.N for e in estimates], "inequality")
    if route in ("growth", "both"):
        for O in O_sequence:
            prof = growth_profile(family, O, R_sequence, growth_samples, seed, growth_depth)
            profiles.append(prof)
            if len(profiles) >= 2 and profiles[-1].value is not None \
                    and profiles[-1].value == profiles[-2].value:
                break
        growth_val = _stabilized([p.value for p in profiles], "growth")
    if route == "both" and ineq_val != growth_val:
        raise RouteMismatch(ineq_val, growth_val)
    value = ineq_val if ineq_val is not None else growth_val
    return MaximalMultiplicity(value, ineq_val, growth_val, tuple(estimates), tuple(profiles))


def c_mu_estimate(family: AnalyticFamily, K: ParameterBox, O_sequence: Sequence[ParameterBox],
                  U: ParameterBox, **kw) -> float:
    """Sampled constant c(N) from the innermost box where N stabilised (safety included)."""
    mm = maximal_multiplicity(family, K, O_sequence, U, route="ineq", **kw)
    return mm.ineq_estimates[-1].c_of_N


# --------------------------------------------------------------------------- central set


@dataclass(frozen=True)
class CentralProbe:
    lam: tuple
    central: bool
    head_max: float
    consistent: bool = True


def central_set_probe(family: AnalyticFamily, O: ParameterBox, mu: int, samples: int = 128,
                      seed: int = 0, tol: float = CENTRAL_TOL, points=None) -> list[CentralProbe]:
    """Classify sampled (and any given) parameters by max_{i<=mu} |a_i| < tol.

    For explicit families the verdict is cross-checked against all
    coefficients in the list.
    """
    if mu < 0:
        raise ConfigurationError("mu must be >= 0")
    lam = sample_mixed(O, samples, seed)
    if points is not None:
        lam = np.concatenate([np.atleast_2d(np.asarray(points, dtype=complex)), lam])
    head = np.abs(family.coefficients(lam, mu)).max(axis=1)
    central = head < tol
    if family.exact_degree is not None:
        full = np.abs(family.coefficients(lam, family.exact_degree)).max(axis=1) < tol
    else:
        full = central
    return [CentralProbe(tuple(complex(x) for x in lam[s]), bool(central[s]), float(head[s]),
                         bool(central[s] == full[s])) for s in range(len(lam))]


# --------------------------------------------------------------------------- curves


@dataclass(frozen=True)
class CurveBautinIndex:
    d: int
    common_zeros: tuple
    k_max_checked: int


def _gauss(x: complex):
    from sympy import I, Rational

    x = complex(x)
    return Rational(Fraction(x.real)) + I * Rational(Fraction(x.imag))


def _compose(poly, phi_polys, w, domain, cache):
    from sympy import Poly

    acc = Poly(0, w, domain=domain)
    for exps, coef in poly.terms.items():
        term = Poly(_gauss(coef), w, domain=domain)
        for i, e in enumerate(exps):
            if e:
                key = (i, e)
                if key not in cache:
                    cache[key] = phi_polys[i] ** e
                term = term * cache[key]
        acc = acc + term
    return acc


def _disk_roots(poly, tol):
    """Roots of an exact polynomial inside the closed unit disk, with multiplicity.

    Square-free factorisation is exact; each square-free factor has simple
    roots, found numerically.  Roots within ``tol`` of the unit circle or of
    each other are ambiguous and raise RootClusterError.
    """
    out = []
    if poly.degree() <= 0:
        return out
    _, factors = poly.sqf_list()
    for factor, mult in factors:
        coeffs = [complex(c) for c in factor.all_coeffs()]
        roots = np.roots(coeffs)
        if len(roots) > 1:
            gaps = np.abs(roots[:, None] - roots[None, :]) + np.eye(len(roots))
            if gaps.min() < tol:
                raise RootClusterError("square-free factor has numerically coincident roots")
        for r in roots:
            if abs(abs(r) - 1) < tol:
                raise RootClusterError(f"root {r} too close to the unit circle")
            if abs(r) < 1:
                out.append((complex(r), int(mult)))
    return out


def bautin_index_along_curve(family: AnalyticFamily, phi: Sequence, k_max: int | None = None,
                             O: ParameterBox | None = None, rho: float | None = None,
                             tol: float = 1e-9) -> CurveBautinIndex:
    """Bautin index d(phi) of the one-parameter family w -> f_{phi(w)} on the unit disk.

    ``phi`` lists one ascending coefficient array per parameter coordinate.
    Compositions a_k(phi(w)) are formed exactly over the Gaussian
    rationals.  On the disk an ideal generated by polynomials is fixed by
    the common zeros inside it, so a_0..a_d generate a_k iff the part of
    G_d = gcd(a_0(phi), ..., a_d(phi)) with roots in the closed disk
    divides a_k(phi).
    """
    from sympy import QQ_I, Poly, symbols

    if not isinstance(family.rule, ExplicitPolynomials):
        raise Unsupported("curve Bautin index needs an explicit polynomial family")
    if len(phi) != family.dimension:
        raise ConfigurationError(f"phi needs {family.dimension} components")
    phi = [np.atleast_1d(np.asarray(c, dtype=complex)) for c in phi]
    if rho is None:
        # polynomial coefficients need no margin inside V itself
        rho = 1.05 if O is not None else 1.0
    w_circle = rho * np.exp(2j * np.pi * np.arange(256) / 256)
    image = np.stack([np.polynomial.polynomial.polyval(w_circle, c) for c in phi], axis=1)
    box = O if O is not None else family.region
    if not np.all(box.contains(image)):
        raise ConfigurationError(f"phi does not map the disk of radius {rho} into the box")

    top = family.rule.length - 1
    k_max = top if k_max is None else min(k_max, top)
    w = symbols("w")
    phi_polys = [Poly(sum(_gauss(c) * w**i for i, c in enumerate(cs)), w, domain=QQ_I) for cs in phi]
    cache: dict = {}
    composed = [_compose(family.rule.polys[k], phi_polys, w, QQ_I, cache) for k in range(k_max + 1)]

    G = None
    for d in range(k_max + 1):
        if not composed[d].is_zero:
            G = composed[d] if G is None else G.gcd(composed[d])
        if _generates_tail(G, composed[d + 1 :], tol):
            zeros = tuple(_disk_roots(G, tol)) if G is not None else ()
            return CurveBautinIndex(d, zeros, k_max)
    raise NoFiniteN("no generating head found up to k_max")


def _generates_tail(G, rest, tol) -> bool:
    for a in rest:
        if a.is_zero:
            continue
        if G is None:
            return False
        H = G.gcd(a)
        quotient, remainder = G.div(H)
        if not remainder.is_zero:
            raise RootClusterError("exact gcd division left a remainder")
        if _disk_roots(quotient, tol):
            return False
    return True
