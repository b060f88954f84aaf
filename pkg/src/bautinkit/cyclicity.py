"""Zero-count bounds near the central set: the explicit radius, the
sandwich N_{r/2}(P) <= N_r(f) <= N_{2r}(P) against the Taylor head P of
degree mu, the global count in the disk of radius 1/4, and the search for
parameters attaining mu zeros.

The explicit radius R = 1 / (4 c M 2^(30 mu) + 2) is usually far below
double precision, so verification runs at a *practical radius*: the
largest grid radius below which, for every sampled parameter, the Taylor
tail is certified smaller than |P| on some circle of [rho/2, rho].
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .bautin import PROJECT_STARTS, maximal_multiplicity, project_to_head_zeros
from .errors import BautinKitError, ConfigurationError
from .family import AnalyticFamily, horner, tail_coefficient_bound
from .regions import ParameterBox, halton, sample_central, sample_mixed
from .zeros import count_zeros_family, polynomial_count

log = logging.getLogger(__name__)

PRACTICAL_GRID = tuple(0.5 * 2.0**-j for j in range(13))
T_FRACTIONS = np.linspace(0.5, 1.0, 9)


@dataclass(frozen=True)
class Radius:
    R: float
    log2_inv_R: float
    underflow: bool


def compute_radius(mu: int, c_mu: float, M: float) -> Radius:
    """R = 1 / (4 c M 2^(30 mu) + 2), with log2(1/R) kept when R underflows."""
    if mu < 0 or c_mu < 0 or M < 0:
        raise ConfigurationError("mu, c_mu and M must be nonnegative")
    cM = c_mu * M
    if cM == 0:
        return Radius(0.5, 1.0, False)
    # log2(4 cM 2^(30 mu) + 2) = a + log2(1 + 2^(1 - a)) with a = log2(4 cM) + 30 mu
    a = math.log2(4 * cM) + 30 * mu
    log2_inv = a + math.log2(1 + 2.0 ** (1 - a)) if a > -1000 else 1.0
    if log2_inv < 1000:
        R = 1.0 / (4 * cM * 2.0 ** (30 * mu) + 2) if a < 1000 else 2.0**-log2_inv
    else:
        R = 0.0
    return Radius(R, log2_inv, R == 0.0 or R < 2.0**-1022)


# --------------------------------------------------------------------------- practical radius


def _min_lower(P: np.ndarray, t: float, n: int) -> np.ndarray:
    """Rigorous lower bound on min_{|z|=t} |P_s| for each row (grid min minus Lipschitz gap)."""
    theta = 2 * np.pi * np.arange(n) / n
    grid = np.abs(horner(P, t * np.exp(1j * theta))).min(axis=1)
    k = np.arange(1, P.shape[1])
    lip = (k * np.abs(P[:, 1:]) * t ** (k - 1)).sum(axis=1)
    return grid - lip * t * math.pi / n


def _beyond_degree_tail(family: AnalyticFamily, lam, t, degree, box, floor):
    """Certified tail past ``degree`` per row: box-uniform, pointwise where that is loose."""
    tails = np.full(len(lam), family.uniform_tail_bound(t, degree, box))
    loose = np.flatnonzero(tails > 1e-12 * floor)
    if loose.size:
        tails[loose] = family.tail_bounds(lam[loose], t, degree)
    return tails


def domination_table(family: AnalyticFamily, lam: np.ndarray, mu: int, radii=PRACTICAL_GRID,
                     box: ParameterBox | None = None, degree: int | None = None) -> np.ndarray:
    """dom[s, j]: for some t in [rho_j/2, rho_j], |f - P| < |P| on |z| = t (certified).

    |f - P| is bounded by the triangle inequality over the coefficients
    mu < k <= degree plus the certified tail; |P| from below by the grid
    minimum less a Lipschitz term.  Rows are normalised by their largest
    coefficient, which changes neither side's comparison.
    """
    d = family.default_degree if degree is None else degree
    if family.exact_degree is not None:
        d = min(d, family.exact_degree)
    d = max(d, mu)
    C = family.coefficients(lam, d)
    scale = np.abs(C).max(axis=1)
    if np.any(scale == 0):
        raise ConfigurationError("central parameter in the domination sample")
    A = np.abs(C[:, mu + 1 :]) / scale[:, None]
    P = C[:, : mu + 1] / scale[:, None]
    n = max(64, 8 * (mu + 1))
    k = np.arange(mu + 1, d + 1)
    dom = np.zeros((len(lam), len(radii)), dtype=bool)
    for j, rho in enumerate(radii):
        for frac in T_FRACTIONS:
            t = rho * frac
            lower = _min_lower(P, t, n)
            diff = A @ t**k if k.size else np.zeros(len(lam))
            diff = diff + _beyond_degree_tail(family, lam, t, d, box, np.maximum(lower, 0) * scale) / scale
            dom[:, j] |= lower > diff
            if dom[:, j].all():
                break
    return dom


def practical_radius(family: AnalyticFamily, lam: np.ndarray, mu: int, radii=PRACTICAL_GRID,
                     box: ParameterBox | None = None) -> float | None:
    """Largest grid radius from which domination holds at every smaller grid radius for all samples."""
    dom = domination_table(family, lam, mu, radii, box)
    ok_from = np.array([dom[:, j:].all() for j in range(len(radii))])
    idx = np.flatnonzero(ok_from)
    return float(radii[idx[0]]) if idx.size else None


# --------------------------------------------------------------------------- verification


@dataclass(frozen=True)
class SandwichRow:
    lam: tuple
    r: float
    N_half_P: int | None
    N_r_f: int | None
    N_2r_P: int | None
    passed: bool
    error: str | None = None


@dataclass(frozen=True)
class GlobalRow:
    lam: tuple
    N_quarter_f: int | None
    passed: bool
    error: str | None = None


def taylor_head(family: AnalyticFamily, lam, mu: int) -> np.ndarray:
    return family.coefficients(lam, mu)


def verify_sandwich(family: AnalyticFamily, mu: int, pairs, retries: int = 5) -> list[SandwichRow]:
    """Check N_{r/2}(P) <= N_r(f) <= N_{2r}(P) on each (lambda, r) pair.

    Counting failures are recorded on their row; the sweep continues.
    """
    rows = []
    for lam, r in pairs:
        lam = np.asarray(lam, dtype=complex)
        key = tuple(complex(x) for x in lam)
        try:
            P = taylor_head(family, lam, mu)
            lo = polynomial_count(P, r / 2, retries).count
            mid = count_zeros_family(family, lam, r, retries=retries).count
            hi = polynomial_count(P, 2 * r, retries).count
            rows.append(SandwichRow(key, float(r), lo, mid, hi, lo <= mid <= hi))
        except BautinKitError as exc:
            rows.append(SandwichRow(key, float(r), None, None, None, False, f"{type(exc).__name__}: {exc}"))
    return rows


def global_bound(mu: int, c_mu: float, M: float) -> float:
    """4 mu + log_{5/4}(2 + 2 c M)."""
    return 4 * mu + math.log(2 + 2 * c_mu * M) / math.log(1.25)


def verify_global_bound(family: AnalyticFamily, mu: int, c_mu: float, M: float, lam_samples,
                        retries: int = 5) -> tuple[float, list[GlobalRow]]:
    """Count zeros in the closed disk of radius 1/4 against the strict global bound.

    Strictness is checked as count <= ceil(bound) - 1.
    """
    bound = global_bound(mu, c_mu, M)
    limit = math.ceil(bound) - 1
    rows = []
    for lam in lam_samples:
        lam = np.asarray(lam, dtype=complex)
        key = tuple(complex(x) for x in lam)
        try:
            n = count_zeros_family(family, lam, 0.25, retries=retries).count
            rows.append(GlobalRow(key, n, n <= limit))
        except BautinKitError as exc:
            rows.append(GlobalRow(key, None, False, f"{type(exc).__name__}: {exc}"))
    return bound, rows


@dataclass(frozen=True)
class Extremal:
    lam: tuple | None
    r: float
    count: int
    found: bool
    tried: int


def find_extremal(family: AnalyticFamily, O: ParameterBox, mu: int, r: float,
                  search_budget: int = 512, seed: int = 0, depth: float = 30.0,
                  retries: int = 5) -> Extremal:
    """First sampled lambda with N_r(f_lambda) = mu, biased towards the box centre.

    Candidates are log-radial central samples (every coordinate shrinks
    independently), which is where the witnesses of a large count live,
    followed by Newton projections of the first samples onto
    {a_0 = ... = a_(mu-1) = 0}, which catch witnesses on varieties that
    sampling cannot hit.  Returns the maximal count seen when no witness
    turns up.
    """
    lam = sample_central(O, search_budget, seed, depth)
    if mu > 0:
        lam = np.concatenate([lam, project_to_head_zeros(family, lam[: 2 * PROJECT_STARTS], mu, O)])
    best = Extremal(None, r, -1, False, 0)
    for s, point in enumerate(lam):
        try:
            count = count_zeros_family(family, point, r, retries=retries).count
        except BautinKitError:
            continue
        key = tuple(complex(x) for x in point)
        if count == mu:
            return Extremal(key, r, count, True, s + 1)
        if count > best.count:
            best = Extremal(key, r, count, False, s + 1)
    return Extremal(best.lam, r, best.count, False, len(lam))


# --------------------------------------------------------------------------- report


@dataclass
class CyclicityReport:
    mu: int
    c_mu: float
    M: float
    R: float
    log2_inv_R: float
    R_underflow: bool
    practical_mode: bool
    practical_radius: float | None
    sandwich_results: list = field(default_factory=list)
    global_bound: float = 0.0
    global_results: list = field(default_factory=list)
    extremal: Extremal | None = None
    notes: list = field(default_factory=list)

    @property
    def sandwich_violations(self) -> int:
        return sum(not row.passed for row in self.sandwich_results)

    @property
    def global_violations(self) -> int:
        return sum(not row.passed for row in self.global_results)

    @property
    def passed(self) -> bool:
        ext_ok = self.extremal is None or self.extremal.found
        return self.sandwich_violations == 0 and self.global_violations == 0 and ext_ok


def non_central_samples(family: AnalyticFamily, O: ParameterBox, n: int, seed: int = 0,
                        depth: float = 12.0) -> np.ndarray:
    """n parameters from ``O`` whose coefficients are not all (numerically) zero."""
    out = []
    batch = max(2 * n, 16)
    while len(out) < n:
        lam = sample_mixed(O, batch, seed, depth)
        C = family.coefficients(lam, family.default_degree)
        keep = lam[np.abs(C).max(axis=1) > 1e-30]
        out = list(keep[:n])
        if batch > 64 * n:
            break
        batch *= 2
    if len(out) < n:
        raise ConfigurationError("could not draw enough non-central parameters")
    return np.array(out)


def sandwich_pairs(lam: np.ndarray, r_max: float, seed: int = 0) -> list[tuple]:
    """Pair each parameter with a radius log-uniform in [r_max/8, r_max]."""
    u = halton(len(lam), 1, seed + 31)[:, 0]
    radii = r_max * 2.0 ** (-3 * u)
    return list(zip(lam, radii))


def cyclicity_report(family: AnalyticFamily, K: ParameterBox, O_sequence, U: ParameterBox,
                     sandwich_samples: int = 50, global_samples: int = 100, seed: int = 0,
                     k_max: int = 64, extremal_r: float | None = None,
                     search_budget: int = 512) -> CyclicityReport:
    """mu, c, M, the explicit radius, and all three verifications for one family."""
    mm = maximal_multiplicity(family, K, O_sequence, U, route="both", k_max=k_max, seed=seed)
    mu = mm.value
    c_mu = mm.ineq_estimates[-1].c_of_N
    M = tail_coefficient_bound(family, U, mu, k_max, seed=seed).value
    rad = compute_radius(mu, c_mu, M)
    O = O_sequence[-1]
    notes = ["c_mu is a sampled surrogate with safety factor, not a certified constant"]

    lam_s = non_central_samples(family, O, sandwich_samples, seed)
    r_prac = practical_radius(family, lam_s, mu, box=O)
    report = CyclicityReport(mu, c_mu, M, rad.R, rad.log2_inv_R, rad.underflow, True, r_prac, notes=notes)
    if r_prac is None:
        notes.append("no practical radius: Taylor tail never certified below |P| on the grid")
    else:
        if r_prac > rad.R:
            notes.append("sandwich radii range up to the practical radius, beyond the explicit R")
        report.sandwich_results = verify_sandwich(family, mu, sandwich_pairs(lam_s, r_prac, seed))

    lam_g = non_central_samples(family, O, global_samples, seed + 1)
    report.global_bound, report.global_results = verify_global_bound(family, mu, c_mu, M, lam_g)

    r_ext = extremal_r if extremal_r is not None else r_prac
    if r_ext is not None:
        report.extremal = find_extremal(family, O, mu, r_ext, search_budget, seed)
    return report
