"""Parametric analytic families f_lambda(z) = sum_k a_k(lambda) z^k.

Three coefficient rules are supported:

* :class:`ExplicitPolynomials` -- finitely many n-variate polynomial
  coefficients; truncation beyond the list is exact.
* :class:`ExpPolynomial` -- Taylor coefficients of
  ``F(z) = sum_j P_j(z) exp(Q_j(z))`` with polynomial P_j, Q_j whose
  coefficients are read off the parameter vector.
* :class:`Callback` -- an opaque ``(k, lambda) -> a_k`` evaluator together
  with a caller-declared uniform bound on all |a_k|.

All coefficient arrays are ascending in the power of z.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigurationError, DomainError
from .regions import ParameterBox, sample_boundary

log = logging.getLogger(__name__)

DEFAULT_K_MAX = 64
DEFAULT_SAFETY = 1.1
EPS = float(np.finfo(float).eps)


class MultiPoly:
    """Sparse polynomial in n complex variables.

    >>> p = MultiPoly({(2, 0): 1.0, (1, 1): -2.0}, nvars=2)
    >>> complex(p([1.0, 1.0]))
    (-1+0j)
    """

    def __init__(self, terms: Mapping[tuple, complex] | Iterable[tuple], nvars: int):
        if isinstance(terms, Mapping):
            items = terms.items()
        else:
            items = [(tuple(e), c) for e, c in terms]
        merged: dict[tuple, complex] = {}
        for exps, coef in items:
            exps = tuple(int(e) for e in exps)
            if len(exps) != nvars or any(e < 0 for e in exps):
                raise ConfigurationError(f"bad exponent {exps} for {nvars} variables")
            merged[exps] = merged.get(exps, 0j) + complex(coef)
        self.nvars = nvars
        self.terms = {e: c for e, c in merged.items() if c != 0}

    @classmethod
    def zero(cls, nvars: int) -> "MultiPoly":
        return cls({}, nvars)

    @classmethod
    def monomial(cls, exps: Sequence[int], coef: complex = 1.0) -> "MultiPoly":
        return cls({tuple(exps): coef}, len(exps))

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def __call__(self, lam) -> np.ndarray:
        lam = np.asarray(lam, dtype=complex)
        out = np.zeros(lam.shape[:-1], dtype=complex)
        for exps, coef in self.terms.items():
            term = np.full(lam.shape[:-1], coef, dtype=complex)
            for i, e in enumerate(exps):
                if e:
                    term = term * lam[..., i] ** e
            out = out + term
        return out

    def majorant(self, bounds) -> float:
        """Triangle-inequality bound sum |c_alpha| * prod bounds_i^alpha_i."""
        bounds = np.asarray(bounds, dtype=float)
        return float(
            sum(abs(c) * np.prod(bounds ** np.array(e, dtype=float)) for e, c in self.terms.items())
        )

    def to_list(self) -> list:
        return [[list(e), c.real, c.imag] for e, c in sorted(self.terms.items())]

    def __repr__(self):
        return f"MultiPoly({self.terms!r}, nvars={self.nvars})"


def horner(coeffs: np.ndarray, z) -> np.ndarray:
    """Evaluate ascending coefficient arrays at ``z``.

    ``coeffs`` has shape (..., K+1); the result broadcasts the leading axes
    of ``coeffs`` against the shape of ``z``.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    z = np.asarray(z, dtype=complex)
    lead = coeffs.shape[:-1]
    expand = (slice(None),) * len(lead) + (None,) * z.ndim
    acc = np.zeros(lead + z.shape, dtype=complex)
    for k in range(coeffs.shape[-1] - 1, -1, -1):
        acc = acc * z + coeffs[(Ellipsis, k)][expand]
    return acc


# --------------------------------------------------------------------------- rules


@dataclass(frozen=True)
class ExplicitPolynomials:
    polys: tuple

    def __post_init__(self):
        polys = tuple(self.polys)
        if not polys:
            raise ConfigurationError("explicit family needs at least one coefficient")
        nv = {p.nvars for p in polys}
        if len(nv) != 1:
            raise ConfigurationError("all coefficient polynomials need the same variable count")
        object.__setattr__(self, "polys", polys)

    kind = "explicit"

    @property
    def nvars(self) -> int:
        return self.polys[0].nvars

    @property
    def length(self) -> int:
        return len(self.polys)

    def coefficients(self, lam: np.ndarray, kmax: int) -> np.ndarray:
        out = np.zeros((lam.shape[0], kmax + 1), dtype=complex)
        for k, poly in enumerate(self.polys[: kmax + 1]):
            if not poly.is_zero:
                out[:, k] = poly(lam)
        return out

    def majorant(self, bounds: np.ndarray, kmax: int) -> np.ndarray:
        out = np.zeros(kmax + 1)
        for k, poly in enumerate(self.polys[: kmax + 1]):
            out[k] = poly.majorant(bounds)
        return out


def default_exp_assembly(m: int, p: int, q: int):
    """Slice lambda into m blocks of [P_j coefficients | Q_j coefficients]."""
    block = p + q + 2

    def assemble(lam: np.ndarray):
        lam = lam.reshape(lam.shape[0], m, block)
        return lam[:, :, : p + 1], lam[:, :, p + 1 :]

    return assemble


@dataclass(frozen=True)
class ExpPolynomial:
    """F(z) = sum_{j<m} P_j(z) exp(Q_j(z)), deg P_j <= p, deg Q_j <= q.

    ``assemble`` maps a batch of parameters (S, n) to arrays P (S, m, p+1)
    and Q (S, m, q+1).  The default reads lambda as ``m`` consecutive blocks
    of ``p + q + 2`` coefficients, giving dimension ``m (p + q + 2)``.
    Majorants assume the default layout unless ``assemble_bounds`` maps the
    per-coordinate parameter bounds to bounds on |P| and |Q| coefficients.
    """

    m: int
    p: int
    q: int
    assemble: Callable | None = None
    assemble_bounds: Callable | None = None

    kind = "exp"

    def __post_init__(self):
        if self.m < 1 or self.p < 0 or self.q < 1:
            raise ConfigurationError(f"need m >= 1, p >= 0, q >= 1; got {self.m, self.p, self.q}")
        if self.assemble is None:
            object.__setattr__(self, "assemble", default_exp_assembly(self.m, self.p, self.q))
            object.__setattr__(
                self, "assemble_bounds",
                lambda b: tuple(x[0] for x in default_exp_assembly(self.m, self.p, self.q)(b[None, :])),
            )

    @property
    def nvars(self) -> int:
        return self.m * (self.p + self.q + 2)

    def coefficients(self, lam: np.ndarray, kmax: int) -> np.ndarray:
        P, Q = self.assemble(lam)
        return _sum_p_exp_q(P, np.exp(Q[:, :, 0]), Q, kmax)

    def majorant(self, bounds: np.ndarray, kmax: int) -> np.ndarray:
        if self.assemble_bounds is None:
            raise ConfigurationError("custom exp assembly without assemble_bounds has no majorant")
        Pb, Qb = self.assemble_bounds(np.asarray(bounds, dtype=float))
        Pb, Qb = np.abs(Pb)[None], np.abs(Qb)[None]
        return _sum_p_exp_q(Pb, np.exp(Qb[:, :, 0]), Qb, kmax)[0].real

    def log_majorant_value(self, Pabs, q0scale, Habs, rho: float) -> float:
        """log of sum_j |P_j|(rho) * q0scale_j * exp(|H_j|(rho)), H = Q - Q(0)."""
        powers_p = rho ** np.arange(self.p + 1)
        powers_q = rho ** np.arange(self.q + 1)
        terms = []
        for j in range(self.m):
            pval = float(Pabs[j] @ powers_p)
            if pval <= 0 or q0scale[j] <= 0:
                continue
            hval = float(Habs[j, 1:] @ powers_q[1:])
            terms.append(math.log(pval) + math.log(q0scale[j]) + hval)
        return float(logsumexp(terms)) if terms else -math.inf


def _exp_series(Q: np.ndarray, kmax: int) -> np.ndarray:
    """Taylor coefficients of exp(Q(z) - Q(0)) for batched Q of shape (S, q+1).

    Uses n e_n = sum_{j=1}^{min(n,q)} j h_j e_{n-j}, exact in the algebra
    (no truncation of the exponential is involved).
    """
    S, qp1 = Q.shape
    e = np.zeros((S, kmax + 1), dtype=Q.dtype)
    e[:, 0] = 1.0
    jj = np.arange(qp1)
    for n in range(1, kmax + 1):
        top = min(n, qp1 - 1)
        acc = np.zeros(S, dtype=Q.dtype)
        for j in range(1, top + 1):
            acc = acc + jj[j] * Q[:, j] * e[:, n - j]
        e[:, n] = acc / n
    return e


def _sum_p_exp_q(P, q0factor, Q, kmax):
    S, m, pp1 = P.shape
    out = np.zeros((S, kmax + 1), dtype=np.result_type(P, Q, complex))
    for j in range(m):
        E = _exp_series(Q[:, j, :], kmax) * q0factor[:, j, None]
        for i in range(min(pp1, kmax + 1)):
            out[:, i:] += P[:, j, i, None] * E[:, : kmax + 1 - i]
    return out


@dataclass(frozen=True)
class Callback:
    """Opaque coefficient rule.

    ``tail_bound`` must bound |a_k(lambda)| for every k and every lambda in
    the family's region; it is trusted, not checked.  ``batch`` optionally
    evaluates a (S, n) batch up to degree K at once; ``majorant_fn``
    optionally maps (bounds, K) to bounds on |a_0|..|a_K| over the polydisk
    {|lambda_i| <= bounds_i} centred at the origin.
    """

    evaluator: Callable[[int, np.ndarray], complex]
    tail_bound: float
    nvars: int
    batch: Callable | None = None
    majorant_fn: Callable | None = None
    exact_degree: int | None = None

    kind = "callback"

    def coefficients(self, lam: np.ndarray, kmax: int) -> np.ndarray:
        if self.batch is not None:
            return np.asarray(self.batch(lam, kmax), dtype=complex)
        out = np.empty((lam.shape[0], kmax + 1), dtype=complex)
        for s in range(lam.shape[0]):
            for k in range(kmax + 1):
                out[s, k] = self.evaluator(k, lam[s])
        return out

    def majorant(self, bounds: np.ndarray, kmax: int) -> np.ndarray:
        if self.majorant_fn is not None:
            return np.asarray(self.majorant_fn(bounds, kmax), dtype=float)
        return np.full(kmax + 1, float(self.tail_bound))


# --------------------------------------------------------------------------- family


@dataclass(frozen=True)
class AnalyticFamily:
    rule: object
    region: ParameterBox
    default_degree: int = 0
    name: str = ""

    def __post_init__(self):
        if self.region.dimension != self.rule.nvars:
            raise ConfigurationError(
                f"region dimension {self.region.dimension} != rule variables {self.rule.nvars}"
            )
        if self.default_degree <= 0:
            if isinstance(self.rule, ExplicitPolynomials):
                deg = max(self.rule.length - 1, 1)
            else:
                deg = DEFAULT_K_MAX
            object.__setattr__(self, "default_degree", deg)

    @property
    def dimension(self) -> int:
        return self.region.dimension

    @property
    def is_explicit(self) -> bool:
        return isinstance(self.rule, ExplicitPolynomials)

    @property
    def exact_degree(self) -> int | None:
        """Degree past which all coefficients vanish identically, if known."""
        if self.is_explicit:
            return self.rule.length - 1
        return getattr(self.rule, "exact_degree", None)

    def _as_batch(self, lam) -> tuple[np.ndarray, bool]:
        lam = np.asarray(lam, dtype=complex)
        single = lam.ndim == 1
        batch = lam[None, :] if single else lam
        if batch.ndim != 2 or batch.shape[1] != self.dimension:
            raise DomainError(f"parameter must have {self.dimension} components, got shape {lam.shape}")
        if not np.all(self.region.contains(batch)):
            raise DomainError("parameter outside the family's region V")
        return batch, single

    def coefficients(self, lam, kmax: int) -> np.ndarray:
        """a_0..a_kmax at one lambda (shape (K+1,)) or a batch (shape (S, K+1))."""
        if kmax < 0:
            raise DomainError("kmax must be >= 0")
        batch, single = self._as_batch(lam)
        out = self.rule.coefficients(batch, kmax)
        if not np.all(np.isfinite(out)):
            raise DomainError("non-finite coefficient value")
        return out[0] if single else out

    def coefficient(self, k: int, lam) -> complex:
        if k < 0:
            raise DomainError("coefficient index must be >= 0")
        return complex(self.coefficients(lam, k)[..., k])

    def taylor_polynomial(self, lam, degree: int) -> np.ndarray:
        return self.coefficients(lam, degree)

    def tail_bound(self, lam, t: float, degree: int) -> float:
        """Certified bound on |sum_{k>degree} a_k(lambda) z^k| for |z| <= t."""
        if not 0 <= t < 1:
            raise DomainError(f"tail bound needs 0 <= |z| < 1, got {t}")
        if t == 0:
            return 0.0
        rule = self.rule
        if isinstance(rule, ExplicitPolynomials):
            top = rule.length - 1
            if degree >= top:
                return 0.0
            a = np.abs(self.coefficients(lam, top))[degree + 1 :]
            powers = t ** np.arange(degree + 1, top + 1)
            return float(a @ powers) * (1 + 1e-12)
        if isinstance(rule, ExpPolynomial):
            return _exp_tail(rule, self._as_batch(lam)[0], t, degree)
        exact = self.exact_degree
        if exact is not None and degree >= exact:
            return 0.0
        if rule.majorant_fn is not None:
            # the polydisk of radii |lambda_i| about 0 contains lambda
            return _callback_tail(rule, np.abs(self._as_batch(lam)[0][0]), t, degree, exact)
        return float(rule.tail_bound) * t ** (degree + 1) / (1 - t)

    def uniform_tail_bound(self, t: float, degree: int, box: ParameterBox | None = None) -> float:
        """Bound on the degree-``degree`` tail at |z| <= t valid for every lambda in ``box``."""
        box = self.region if box is None else box
        if t == 0:
            return 0.0
        rule = self.rule
        exact = self.exact_degree
        if exact is not None and degree >= exact:
            return 0.0
        if isinstance(rule, ExplicitPolynomials):
            maj = rule.majorant(box.bounds(), exact)[degree + 1 :]
            return float(maj @ (t ** np.arange(degree + 1, exact + 1))) * (1 + 1e-12)
        if isinstance(rule, ExpPolynomial):
            Pb, Qb = rule.assemble_bounds(box.bounds())
            return _exp_majorant_tail(rule, np.abs(Pb), np.exp(np.abs(Qb[:, 0])), np.abs(Qb), t, degree)
        if rule.majorant_fn is not None:
            return _callback_tail(rule, box.bounds(), t, degree, exact)
        return float(rule.tail_bound) * t ** (degree + 1) / (1 - t)

    def tail_bounds(self, lam: np.ndarray, t: float, degree: int) -> np.ndarray:
        """Per-row :meth:`tail_bound` for a batch of parameters."""
        return np.array([self.tail_bound(row, t, degree) for row in np.atleast_2d(lam)])

    def eval(self, lam, z: complex, degree: int | None = None) -> tuple[complex, float]:
        """Partial sum through ``degree`` and a bound on its distance to f(z).

        The bound covers the truncated tail plus the floating-point error of
        the Horner sum (a standard (2d + 2) u sum |a_k| |z|^k estimate).
        """
        z = complex(z)
        if abs(z) >= 1:
            raise DomainError(f"|z| must be < 1, got {abs(z)}")
        degree = self.default_degree if degree is None else degree
        coeffs = self.coefficients(lam, degree)
        value = complex(np.polynomial.polynomial.polyval(z, coeffs))
        if z == 0 or not np.any(coeffs):
            return value, self.tail_bound(lam, abs(z), degree)
        t = abs(z)
        rounding = (2 * degree + 4) * EPS * float(np.abs(coeffs) @ (t ** np.arange(coeffs.size)))
        return value, self.tail_bound(lam, t, degree) + rounding


def _callback_tail(rule: Callback, bounds, t: float, degree: int, exact: int | None) -> float:
    """Majorant head through K plus the last majorant values continued geometrically.

    Beyond K the majorant is assumed not to exceed its largest value over
    the last ten computed indices; callbacks supplying ``majorant_fn``
    vouch for that (it holds for the factorially decaying transforms).
    """
    K = max(2 * degree, degree + 64) if exact is None else exact
    maj = rule.majorant(np.asarray(bounds, dtype=float), K)
    head = float(maj[degree + 1 :] @ (t ** np.arange(degree + 1, K + 1)))
    if exact is not None:
        return head * (1 + 1e-12)
    rest = float(maj[-10:].max()) * t ** (K + 1) / (1 - t)
    return (head + rest) * (1 + 1e-12)


def _exp_tail(rule: ExpPolynomial, lam: np.ndarray, t: float, degree: int) -> float:
    P, Q = rule.assemble(lam)
    return _exp_majorant_tail(rule, np.abs(P[0]), np.exp(Q[0, :, 0].real), np.abs(Q[0]), t, degree)


def _exp_majorant_tail(rule: ExpPolynomial, Pabs, q0scale, Habs, t: float, degree: int) -> float:
    """Tail bound via the positive majorant series of sum |P_j| exp(Q_j).

    Exact majorant coefficients through ``K``, then a Cauchy estimate
    g(rho) (t/rho)^(K+1) / (1 - t/rho) minimised over a grid of rho > t.
    """
    K = max(2 * degree, degree + 40)
    G = _sum_p_exp_q(Pabs[None], q0scale[None], Habs[None], K).real[0]
    head = float(G[degree + 1 :] @ (t ** np.arange(degree + 1, K + 1)))
    best = math.inf
    for factor in (1.25, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 12.0, 16.0, 24.0, 32.0):
        rho = t * factor
        lg = rule.log_majorant_value(Pabs, q0scale, Habs, rho)
        if lg == -math.inf:
            return 0.0
        val = lg + (K + 1) * math.log(t / rho) - math.log1p(-t / rho)
        best = min(best, val)
    return (head + math.exp(best)) * (1 + 1e-12)


# --------------------------------------------------------------------------- sup estimation


@dataclass(frozen=True)
class TailCoefficientBound:
    value: float
    raw_max: float
    majorant: float
    from_k: int
    k_max: int
    sample_count: int
    safety: float = DEFAULT_SAFETY
    argmax_k: int | None = None


def coefficient_sup(family: AnalyticFamily, box: ParameterBox, k_max: int,
                    samples: int = 512, seed: int = 0) -> np.ndarray:
    """Sampled max over ``box`` of |a_k| for k = 0..k_max (raw, no safety)."""
    if samples < 1:
        raise ConfigurationError("empty sample set")
    lam = sample_boundary(box, samples, seed)
    return np.abs(family.coefficients(lam, k_max)).max(axis=0)


def tail_coefficient_bound(family: AnalyticFamily, U: ParameterBox, from_k: int,
                           k_max: int = DEFAULT_K_MAX, samples: int = 512, seed: int = 0,
                           safety: float = DEFAULT_SAFETY) -> TailCoefficientBound:
    """Estimate M = sup over k in (from_k, k_max], lambda in U, of |a_k(lambda)|.

    The sampled maximum is inflated by ``safety``; the triangle-inequality
    majorant over the box is reported next to it.
    """
    if samples < 1:
        raise ConfigurationError("empty sample set")
    if from_k < 0:
        raise DomainError("from_k must be >= 0")
    if not family.region.contains_box(U, strict=False):
        raise DomainError("U must lie inside the family's region V")
    if family.exact_degree is not None:
        k_max = min(k_max, family.exact_degree)
    if from_k >= k_max:
        return TailCoefficientBound(0.0, 0.0, 0.0, from_k, k_max, samples, safety)
    sup = coefficient_sup(family, U, k_max, samples, seed)[from_k + 1 :]
    raw = float(sup.max())
    maj = family.rule.majorant(U.bounds(), k_max)[from_k + 1 :]
    return TailCoefficientBound(
        value=safety * raw, raw_max=raw, majorant=float(maj.max()),
        from_k=from_k, k_max=k_max, sample_count=samples, safety=safety,
        argmax_k=int(from_k + 1 + np.argmax(sup)),
    )
