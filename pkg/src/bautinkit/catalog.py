"""Built-in families with known maximal multiplicities.

Each entry carries its own nested boxes ``K < O_sequence[-1] < ... <
O_sequence[0] < U < V`` so that estimators can be run on it directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConfigurationError
from .family import AnalyticFamily, ExplicitPolynomials, ExpPolynomial, MultiPoly
from .regions import ParameterBox

BRUDNYI_R0 = 0.05


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    family: AnalyticFamily
    known_mu: int
    central_description: str
    is_central: Callable[[np.ndarray], np.ndarray]
    K: ParameterBox
    O_sequence: tuple
    U: ParameterBox
    notes: tuple = ()
    bounds: dict = field(default_factory=dict)

    @property
    def O(self) -> ParameterBox:
        return self.O_sequence[0]

    @property
    def regions(self) -> tuple:
        return (self.K, self.O, self.U)


def _mono(nvars, *exps, coef=1.0):
    e = [0] * nvars
    for i in exps:
        e[i] += 1
    return MultiPoly({tuple(e): coef}, nvars)


def _ball_entry_boxes(dim: int, center=0j, v=1.0, k=0.5, o=(0.7, 0.6), u=0.9):
    V = ParameterBox.ball(dim, v, center)
    return V, ParameterBox.ball(dim, k, center), tuple(ParameterBox.ball(dim, r, center) for r in o), \
        ParameterBox.ball(dim, u, center)


def example1_quadratic() -> CatalogEntry:
    """f = l1^2 + l2^2 z + l3^2 z^2 + l1 l2 z^4 + l1 l3 z^5 + l2 l3 z^6 on the unit ball of C^3."""
    n = 3
    z = MultiPoly.zero(n)
    polys = (_mono(n, 0, 0), _mono(n, 1, 1), _mono(n, 2, 2), z,
             _mono(n, 0, 1), _mono(n, 0, 2), _mono(n, 1, 2))
    V, K, O_seq, U = _ball_entry_boxes(n)
    fam = AnalyticFamily(ExplicitPolynomials(polys), V, name="example1_quadratic")
    return CatalogEntry(
        "example1_quadratic", fam, 2, "{0}",
        lambda lam: np.all(np.abs(np.atleast_2d(lam)) == 0, axis=1),
        K, O_seq, U,
        notes=("every cross term l_i l_j is bounded by max |l_i|^2, so the first three "
               "coefficients control the rest; at l = (0, 0, t) the function is t^2 z^2",),
    )


def example2_nonradical() -> CatalogEntry:
    """f = l (z^10 - l) on the unit disk; the Bautin ideal (l^2, l) is not radical."""
    polys = [MultiPoly.zero(1) for _ in range(11)]
    polys[0] = MultiPoly({(2,): -1.0}, 1)
    polys[10] = MultiPoly({(1,): 1.0}, 1)
    V = ParameterBox((0j,), (1.0,))
    K = ParameterBox((0j,), (0.0,))
    fam = AnalyticFamily(ExplicitPolynomials(tuple(polys)), V, name="example2_nonradical")
    return CatalogEntry(
        "example2_nonradical", fam, 10, "{0}",
        lambda lam: np.abs(np.atleast_2d(lam)[:, 0]) == 0,
        K, (ParameterBox((0j,), (0.1,)), ParameterBox((0j,), (0.05,))), ParameterBox((0j,), (0.9,)),
        notes=("multiplicity 0 at every l != 0 but 10 at l = 0: ten zeros of modulus "
               "|l|^(1/10) approach the origin",),
    )


def monomial_entry(k: int) -> CatalogEntry:
    """f = l z^k with l near 1: every member vanishes to order exactly k."""
    if k < 0:
        raise ConfigurationError("k must be >= 0")
    polys = [MultiPoly.zero(1) for _ in range(k + 1)]
    polys[k] = MultiPoly({(1,): 1.0}, 1)
    c = 1 + 0j
    V = ParameterBox((c,), (0.5,))
    fam = AnalyticFamily(ExplicitPolynomials(tuple(polys)), V, name=f"monomial_{k}")
    return CatalogEntry(
        f"monomial_{k}", fam, k, "empty",
        lambda lam: np.zeros(len(np.atleast_2d(lam)), dtype=bool),
        ParameterBox((c,), (0.1,)), (ParameterBox((c,), (0.3,)), ParameterBox((c,), (0.2,))),
        ParameterBox((c,), (0.4,)),
    )


# --------------------------------------------------------------------------- exponential polynomials


def ode_order(m: int, p: int, q: int) -> int:
    """Order of a linear ODE with polynomial coefficients solved by every F in the (m, p, q) class."""
    _check_mpq(m, p, q)
    if q == 1:
        return m * (p + 1)
    return (p + 1) * (q**m - 1) // (q - 1)


def brudnyi_bound(m: int, p: int, q: int) -> int:
    """Zero-count bound 3 * 2^(m-1) * (p + q - 1) in disks of radius <= r_0."""
    if m < 1 or p < 0 or q < 0 or p + q < 1:
        raise ConfigurationError(f"need m >= 1, p + q >= 1; got {m, p, q}")
    return 3 * 2 ** (m - 1) * (p + q - 1)


def mu_bound_q1(m: int, p: int) -> int:
    return m * (p + 1) - 1


def _check_mpq(m, p, q):
    if m < 1 or p < 0 or q < 1:
        raise ConfigurationError(f"need m >= 1, p >= 0, q >= 1; got {m, p, q}")


def exp_poly_entry(m: int, p: int, q: int, assemble=None, assemble_bounds=None,
                   known_mu: int | None = None) -> CatalogEntry:
    """F = sum_j P_j exp(Q_j) with every P/Q coefficient a parameter in the unit polydisk.

    The central set is where every P_j vanishes.  ``known_mu`` defaults to p
    for m = 1 (P exp(Q) has the zeros of P) and to m (p + 1) - 1 for q = 1:
    the first m (p + 1) Taylor coefficients are an invertible linear image of
    the P_j coefficients when the b_j differ, so all but the last can be made
    to vanish.  Other entries carry only the bounds.
    """
    _check_mpq(m, p, q)
    rule = ExpPolynomial(m, p, q, assemble, assemble_bounds)
    V, K, O_seq, U = _ball_entry_boxes(rule.nvars)
    name = f"exp_m{m}_p{p}_q{q}"
    fam = AnalyticFamily(rule, V, name=name)
    bounds = {"ode_order": ode_order(m, p, q), "brudnyi": brudnyi_bound(m, p, q),
              "brudnyi_r0": BRUDNYI_R0}
    if q == 1:
        bounds["mu_bound"] = mu_bound_q1(m, p)
    if known_mu is None and assemble is None:
        if q == 1:
            known_mu = mu_bound_q1(m, p)
        elif m == 1:
            known_mu = p
    block = p + q + 2

    def is_central(lam):
        lam = np.atleast_2d(lam).reshape(-1, m, block)
        return np.all(np.abs(lam[:, :, : p + 1]) == 0, axis=(1, 2))

    return CatalogEntry(name, fam, -1 if known_mu is None else known_mu,
                        "all P_j coefficients zero", is_central, K, O_seq, U,
                        notes=("zero-count bound from the ODE order is heuristic below r_0",),
                        bounds=bounds)


def ode_residual(entry: CatalogEntry, lam, order_terms: int = 40) -> float:
    """Relative residual of prod_j (D - b_j)^(p+1) F = 0 for q = 1, m <= 2.

    Here F = sum_j P_j exp(c_j + b_j z).  The operator is applied to the
    Taylor coefficient array (D maps a_k to (k+1) a_(k+1)) and the low
    coefficients, unaffected by truncation, are compared with the input scale.
    """
    rule = entry.family.rule
    if not isinstance(rule, ExpPolynomial) or rule.q != 1 or rule.m > 2:
        raise ConfigurationError("the ODE residual is assembled only for q = 1, m <= 2")
    lam = np.asarray(lam, dtype=complex)
    _, Q = rule.assemble(lam[None, :])
    b = Q[0, :, 1]
    order = ode_order(rule.m, rule.p, 1)
    K = order_terms + order
    a = entry.family.coefficients(lam, K)
    scale = np.abs(a).max() or 1.0
    for bj in b:
        for _ in range(rule.p + 1):
            a = np.arange(1, len(a)) * a[1:] - bj * a[:-1]
    return float(np.abs(a[:order_terms]).max() / scale)


CATALOG_EXP = ((1, 0, 1), (1, 1, 1), (1, 2, 1), (1, 0, 2), (2, 0, 1), (2, 1, 1))


def catalog() -> dict[str, Callable[[], CatalogEntry]]:
    """Entry constructors by name."""
    entries: dict[str, Callable[[], CatalogEntry]] = {
        "example1_quadratic": example1_quadratic,
        "example2_nonradical": example2_nonradical,
        "monomial_3": lambda: monomial_entry(3),
    }
    for m, p, q in CATALOG_EXP:
        entries[f"exp_m{m}_p{p}_q{q}"] = (lambda m=m, p=p, q=q: exp_poly_entry(m, p, q))
    return entries


def get_entry(name: str) -> CatalogEntry:
    if name.startswith("monomial_") and name[9:].isdigit():
        return monomial_entry(int(name[9:]))
    m = _parse_exp_name(name)
    if m is not None:
        return exp_poly_entry(*m)
    try:
        return catalog()[name]()
    except KeyError:
        raise ConfigurationError(f"unknown catalog entry {name!r}; known: {sorted(catalog())}") from None


def _parse_exp_name(name: str):
    parts = name.split("_")
    if len(parts) == 4 and parts[0] == "exp":
        try:
            return int(parts[1][1:]), int(parts[2][1:]), int(parts[3][1:])
        except ValueError:
            return None
    return None
