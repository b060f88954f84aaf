import numpy as np
import pytest

from bautinkit.catalog import example1_quadratic, example2_nonradical, monomial_entry
from bautinkit.family import AnalyticFamily, ExplicitPolynomials, ExpPolynomial, MultiPoly
from bautinkit.regions import ParameterBox


@pytest.fixture(scope="session")
def ex1():
    return example1_quadratic()


@pytest.fixture(scope="session")
def ex2():
    return example2_nonradical()


@pytest.fixture(scope="session")
def exp_z():
    """e^z as the (m, p, q) = (1, 0, 1) class at lambda = (1, 0, 1)."""
    return AnalyticFamily(ExpPolynomial(1, 0, 1), ParameterBox.ball(3, 2.0))


def poly_family(coeffs, nvars=1, radius=1.0):
    """Constant-in-lambda family with the given ascending coefficients."""
    polys = tuple(MultiPoly({(0,) * nvars: c}, nvars) if c else MultiPoly.zero(nvars) for c in coeffs)
    return AnalyticFamily(ExplicitPolynomials(polys), ParameterBox.ball(nvars, radius))


def random_poly_with_roots(rng, r, max_degree=8, gap=1e-3):
    """(ascending coefficients, roots) with every root at least ``gap`` from |z| = r."""
    d = int(rng.integers(1, max_degree + 1))
    roots = []
    while len(roots) < d:
        z = 2 * r * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        if abs(abs(z) - r) >= gap:
            roots.append(z)
    lead = complex(rng.normal(), rng.normal())
    return lead * np.poly(roots)[::-1], np.array(roots)
