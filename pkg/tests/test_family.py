import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bautinkit.errors import ConfigurationError, DomainError
from bautinkit.family import (AnalyticFamily, ExplicitPolynomials, ExpPolynomial, MultiPoly,
                              horner, tail_coefficient_bound)
from bautinkit.regions import ParameterBox

E_Z = np.array([1, 0, 1], dtype=complex)  # P = 1, Q = 0 + 1 z


def test_example1_constant_term(ex1):
    assert ex1.family.coefficient(0, [0.3, 0, 0]) == pytest.approx(0.09, abs=1e-15)


def test_coefficient_beyond_list_is_exact_zero(ex1):
    assert ex1.family.coefficient(40, [0.3, 0.2, 0.1]) == 0


def test_exp_taylor_coefficient_matches_factorial(exp_z):
    for k in range(12):
        assert exp_z.coefficient(k, E_Z) == pytest.approx(1 / math.factorial(k), rel=1e-14)


def test_exp_with_polynomial_prefactor_and_quadratic_exponent():
    # (1 + 2z) exp(0.1 + 0.3 z - 0.2 z^2) against a direct series product
    fam = AnalyticFamily(ExpPolynomial(1, 1, 2), ParameterBox.ball(5, 1.0))
    lam = np.array([0.9, 0.8, 0.1, 0.3, -0.2], dtype=complex)
    got = fam.coefficients(lam, 10)
    # oracle: truncated power series of exp via repeated multiplication
    h = np.zeros(11, dtype=complex)
    h[1], h[2] = 0.3, -0.2
    series, term = np.zeros(11, dtype=complex), np.zeros(11, dtype=complex)
    term[0] = 1
    for n in range(11):
        series += term / math.factorial(n)
        term = np.convolve(term, h)[:11]
    want = np.convolve([0.9, 0.8], series)[:11] * np.exp(0.1)
    assert np.allclose(got, want, rtol=1e-13, atol=1e-16)


def test_eval_example2_at_origin(ex2):
    value, tail = ex2.family.eval([0.5], 0, 10)
    assert value == -0.25 and tail == 0


def test_eval_degree_zero_at_origin(ex1):
    value, tail = ex1.family.eval([0.3, 0.2, 0.1], 0, 0)
    assert value == pytest.approx(0.09) and tail == 0


def test_eval_exp_half(exp_z):
    value, tail = exp_z.eval(E_Z, 0.5, 20)
    assert abs(value - math.exp(0.5)) < 1e-9
    assert tail <= 1e-9
    assert abs(value - math.exp(0.5)) <= tail + 1e-15


def test_eval_rejects_unit_modulus(exp_z):
    with pytest.raises(DomainError):
        exp_z.eval(E_Z, 1.0, 5)


def test_outside_region_is_domain_error(ex1):
    with pytest.raises(DomainError):
        ex1.family.coefficient(0, [2.0, 0, 0])


def test_taylor_polynomial_example1(ex1):
    assert np.allclose(ex1.family.taylor_polynomial([0, 0, 0.5], 2), [0, 0, 0.25])


def test_taylor_polynomial_example2(ex2):
    p = ex2.family.taylor_polynomial([0.5], 10)
    want = np.zeros(11)
    want[0], want[10] = -0.25, 0.5
    assert np.array_equal(p, want)


def test_taylor_polynomial_matches_eval(ex1):
    lam = [0.3 + 0.1j, -0.2, 0.5j]
    p = ex1.family.taylor_polynomial(lam, 4)
    z = 0.3 - 0.4j
    assert abs(complex(horner(p, z)) - ex1.family.eval(lam, z, 4)[0]) < 1e-16


def test_coefficients_deterministic(ex1):
    lam = np.array([0.1 + 0.2j, 0.3, -0.4j])
    a = ex1.family.coefficients(lam, 6)
    b = ex1.family.coefficients(lam, 6)
    assert a.tobytes() == b.tobytes()


def test_explicit_tail_zero_past_list(ex1):
    assert ex1.family.tail_bound([0.3, 0.2, 0.1], 0.9, 6) == 0.0


def test_exp_tail_is_sound_against_double_degree():
    fam = AnalyticFamily(ExpPolynomial(2, 1, 2), ParameterBox.ball(10, 1.0))
    rng = np.random.default_rng(3)
    for _ in range(100):
        lam = (rng.uniform(size=10) ** 0.5) * np.exp(2j * np.pi * rng.uniform(size=10))
        z = 0.9 * np.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
        d = int(rng.integers(4, 30))
        v_d, tail = fam.eval(lam, z, d)
        v_2d, _ = fam.eval(lam, z, 2 * d)
        assert abs(v_d - v_2d) < tail


def test_tail_bound_example1_majorant(ex1):
    res = tail_coefficient_bound(ex1.family, ParameterBox.ball(3, 1.0), 2)
    # majorant of l_i l_j on the unit ball is exactly 1
    assert res.majorant == pytest.approx(1.0)
    assert res.value <= 1.1 * res.majorant * (1 + 1e-12)
    assert res.raw_max <= 1.0 + 1e-12


def test_tail_bound_empty_tail(ex1):
    assert tail_coefficient_bound(ex1.family, ex1.U, 6).value == 0.0


def test_tail_bound_example2(ex2):
    res = tail_coefficient_bound(ex2.family, ParameterBox((0j,), (0.9,)), 1, 10)
    assert res.majorant == pytest.approx(0.9)
    assert 0.9 * 0.99 < res.raw_max <= 0.9 + 1e-12
    assert res.value == pytest.approx(1.1 * res.raw_max)
    assert res.argmax_k == 10


def test_tail_bound_monotone(ex1):
    vals = [tail_coefficient_bound(ex1.family, ex1.U, k).value for k in range(6)]
    assert all(a >= b for a, b in zip(vals, vals[1:]))
    radii = [0.5, 0.7, 0.9, 1.0]
    by_r = [tail_coefficient_bound(ex1.family, ParameterBox.ball(3, r), 2).value for r in radii]
    assert all(a <= b for a, b in zip(by_r, by_r[1:]))


def test_tail_bound_empty_samples(ex1):
    with pytest.raises(ConfigurationError):
        tail_coefficient_bound(ex1.family, ex1.U, 2, samples=0)


def test_exp_poly_rejects_bad_orders():
    with pytest.raises(ConfigurationError):
        ExpPolynomial(1, 0, 0)
    with pytest.raises(ConfigurationError):
        ExpPolynomial(0, 1, 1)


def test_multipoly_eval_and_majorant():
    p = MultiPoly({(2, 0): 1.0, (1, 1): -2.0}, 2)
    assert complex(p([1.0, 1.0])) == -1
    assert p.majorant([0.5, 2.0]) == pytest.approx(0.25 + 2.0)


@settings(max_examples=50, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
                min_size=1, max_size=8),
       st.complex_numbers(max_magnitude=0.99, allow_nan=False, allow_infinity=False))
def test_horner_matches_numpy(coeffs, z):
    want = np.polynomial.polynomial.polyval(z, coeffs)
    assert abs(complex(horner(np.array(coeffs), z)) - want) <= 1e-12 * (1 + sum(map(abs, coeffs)))
