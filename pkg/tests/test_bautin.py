import numpy as np
import pytest

from bautinkit.bautin import (bautin_index_along_curve, c_mu_estimate, central_set_probe,
                              estimate_N_c, growth_indicators, growth_profile, maximal_multiplicity)
from bautinkit.catalog import catalog
from bautinkit.errors import ConfigurationError, NoFiniteN, RouteMismatch, Unsupported
from bautinkit.family import AnalyticFamily, ExplicitPolynomials, MultiPoly
from bautinkit.regions import ParameterBox
from bautinkit.zeros import multiplicity_indicator


def test_estimate_example1(ex1):
    est = estimate_N_c(ex1.family, ex1.K, ex1.O, ex1.U)
    assert est.N == 2
    # sup of |a_k| / (max_U |a_k| * head) is 1 / 0.81 (max_U |a_k| = 0.81 for k = 4, 5)
    assert est.raw_sup == pytest.approx(1 / 0.81, rel=1e-9)
    assert est.c_of_N == pytest.approx(1.1 / 0.81, rel=1e-9)
    assert est.skipped_k == (3,)
    assert est.witness[0] in (4, 5)
    assert ex1.O.contains(est.witness[1])


def test_estimate_example2(ex2):
    est = estimate_N_c(ex2.family, ex2.K, ex2.O_sequence[-1], ex2.U)
    assert est.N == 10 and est.c_of_N == 0.0 and est.witness is None


def test_estimate_deterministic(ex1):
    a = estimate_N_c(ex1.family, ex1.K, ex1.O, ex1.U, seed=3)
    b = estimate_N_c(ex1.family, ex1.K, ex1.O, ex1.U, seed=3)
    assert a == b


def test_estimate_rejects_bad_nesting(ex1):
    with pytest.raises(ConfigurationError):
        estimate_N_c(ex1.family, ex1.K, ex1.U, ex1.O)


def test_estimate_needs_U_in_V(ex1):
    with pytest.raises(ConfigurationError):
        estimate_N_c(ex1.family, ex1.K, ex1.O, ParameterBox.ball(3, 1.5))


def test_no_finite_N_when_k_max_too_small():
    # a_k = l^(4 - k): every head through N < 4 is beaten by a_(N+1) near l = 0
    polys = tuple(MultiPoly({(4 - k,): 1.0}, 1) for k in range(5))
    fam = AnalyticFamily(ExplicitPolynomials(polys), ParameterBox.ball(1, 1.0))
    K, O, U = ParameterBox.ball(1, 0.0), ParameterBox.ball(1, 0.3), ParameterBox.ball(1, 0.9)
    assert estimate_N_c(fam, K, O, U).N == 4
    with pytest.raises(NoFiniteN) as exc:
        estimate_N_c(fam, K, O, U, k_max=3)
    assert [t[0] for t in exc.value.trace] == [0, 1, 2]


def test_growth_indicators_match_scalar(ex1):
    lam = np.array([[0.1, 0.2j, 0.5], [0, 0, 0.4], [0.3, -0.1, 0]], dtype=complex)
    vec = growth_indicators(ex1.family, lam, 0.05)
    for row, v in zip(lam, vec):
        assert v == pytest.approx(multiplicity_indicator(ex1.family, row, 0.05).value, abs=1e-6)


def test_growth_indicators_central_is_nan(ex1):
    vals = growth_indicators(ex1.family, np.zeros((2, 3), dtype=complex), 0.05)
    assert np.isnan(vals).all()


def test_growth_profile_example2(ex2):
    prof = growth_profile(ex2.family, ex2.O_sequence[-1])
    assert prof.value == 10
    assert [ind.rounded for ind in prof.indicators][-2:] == [10, 10]


def test_maximal_multiplicity_example1(ex1):
    mm = maximal_multiplicity(ex1.family, ex1.K, ex1.O_sequence, ex1.U)
    assert (mm.value, mm.ineq, mm.growth) == (2, 2, 2)


def test_maximal_multiplicity_example2_growth(ex2):
    assert maximal_multiplicity(ex2.family, ex2.K, ex2.O_sequence, route="growth").value == 10


@pytest.mark.parametrize("name", sorted(catalog()))
def test_routes_agree_with_known_mu(name):
    e = catalog()[name]()
    mm = maximal_multiplicity(e.family, e.K, e.O_sequence, e.U)
    assert mm.ineq == mm.growth == e.known_mu


def test_route_validation(ex1):
    with pytest.raises(ConfigurationError):
        maximal_multiplicity(ex1.family, ex1.K, ex1.O_sequence, ex1.U, route="fast")
    with pytest.raises(ConfigurationError):
        maximal_multiplicity(ex1.family, ex1.K, ex1.O_sequence[:1], ex1.U)
    with pytest.raises(ConfigurationError):
        maximal_multiplicity(ex1.family, ex1.K, ex1.O_sequence, None, route="ineq")


def test_route_mismatch_raised(ex1, monkeypatch):
    import bautinkit.bautin as b
    real = b.growth_profile
    monkeypatch.setattr(b, "growth_profile",
                        lambda *a, **k: b.GrowthProfile(a[1], (), 5))
    with pytest.raises(RouteMismatch) as exc:
        maximal_multiplicity(ex1.family, ex1.K, ex1.O_sequence, ex1.U)
    assert (exc.value.ineq, exc.value.growth) == (2, 5)
    monkeypatch.setattr(b, "growth_profile", real)


def test_c_mu_estimate(ex1, ex2):
    assert c_mu_estimate(ex1.family, ex1.K, ex1.O_sequence, ex1.U) == pytest.approx(1.1 / 0.81)
    assert c_mu_estimate(ex2.family, ex2.K, ex2.O_sequence, ex2.U) == 0.0


def test_central_probe(ex1):
    probes = central_set_probe(ex1.family, ex1.O, 2, samples=32, points=[[0, 0, 0], [0, 0, 1e-10]])
    assert probes[0].central and probes[1].central is False
    assert all(p.consistent for p in probes)
    assert sum(p.central for p in probes) == 1


def test_curve_index_through_origin(ex1):
    res = bautin_index_along_curve(ex1.family, [[0], [0], [0, 1]])
    assert res.d == 2
    assert len(res.common_zeros) == 1
    z, mult = res.common_zeros[0]
    assert abs(z) < 1e-12 and mult == 2


def test_curve_index_example2(ex2):
    res = bautin_index_along_curve(ex2.family, [[0, 0.5]])
    assert res.d == 10
    assert res.common_zeros[0][1] == 1


def test_curve_index_constant_curve(ex1):
    assert bautin_index_along_curve(ex1.family, [[0.5], [0], [0]]).d == 0


def test_curve_index_zero_outside_disk():
    # a_0 = l - 0.95, a_1 = l
    polys = (MultiPoly({(1,): 1.0, (0,): -0.95}, 1), MultiPoly({(1,): 1.0}, 1))
    fam = AnalyticFamily(ExplicitPolynomials(polys), ParameterBox.ball(1, 2.0))
    # along l = w, a_0 vanishes at w = 0.95 where a_1 does not
    assert bautin_index_along_curve(fam, [[0, 1]]).d == 1
    # along l = -0.5 + 0.4 w the zero of a_0 sits at w = 3.625, so a_0 is a unit
    assert bautin_index_along_curve(fam, [[-0.5, 0.4]]).d == 0


def test_curve_index_needs_explicit(exp_z):
    with pytest.raises(Unsupported):
        bautin_index_along_curve(exp_z, [[0]] * 3)


def test_curve_index_image_check(ex1):
    with pytest.raises(ConfigurationError):
        bautin_index_along_curve(ex1.family, [[0], [0], [0, 1]], O=ex1.O)


def test_projection_lands_on_head_zeros():
    from bautinkit.bautin import project_to_head_zeros
    from bautinkit.catalog import exp_poly_entry
    e = exp_poly_entry(2, 1, 1)
    starts = np.random.default_rng(0).uniform(-0.5, 0.5, size=(8, 8)) + 0j
    proj = project_to_head_zeros(e.family, starts, 3, e.O)
    scale = np.abs(e.family.coefficients(starts, 4)).max(axis=1)
    A = np.abs(e.family.coefficients(proj, 4))
    assert e.O.contains(proj).all()
    assert np.all(A[:, :3].max(axis=1) < 1e-12 * scale)
    # some starts collapse onto the central set; the others are order-3 witnesses
    assert np.sum(A[:, 3] > 1e-8 * scale) >= 2


def test_codimension_one_witness_found():
    # c1 e^(q1) + c2 e^(q2): multiplicity 1 only on the hypersurface a_0 = 0
    from bautinkit.catalog import exp_poly_entry
    e = exp_poly_entry(2, 0, 1)
    mm = maximal_multiplicity(e.family, e.K, e.O_sequence, e.U)
    assert mm.ineq == mm.growth == 1


@pytest.mark.parametrize("name", sorted(catalog()))
def test_N_monotone_as_O_shrinks(name):
    e = catalog()[name]()
    last = e.O_sequence[-1]
    between = ParameterBox(last.centers, tuple((o + k) / 2 for o, k in zip(last.radii, e.K.radii)))
    boxes = [*e.O_sequence, between]
    Ns = [estimate_N_c(e.family, e.K, O, e.U).N for O in boxes]
    assert all(b <= a for a, b in zip(Ns, Ns[1:])), Ns


@pytest.mark.parametrize("make,K_radius", [("example1_quadratic", 0.5), ("example2_nonradical", 0.5)])
def test_curve_index_below_maximal_multiplicity(make, K_radius):
    e = catalog()[make]()
    dim = e.family.dimension
    K = ParameterBox.ball(dim, K_radius)
    O_sequence = (ParameterBox.ball(dim, 0.7), ParameterBox.ball(dim, 0.6))
    mu = maximal_multiplicity(e.family, K, O_sequence, e.U).value
    rng = np.random.default_rng(5)
    for _ in range(20):
        deg = int(rng.integers(0, 4))
        phi = [rng.normal(size=deg + 1) + 1j * rng.normal(size=deg + 1) for _ in range(dim)]
        # scale so that the image of the unit disk sits inside K
        phi = [c * K_radius / (np.abs(c).sum() * 1.01) for c in phi]
        assert bautin_index_along_curve(e.family, phi, O=None).d <= mu


def test_central_probe_example2(ex2):
    probes = central_set_probe(ex2.family, ex2.O, 10, samples=16, points=[[0.0]])
    assert probes[0].central and probes[0].consistent
