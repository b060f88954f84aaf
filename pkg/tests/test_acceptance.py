"""The ten acceptance criteria, each at its stated tolerance.

Every test prints one ``[criterion N] PASS|FAIL ...`` line before asserting.
"""

import itertools
import json
import math
import time

import numpy as np
import pytest

from bautinkit.bautin import growth_indicators, maximal_multiplicity
from bautinkit.cartan import bernstein_doubling_check, find_good_radius, polynomial_min_modulus
from bautinkit.catalog import catalog, example1_quadratic, example2_nonradical, monomial_entry
from bautinkit.cli import run
from bautinkit.cyclicity import (find_extremal, non_central_samples, practical_radius,
                                 sandwich_pairs, verify_global_bound, verify_sandwich)
from bautinkit.errors import BautinKitError, CertificateNotFound, RouteMismatch
from bautinkit.family import horner, tail_coefficient_bound
from bautinkit.transforms import derivative_family, exp_family, product_box, product_family
from bautinkit.zeros import multiplicity_at_zero, multiplicity_indicator, winding_count

from conftest import random_poly_with_roots

EXPLICIT = (example1_quadratic, example2_nonradical)


@pytest.fixture
def verdict(capsys):
    def emit(n: int, passed: bool, detail: str):
        with capsys.disabled():
            print(f"\n[criterion {n}] {'PASS' if passed else 'FAIL'} {detail}")
        return passed
    return emit


def growth_mu(family, K, O_sequence) -> int:
    return maximal_multiplicity(family, K, O_sequence, route="growth").value


def test_criterion_01_example1(verdict, capsys):
    t0 = time.perf_counter()
    e = example1_quadratic()
    mm = maximal_multiplicity(e.family, e.K, e.O_sequence, e.U, route="both")
    code = run(["count-zeros", "--family", e.name, "--lambda", "0", "0", "0.5", "--radius", "0.01",
                "--no-timestamp"])
    count = json.loads(capsys.readouterr().out)["result"]["count"]
    elapsed = time.perf_counter() - t0
    ok = mm.ineq == mm.growth == 2 and code == 0 and count == 2 and elapsed < 10
    verdict(1, ok, f"mu ineq={mm.ineq} growth={mm.growth}, count={count}, {elapsed:.2f}s < 10s")
    assert ok


def test_criterion_02_example2(verdict):
    t0 = time.perf_counter()
    e = example2_nonradical()
    mu = growth_mu(e.family, e.K, e.O_sequence)
    away = multiplicity_at_zero(e.family, [0.3]).value
    ext = find_extremal(e.family, e.O_sequence[-1], 10, 0.1)
    elapsed = time.perf_counter() - t0
    ok = mu == 10 and away == 0 and ext.found and ext.count == 10 and elapsed < 30
    verdict(2, ok, f"growth mu={mu}, multiplicity(0.3)={away}, extremal count={ext.count} "
                   f"at lambda={ext.lam}, {elapsed:.2f}s < 30s")
    assert ok


def test_criterion_03_sandwich(verdict):
    details, ok = [], True
    for make in EXPLICIT:
        e = make()
        mu = e.known_mu
        lam = non_central_samples(e.family, e.O_sequence[-1], 50)
        r_prac = practical_radius(e.family, lam, mu, box=e.O_sequence[-1])
        rows = verify_sandwich(e.family, mu, sandwich_pairs(lam, r_prac)) if r_prac else []
        bad = sum(not r.passed for r in rows)
        ok &= r_prac is not None and len(rows) == 50 and bad == 0
        details.append(f"{e.name}: r_prac={r_prac}, {len(rows)} pairs, {bad} violations")
    verdict(3, ok, "; ".join(details))
    assert ok


def test_criterion_04_global_bound(verdict):
    details, ok = [], True
    for make in EXPLICIT:
        e = make()
        mm = maximal_multiplicity(e.family, e.K, e.O_sequence, e.U, route="ineq")
        c = mm.ineq_estimates[-1].c_of_N
        M = tail_coefficient_bound(e.family, e.U, mm.value).value
        lam = non_central_samples(e.family, e.O_sequence[-1], 100, seed=1)
        bound, rows = verify_global_bound(e.family, mm.value, c, M, lam)
        bad = sum(not r.passed for r in rows)
        top = max(r.N_quarter_f for r in rows if r.N_quarter_f is not None)
        ok &= len(rows) == 100 and bad == 0
        details.append(f"{e.name}: bound={bound:.3f}, max N_1/4={top}, {bad} violations")
    verdict(4, ok, "; ".join(details))
    assert ok


def test_criterion_05_winding_oracle(verdict):
    rng = np.random.default_rng(20240501)
    mismatches = 0
    for _ in range(200):
        r = float(rng.uniform(0.05, 0.95))
        coeffs, roots = random_poly_with_roots(rng, r, max_degree=8, gap=1e-3)
        got = winding_count(lambda z: horner(coeffs, z), r).count
        mismatches += got != int(np.sum(np.abs(roots) < r))
    ok = mismatches == 0
    verdict(5, ok, f"200 polynomials, {mismatches} mismatches")
    assert ok


def test_criterion_06_monomial_indicator(verdict):
    grid = [0.5 * 2.0**-j for j in range(12)]
    worst = 0.0
    for k in range(13):
        e = monomial_entry(k)
        for R in grid:
            worst = max(worst, abs(multiplicity_indicator(e.family, [1.0], R).value - k))
    ok = worst <= 1e-6
    verdict(6, ok, f"k=0..12, R=0.5..{grid[-1]:.2e}: max |indicator - k| = {worst:.2e} <= 1e-6")
    assert ok


def test_criterion_07_lemma_certificates(verdict):
    rng = np.random.default_rng(7)
    failures = 0
    for _ in range(100):
        d = int(rng.integers(0, 7))
        g = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        for r in (0.1, 0.3):
            try:
                lemma = find_good_radius(g, r)
                poly = polynomial_min_modulus(g, d, r)
                failures += not (lemma.certified and poly.certified)
            except CertificateNotFound:
                failures += 1
    ok = failures == 0
    verdict(7, ok, f"100 polynomials x r in {{0.1, 0.3}}: {failures} certificate failures")
    assert ok


def test_criterion_08_bernstein(verdict):
    rng = np.random.default_rng(8)
    failures, worst = 0, 0.0
    for _ in range(500):
        d = int(rng.integers(1, 11))
        g = rng.normal(size=d + 1) + 1j * rng.normal(size=d + 1)
        s = float(rng.uniform(1.1, 6 * math.e + 1))
        res = bernstein_doubling_check(g, d, float(rng.uniform(0.01, 0.5)), s, tol=1e-9)
        failures += not res.passed
        worst = max(worst, res.ratio / res.bound)
    ok = failures == 0
    verdict(8, ok, f"500 draws: {failures} failures, max ratio / s^d = {worst:.6f}")
    assert ok


def test_criterion_09_route_agreement(verdict):
    mismatches, values = 0, []
    for name, make in sorted(catalog().items()):
        e = make()
        try:
            mm = maximal_multiplicity(e.family, e.K, e.O_sequence, e.U, route="both")
            values.append(f"{name}={mm.value}")
        except RouteMismatch as exc:
            mismatches += 1
            values.append(f"{name}: ineq {exc.ineq} != growth {exc.growth}")
    ok = mismatches == 0
    verdict(9, ok, f"{len(values)} entries, {mismatches} mismatches ({', '.join(values)})")
    assert ok


def test_criterion_10_transform_rules(verdict):
    entries = [make() for _, make in sorted(catalog().items())]
    mu = {e.name: growth_mu(e.family, e.K, e.O_sequence) for e in entries}
    violations, errors = [], []

    # product rule: 20 ordered pairs spread over all of them
    all_pairs = list(itertools.product(entries, repeat=2))
    pairs = [all_pairs[i] for i in np.linspace(0, len(all_pairs) - 1, 20).astype(int)]
    products = []  # (family, K, O_sequence, mu_f + mu_g)
    for f, g in pairs:
        fam = product_family(f.family, g.family)
        K = product_box(f.K, g.K)
        O = [product_box(a, b) for a, b in zip(f.O_sequence, g.O_sequence)]
        products.append((fam, K, O, mu[f.name] + mu[g.name]))
        try:
            v = growth_mu(fam, K, O)
            if v > mu[f.name] + mu[g.name]:
                violations.append(f"product {f.name}*{g.name}: {v}")
        except BautinKitError as exc:
            errors.append(f"product {f.name}*{g.name}: {exc}")

    # exponential rule: exp of every entry, topped up to 10 with products
    exp_cases = [(e.family, e.K, e.O_sequence, e.name) for e in entries]
    exp_cases += [(fam, K, O, fam.name) for fam, K, O, _ in products[1 : 11 - len(entries)]]
    for fam, K, O, name in exp_cases:
        try:
            v = growth_mu(exp_family(fam), K, O)
            if v != 0:
                violations.append(f"exp({name}): {v}")
        except BautinKitError as exc:
            errors.append(f"exp({name}): {exc}")

    # derivative rule on shifted-coefficient families: every entry, every
    # derivative (against its second derivative), topped up to 20 with products
    deriv_cases = [(e.family, e.K, e.O_sequence) for e in entries]
    deriv_cases += [(derivative_family(e.family), e.K, e.O_sequence) for e in entries]
    deriv_cases += [(fam, K, O) for fam, K, O, _ in products[11 : 31 - 2 * len(entries)]]
    for fam, K, O in deriv_cases:
        try:
            base = growth_mu(fam, K, O)
            d = growth_mu(derivative_family(fam), K, O)
            if base > d + 1:
                violations.append(f"d/dz {fam.name}: mu_f={base}, mu_f'={d}")
        except BautinKitError as exc:
            errors.append(f"d/dz {fam.name}: {exc}")

    counts = (len(pairs), len(exp_cases), len(deriv_cases))
    ok = counts == (20, 10, 20) and not violations and not errors
    verdict(10, ok, f"product {counts[0]}, exp {counts[1]}, derivative {counts[2]} families: "
                    f"{len(violations)} violations, {len(errors)} errors {violations + errors}")
    assert ok
