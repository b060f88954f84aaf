"""Command-line front end.

    bautinkit count-zeros --family example1_quadratic --lambda 0 0 0.5 --radius 0.01
    bautinkit mu --family example2_nonradical --route both
    bautinkit catalog-verify example1_quadratic --out report.json

Every command writes one JSON report (stdout, or ``--out``).  Exit status:
0 when every declared check passes, 1 on a failed check or numerical
error, 2 on usage or configuration errors.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys

import numpy as np

from .bautin import central_set_probe, estimate_N_c, growth_indicators, maximal_multiplicity
from .cartan import bernstein_doubling_check, find_good_radius, polynomial_min_modulus
from .catalog import CatalogEntry, get_entry, ode_residual
from .config import (DEFAULT_KNOBS, Problem, RunConfig, load_problem, parse_knobs,
                     problem_from_sections, read_ini, validate_knobs)
from .cyclicity import cyclicity_report, find_extremal
from .errors import BautinKitError, ConfigurationError
from .regions import sample_boundary, sample_mixed
from .report import build_report, check, write_report
from .zeros import count_zeros_family, multiplicity_at_zero

log = logging.getLogger("bautinkit")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from None


def _common(sub_or_main, suppress: bool):
    default = argparse.SUPPRESS if suppress else None
    sub_or_main.add_argument("--config", default=default, help="INI run configuration")
    sub_or_main.add_argument("--seed", type=int, default=default)
    sub_or_main.add_argument("--out", default=default, help="write the report here instead of stdout")
    sub_or_main.add_argument("--tolerance", type=float, default=default,
                             help="relative tolerance of value checks")
    sub_or_main.add_argument("--no-timestamp", action="store_true",
                             default=argparse.SUPPRESS if suppress else False)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bautinkit", description=__doc__.split("\n\n")[0])
    _common(parser, suppress=False)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        p = sub.add_parser(name, help=help_text)
        _common(p, suppress=True)
        return p

    p = add("count-zeros", "zeros of f_lambda in a closed disk")
    p.add_argument("--family")
    p.add_argument("--lambda", dest="lam", nargs="+", type=_complex, required=True)
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--degree", type=int)
    p.add_argument("--expect", type=int)

    p = add("multiplicity", "vanishing order at 0 from the growth indicator")
    p.add_argument("--family")
    p.add_argument("--lambda", dest="lam", nargs="+", type=_complex, required=True)
    p.add_argument("--radii", nargs="+", type=float)
    p.add_argument("--expect", type=int)

    p = add("estimate-bautin", "least N and c(N) of the coefficient inequality")
    p.add_argument("--family")
    p.add_argument("--kmax", type=int)
    p.add_argument("--samples", type=int)

    p = add("mu", "maximal multiplicity on K")
    p.add_argument("--family")
    p.add_argument("--route", choices=("ineq", "growth", "both"), default="both")
    p.add_argument("--expect", type=int)

    p = add("cyclicity", "radius, sandwich and global bounds, extremal search")
    p.add_argument("--family")
    p.add_argument("--extremal-radius", type=float)

    p = add("cartan", "minimum-modulus certificate for a polynomial")
    p.add_argument("--poly", nargs="+", type=_complex, required=True,
                   help="ascending coefficients c0 c1 ...")
    p.add_argument("--radius", type=float, required=True)
    p.add_argument("--grid", type=int, default=257)

    p = add("catalog-verify", "run every known-value check of a catalog entry")
    p.add_argument("name")
    return parser


# --------------------------------------------------------------------------- commands


def _problem(args, cfg_sections) -> Problem:
    source = getattr(args, "family", None)
    if source:
        return load_problem(source)
    if cfg_sections:
        return problem_from_sections(cfg_sections)
    raise ConfigurationError("no family: pass --family NAME|PATH or --config PATH")


def _lam(problem: Problem, values):
    lam = np.array(values, dtype=complex)
    if lam.size != problem.family.dimension:
        raise ConfigurationError(f"--lambda needs {problem.family.dimension} values, got {lam.size}")
    return lam


def cmd_count_zeros(args, problem, knobs):
    res = count_zeros_family(problem.family, _lam(problem, args.lam), args.radius, args.degree,
                             degree_cap=knobs["degree_cap"])
    checks = []
    if args.expect is not None:
        checks.append(check("count", args.expect, res.count, res.count == args.expect))
    return res, checks


def cmd_multiplicity(args, problem, knobs):
    res = multiplicity_at_zero(problem.family, _lam(problem, args.lam), args.radii)
    checks = []
    if args.expect is not None:
        checks.append(check("multiplicity", args.expect, res.value, res.value == args.expect))
    return res, checks


def cmd_estimate_bautin(args, problem, knobs):
    k_max = args.kmax or knobs["k_max"]
    samples = args.samples or knobs["samples"]
    est = estimate_N_c(problem.family, problem.K, problem.O_sequence[-1], problem.U, k_max,
                       samples, knobs["seed"])
    return est, []


def cmd_mu(args, problem, knobs):
    res = maximal_multiplicity(problem.family, problem.K, problem.O_sequence, problem.U, args.route,
                               knobs["k_max"], knobs["samples"], knobs["growth_samples"], knobs["seed"])
    checks = []
    if args.expect is not None:
        checks.append(check("mu", args.expect, res.value, res.value == args.expect))
    return res, checks


def _cyclicity_checks(rep) -> list:
    checks = [
        check("sandwich_violations", 0, rep.sandwich_violations, rep.sandwich_violations == 0),
        check("sandwich_rows", ">0", len(rep.sandwich_results), len(rep.sandwich_results) > 0),
        check("global_violations", 0, rep.global_violations, rep.global_violations == 0),
    ]
    if rep.extremal is not None:
        checks.append(check("extremal_found", rep.mu, rep.extremal.count, rep.extremal.found))
    return checks


def cmd_cyclicity(args, problem, knobs):
    rep = cyclicity_report(problem.family, problem.K, problem.O_sequence, problem.U,
                           knobs["sandwich_samples"], knobs["global_samples"], knobs["seed"],
                           knobs["k_max"], args.extremal_radius, knobs["search_budget"])
    return rep, _cyclicity_checks(rep)


def cmd_cartan(args, problem, knobs):
    coeffs = np.trim_zeros(np.array(args.poly, dtype=complex), "b")
    if coeffs.size == 0:
        raise ConfigurationError("--poly is identically zero")
    d = coeffs.size - 1
    lemma = find_good_radius(coeffs, args.radius, args.grid)
    poly = polynomial_min_modulus(coeffs, d, args.radius, args.grid)
    doubling = bernstein_doubling_check(coeffs, d, args.radius, 6 * math.e + 1, knobs["tolerance"])
    result = {"degree": d, "lemma": lemma, "polynomial": poly, "doubling": doubling}
    checks = [
        check("lemma_certified", True, lemma.certified, lemma.certified),
        check("polynomial_certified", True, poly.certified, poly.certified),
        check("doubling", doubling.bound, doubling.ratio, doubling.passed),
    ]
    return result, checks


def verify_entry(entry: CatalogEntry, knobs: dict) -> tuple[dict, list]:
    """All known-value checks of one catalog entry."""
    fam, seed = entry.family, knobs["seed"]
    checks, result = [], {"name": entry.name, "known_mu": entry.known_mu, "bounds": entry.bounds}

    mm = maximal_multiplicity(fam, entry.K, entry.O_sequence, entry.U, "both", knobs["k_max"],
                              knobs["samples"], knobs["growth_samples"], seed)
    result["mu"] = {"value": mm.value, "ineq": mm.ineq, "growth": mm.growth}
    if entry.known_mu >= 0:
        checks.append(check("mu_both_routes", entry.known_mu, mm.value, mm.value == entry.known_mu))

    centre = entry.K.center_array[None, :]
    probe = central_set_probe(fam, entry.O, max(mm.value, 0), 100, seed, points=centre)
    truth = entry.is_central(np.array([p.lam for p in probe]))
    agree = sum(bool(p.central) == bool(t) for p, t in zip(probe, truth))
    consistent = all(p.consistent for p in probe)
    checks.append(check("central_set_membership", len(probe), agree, agree == len(probe) and consistent))

    rep = cyclicity_report(fam, entry.K, entry.O_sequence, entry.U, knobs["sandwich_samples"],
                           knobs["global_samples"], seed, knobs["k_max"], None, knobs["search_budget"])
    result["cyclicity"] = rep
    checks.extend(_cyclicity_checks(rep))

    b = entry.bounds
    if "mu_bound" in b:
        lam = sample_mixed(entry.U, 256, seed)
        top = float(np.nanmax(growth_indicators(fam, lam, 0.01)))
        checks.append(check("indicator_below_mu_bound", b["mu_bound"], top,
                            top <= b["mu_bound"] + 0.1))
        rule = fam.rule
        if rule.m <= 2:
            res = max(ode_residual(entry, x) for x in sample_boundary(entry.U, 8, seed))
            tol = max(knobs["tolerance"], 1e-9)
            checks.append(check("ode_residual", f"<= {tol:g}", res, res <= tol))
    elif "ode_order" in b:
        limit = min(b["ode_order"] - 1, b["brudnyi"])
        counts = [count_zeros_family(fam, x, b["brudnyi_r0"]).count
                  for x in sample_mixed(entry.U, 32, seed)]
        checks.append(check("zero_count_below_ode_bound", limit, max(counts), max(counts) <= limit,
                            "heuristic: the bound is stated for radii below an unspecified r_0"))
    return result, checks


def cmd_catalog_verify(args, problem, knobs):
    return verify_entry(get_entry(args.name), knobs)


COMMANDS = {
    "count-zeros": cmd_count_zeros,
    "multiplicity": cmd_multiplicity,
    "estimate-bautin": cmd_estimate_bautin,
    "mu": cmd_mu,
    "cyclicity": cmd_cyclicity,
    "cartan": cmd_cartan,
    "catalog-verify": cmd_catalog_verify,
}
NEEDS_FAMILY = {"count-zeros", "multiplicity", "estimate-bautin", "mu", "cyclicity"}


def _knobs(args, sections) -> dict:
    knobs = parse_knobs(sections.get("knobs", {})) if sections else dict(DEFAULT_KNOBS)
    if args.seed is not None:
        knobs["seed"] = args.seed
    if args.tolerance is not None:
        knobs["tolerance"] = args.tolerance
    return validate_knobs(knobs)


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        sections = read_ini(args.config) if args.config else {}
        knobs = _knobs(args, sections)
        source = getattr(args, "family", None) or getattr(args, "name", None) or args.config or ""
        config = RunConfig(args.command, source, knobs, args.out, sections)
        problem = _problem(args, sections) if args.command in NEEDS_FAMILY else None
    except ConfigurationError as exc:
        print(f"bautinkit: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    error, result, checks = None, None, []
    try:
        result, checks = COMMANDS[args.command](args, problem, knobs)
    except ConfigurationError as exc:
        print(f"bautinkit: configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BautinKitError as exc:
        error = f"{type(exc).__name__}: {exc}"
        result = {"trace": getattr(exc, "trace", None) or getattr(exc, "values", None)}
    report = build_report(args.command, config.snapshot(), result, checks, error,
                          timestamp=not args.no_timestamp)
    text = write_report(report, args.out)
    if not args.out:
        sys.stdout.write(text)
    return EXIT_OK if report["status"] == "pass" else EXIT_FAIL


def main() -> None:
    sys.exit(run())
