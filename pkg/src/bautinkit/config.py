"""Run configuration: an INI file with [family], [regions] and [knobs].

Structured values (coefficient tables, boxes, lists) are JSON.  Example::

    [family]
    kind = explicit
    nvars = 1
    # index k -> list of [multi-index, re, im]
    coefficients = [[[[2], -1, 0]], [], [[[0], 1, 0]]]

    [regions]
    V = {"centers": [[0, 0]], "radii": [1.0]}
    K = {"centers": [[0, 0]], "radii": [0.0]}
    O = [{"centers": [[0, 0]], "radii": [0.2]}, {"centers": [[0, 0]], "radii": [0.1]}]
    U = {"centers": [[0, 0]], "radii": [0.9]}

    [knobs]
    k_max = 64
    samples = 256

A family can instead be taken from the catalog with ``catalog = NAME``;
its boxes are then the defaults for [regions].
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field
from pathlib import Path

from .catalog import CatalogEntry, get_entry
from .errors import ConfigurationError
from .family import AnalyticFamily, ExplicitPolynomials, ExpPolynomial, MultiPoly
from .regions import ParameterBox

DEFAULT_KNOBS = {
    "k_max": 64,
    "samples": 256,
    "growth_samples": 512,
    "seed": 0,
    "tolerance": 1e-9,
    "degree_cap": 512,
    "sandwich_samples": 50,
    "global_samples": 100,
    "search_budget": 512,
}

# (low, high) inclusive ranges
KNOB_RANGES = {
    "k_max": (1, 4096),
    "samples": (1, 1 << 20),
    "growth_samples": (1, 1 << 20),
    "seed": (0, 2**32 - 1),
    "tolerance": (0.0, 1.0),
    "degree_cap": (1, 1 << 16),
    "sandwich_samples": (1, 1 << 16),
    "global_samples": (1, 1 << 16),
    "search_budget": (1, 1 << 20),
}


@dataclass
class Problem:
    """A family together with the boxes the estimators run on."""

    family: AnalyticFamily
    K: ParameterBox
    O_sequence: tuple
    U: ParameterBox
    known_mu: int | None = None
    entry: CatalogEntry | None = None


@dataclass
class RunConfig:
    command: str
    family_source: str
    knobs: dict = field(default_factory=lambda: dict(DEFAULT_KNOBS))
    output: str | None = None
    raw: dict = field(default_factory=dict)

    def snapshot(self) -> dict:
        return {"command": self.command, "family_source": self.family_source,
                "knobs": dict(sorted(self.knobs.items())), "config": self.raw}


def _json(section, key, text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"[{section}] {key}: invalid JSON ({exc.msg})") from None


def read_ini(path: str | Path) -> dict:
    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from None
    except configparser.Error as exc:
        raise ConfigurationError(f"bad config {path}: {exc}") from None
    return {s: dict(parser[s]) for s in parser.sections()}


def parse_knobs(section: dict, base: dict | None = None) -> dict:
    knobs = dict(DEFAULT_KNOBS if base is None else base)
    for key, text in section.items():
        if key not in DEFAULT_KNOBS:
            raise ConfigurationError(f"unknown knob {key!r}")
        value = _json("knobs", key, text) if isinstance(text, str) else text
        knobs[key] = value
    return validate_knobs(knobs)


def validate_knobs(knobs: dict) -> dict:
    for key, value in knobs.items():
        lo, hi = KNOB_RANGES[key]
        kind = type(DEFAULT_KNOBS[key])
        if kind is int and (isinstance(value, bool) or not isinstance(value, int)):
            raise ConfigurationError(f"knob {key} must be an integer, got {value!r}")
        if kind is float and not isinstance(value, (int, float)):
            raise ConfigurationError(f"knob {key} must be a number, got {value!r}")
        if not lo <= value <= hi:
            raise ConfigurationError(f"knob {key}={value} outside [{lo}, {hi}]")
    return knobs


def _box(data) -> ParameterBox:
    return ParameterBox.from_dict(data)


def family_from_section(sec: dict, V: ParameterBox) -> AnalyticFamily:
    kind = sec.get("kind", "explicit")
    name = sec.get("name", "")
    if kind == "explicit":
        nvars = int(sec.get("nvars", V.dimension))
        table = _json("family", "coefficients", sec.get("coefficients", "[]"))
        polys = []
        for k, terms in enumerate(table):
            try:
                polys.append(MultiPoly([(tuple(e), complex(re, im)) for e, re, im in terms], nvars))
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"coefficient {k}: expected [multi-index, re, im] terms") from exc
        return AnalyticFamily(ExplicitPolynomials(tuple(polys)), V, name=name)
    if kind == "exp":
        try:
            m, p, q = (int(sec[x]) for x in ("m", "p", "q"))
        except KeyError as exc:
            raise ConfigurationError(f"exp family needs {exc.args[0]}") from None
        return AnalyticFamily(ExpPolynomial(m, p, q), V, name=name)
    raise ConfigurationError(f"unknown family kind {kind!r}")


def problem_from_sections(sections: dict) -> Problem:
    fam_sec = sections.get("family")
    if fam_sec is None:
        raise ConfigurationError("config needs a [family] section")
    reg = sections.get("regions", {})
    entry = None
    if "catalog" in fam_sec:
        entry = get_entry(fam_sec["catalog"])
        defaults = {"V": entry.family.region, "K": entry.K, "O": entry.O_sequence, "U": entry.U}
    else:
        defaults = {}

    def pick(key):
        if key in reg:
            data = _json("regions", key, reg[key])
            if key == "O":
                if not isinstance(data, list):
                    raise ConfigurationError("[regions] O must be a list of boxes")
                return tuple(_box(d) for d in data)
            return _box(data)
        if key in defaults:
            return defaults[key]
        raise ConfigurationError(f"[regions] needs {key}")

    V = pick("V")
    if entry is None:
        family = family_from_section(fam_sec, V)
    elif "V" in reg:
        family = AnalyticFamily(entry.family.rule, V, entry.family.default_degree, entry.name)
    else:
        family = entry.family
    return Problem(family, pick("K"), pick("O"), pick("U"),
                   entry.known_mu if entry is not None else None, entry)


def load_problem(source: str) -> Problem:
    """A catalog name or the path of an INI file."""
    if Path(source).is_file():
        return problem_from_sections(read_ini(source))
    entry = get_entry(source)
    return Problem(entry.family, entry.K, entry.O_sequence, entry.U, entry.known_mu, entry)
