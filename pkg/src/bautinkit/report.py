"""Deterministic JSON report writer.

Floats are printed with 17 significant digits, complex numbers become
``[re, im]``, dataclasses become objects with their fields in declaration
order, and non-finite floats become the strings ``"inf"``, ``"-inf"``,
``"nan"`` (plain JSON has no literal for them).
"""

from __future__ import annotations

import dataclasses
import json
import math
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__

TIMESTAMP_KEY = "timestamp"


def to_tree(obj):
    """Plain nested dict/list/str/int/float/bool/None with complex split into pairs."""
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        tree = {f.name: to_tree(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        return tree
    if isinstance(obj, dict):
        return {str(k): to_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_tree(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_tree(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def _float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = "%.17g" % x
    if "e" not in text and "." not in text and "n" not in text:
        text += ".0"
    return text


def dumps(tree, indent: int = 2, _level: int = 0) -> str:
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(tree, dict):
        if not tree:
            return "{}"
        items = [f"{pad}{json.dumps(k)}: {dumps(v, indent, _level + 1)}" for k, v in tree.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(tree, list):
        if not tree:
            return "[]"
        if all(not isinstance(v, (dict, list)) for v in tree) and len(tree) <= 8:
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in tree) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in tree]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    if isinstance(tree, bool) or tree is None:
        return json.dumps(tree)
    if isinstance(tree, float):
        return _float(tree)
    if isinstance(tree, int):
        return str(tree)
    return json.dumps(tree)


def build_report(command: str, snapshot: dict, result, checks: list, error: str | None = None,
                 timestamp: bool = True) -> dict:
    passed = error is None and all(c["pass"] for c in checks)
    report = {
        "tool": "bautinkit",
        "version": __version__,
        "command": command,
        "status": "pass" if passed else "fail",
        "config": snapshot,
        "result": to_tree(result),
        "checks": to_tree(checks),
        "error": error,
    }
    if timestamp:
        report[TIMESTAMP_KEY] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return report


def write_report(report: dict, path: str | None) -> str:
    text = dumps(to_tree(report)) + "\n"
    if path:
        Path(path).write_text(text, encoding="utf-8")
    return text


def check(name: str, expected, observed, passed: bool, detail: str | None = None) -> dict:
    item = {"name": name, "expected": expected, "observed": observed, "pass": bool(passed)}
    if detail:
        item["detail"] = detail
    return item
