"""Canonical JSON reports.

Reports never carry timing or anything else that varies between runs, so the
same inputs always serialize to the same bytes.
"""

from __future__ import annotations

import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Iterable

import jsonschema
import numpy as np

from . import __version__

FORMAT_VERSION = 1


def verdict(name: str, passed: bool, witness: Any = None) -> dict:
    v = {"name": name, "passed": bool(passed)}
    if witness is not None:
        v["witness"] = witness
    return v


def make_report(subcommand: str, inputs: dict, results: dict, verdicts: Iterable[dict] = ()) -> dict:
    verdicts = list(verdicts)
    return {
        "toolVersion": __version__,
        "formatVersion": FORMAT_VERSION,
        "subcommand": subcommand,
        "inputs": inputs,
        "results": results,
        "verdicts": verdicts,
        "passed": all(v["passed"] for v in verdicts),
    }


def error_report(subcommand: str, inputs: dict, exc: Exception) -> dict:
    rep = make_report(subcommand, inputs, {}, [verdict("completed", False)])
    rep["error"] = {"type": type(exc).__name__, "message": str(exc)}
    return rep


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (set, frozenset)):
        return [_plain(v) for v in sorted(obj)]
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if hasattr(obj, "to_json"):
        return _plain(obj.to_json())
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_plain(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


@lru_cache(maxsize=1)
def schema() -> dict:
    return json.loads((resources.files("gcompact") / "data" / "report.schema.json").read_text())


def validate(report: dict) -> None:
    """Raise ``jsonschema.ValidationError`` unless the report matches the shipped schema."""
    jsonschema.validate(json.loads(dumps(report)), schema())
