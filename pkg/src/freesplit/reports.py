"""Versioned JSON reports for CLI commands and golden-file tests."""

from __future__ import annotations

import json

SCHEMA = "freesplit-report/1"


def make_report(command: str, parameters: dict, results: dict,
                verdict: str | None = None) -> dict:
    report = {
        "schema": SCHEMA,
        "command": command,
        "parameters": parameters,
        "results": results,
    }
    if verdict is not None:
        report["verdict"] = verdict
    return report


def dump_report(report: dict) -> str:
    """Deterministic serialization: sorted keys, stable indentation."""
    return json.dumps(report, indent=2, sort_keys=True, default=_coerce) + "\n"


def _coerce(obj):
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"unserializable object of type {type(obj)!r}")
