"""Structured check reports with deterministic JSON serialisation.

A report is a list of named checks, each pairing a numeric result with its
bound or tolerance and a pass flag, plus an echo of the configuration and
the provenance (seed, timestamp).  Serialisation sorts keys and renders
floats through repr, so identical runs produce byte-identical files apart
from the timestamp field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import PurePath

import numpy as np

__all__ = ["Report"]


def _sanitize(obj):
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, complex):
        return {"re": _sanitize(obj.real), "im": _sanitize(obj.imag)}
    if isinstance(obj, np.ndarray):
        return _sanitize(obj.tolist())
    if isinstance(obj, PurePath):
        return str(obj)
    return obj


@dataclass
class Report:
    tool: str
    version: str
    command: str
    config: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    seed: int | None = None

    def add_check(self, name: str, value, bound=None, passed=None, **extra) -> bool:
        if passed is None and bound is not None and value is not None:
            passed = bool(np.isfinite(value) and value <= bound)
        entry = {"name": name, "value": value, "bound": bound, "passed": passed}
        entry.update(extra)
        self.checks.append(entry)
        return bool(passed) if passed is not None else True

    def add_info(self, name: str, **payload) -> None:
        self.checks.append({"name": name, "passed": None, **payload})

    @property
    def passed(self) -> bool:
        flags = [c["passed"] for c in self.checks if c.get("passed") is not None]
        return all(flags) if flags else True

    def to_dict(self) -> dict:
        return _sanitize(
            {
                "tool": self.tool,
                "version": self.version,
                "command": self.command,
                "config": self.config,
                "passed": self.passed,
                "checks": self.checks,
                "provenance": {
                    "seed": self.seed,
                    "timestamp": datetime.now(timezone.utc).isoformat(),
                },
            }
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True, allow_nan=False) + "\n"

    def write(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json())
