"""Check records, run reports and their serialization."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from . import __version__
from .scalars import GaussQ, format_rational

SCHEMA_VERSION = 1

PASS, FAIL, SKIP = "pass", "fail", "skip"


@dataclass
class CheckReport:
    """Outcome of one identity check: measured error against a tolerance."""

    name: str
    anchor: str
    passed: bool
    measured: float = 0.0
    tolerance: float = 0.0
    details: dict = field(default_factory=dict)
    skipped: bool = False

    @property
    def status(self) -> str:
        if self.skipped:
            return SKIP
        return PASS if self.passed else FAIL

    def __bool__(self):
        return self.passed

    def as_record(self) -> dict:
        return {"name": self.name, "paper_anchor": self.anchor, "status": self.status,
                "measured": float(self.measured), "tolerance": float(self.tolerance)}


def merge_checks(name: str, anchor: str, reports, tolerance: float | None = None) -> CheckReport:
    """Worst-case aggregate of several reports of the same check."""
    reports = list(reports)
    if not reports:
        return CheckReport(name, anchor, True, 0.0, tolerance or 0.0, skipped=True)
    worst = max(r.measured for r in reports)
    tol = tolerance if tolerance is not None else max(r.tolerance for r in reports)
    return CheckReport(name, anchor, all(r.passed for r in reports), worst, tol,
                       {"count": len(reports), "failures": sum(not r.passed for r in reports)})


@dataclass
class RunReport:
    scenario: dict
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)
    wall_time_ms: float = 0.0
    version: str = __version__

    @property
    def failed(self) -> bool:
        return any(c.status == FAIL for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "version": self.version,
            "scenario": self.scenario,
            "checks": [c.as_record() for c in self.checks],
            "data": self.data,
            "wall_time_ms": self.wall_time_ms,
        }


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if isinstance(obj, bool) or isinstance(obj, np.bool_):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x) or math.isinf(x):
            return _encode(repr(x), indent, level)
        text = format(x, ".17g")
        if "e" not in text and "." not in text and "n" not in text:
            text += ".0"
        return text
    if isinstance(obj, Fraction):
        return _encode(format_rational(obj), indent, level)
    if isinstance(obj, GaussQ):
        return _encode([format_rational(obj.re), format_rational(obj.im)], indent, level)
    if isinstance(obj, (complex, np.complexfloating)):
        return _encode([float(obj.real), float(obj.imag)], indent, level)
    if isinstance(obj, str):
        import json
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent, level + 1)}: {_encode(obj[k], indent, level + 1)}"
                 for k in sorted(obj, key=str)]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [pad + _encode(x, indent, level + 1) for x in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def to_json_text(obj: Any, indent: int = 2) -> str:
    """Deterministic JSON: sorted keys, 17 significant digits, rationals as ``"p/q"``."""
    return _encode(obj, indent, 0) + "\n"


def emit_report(report: RunReport, format: str = "json") -> bytes:
    if format == "json":
        return to_json_text(report.to_dict()).encode("utf-8")
    if format == "csv-summary":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "status", "measured", "tolerance"])
        for c in report.checks:
            w.writerow([c.name, c.status, format_float(c.measured), format_float(c.tolerance)])
        return buf.getvalue().encode("utf-8")
    raise ValueError(f"unknown report format {format!r}")


def format_float(x: float) -> str:
    return format(float(x), ".17g")
