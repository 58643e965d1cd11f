"""Serialize run reports to CSV or JSON.

Floats are written with 17 significant digits so a round trip through
``float()`` is exact.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from .runner import RunReport

TRAJECTORY_HEADER = ("t", "agent", "component", "value")


def format_float(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    text = format(x, ".17g")
    # keep floats recognizable as floats after a JSON round trip
    return text if any(c in text for c in ".en") else text + ".0"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with fixed 17-digit floats; key order is preserved."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, str, bool)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        return "[\n" + ",\n".join(pad + dumps(v, indent, _level + 1) for v in obj) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def report_document(report: RunReport) -> dict:
    return {
        "scenario": report.scenario,
        "mode": report.mode,
        "seed": report.seed,
        "trajectory": [dict(zip(TRAJECTORY_HEADER, row)) for row in report.trajectory],
        "diagnostics": report.diagnostics,
    }


def emit(report: RunReport, fmt: str, path) -> list[Path]:
    """Write ``report`` under directory ``path``; returns the files written.

    ``csv`` writes ``<name>.trajectory.csv`` (long format) and
    ``<name>.diagnostics.json``; ``json`` writes a single ``<name>.json``.
    """
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        target = out / f"{report.scenario}.json"
        target.write_text(dumps(report_document(report)) + "\n")
        return [target]
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    traj = out / f"{report.scenario}.trajectory.csv"
    with traj.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER)
        for t, agent, comp, value in report.trajectory:
            writer.writerow((t, agent, comp, format_float(value)))
    diag = out / f"{report.scenario}.diagnostics.json"
    meta = {"scenario": report.scenario, "mode": report.mode, "seed": report.seed}
    diag.write_text(dumps({**meta, "diagnostics": report.diagnostics}) + "\n")
    return [traj, diag]


def load_report(path) -> dict:
    """Read a JSON report written by :func:`emit`."""
    return json.loads(Path(path).read_text())
