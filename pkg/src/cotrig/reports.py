"""Experiment reports: canonical JSON, CSV tables, plot data files.

A report is a parameter grid with per-cell measurements, derived
constants (each tagged with its mode and the formula it calibrates), and
declared assertions.  Serialization is canonical (sorted keys, full
precision floats) so that reruns with the same seed produce bit-identical
files; the content fingerprint excludes wall-clock fields.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction


@dataclass
class Assertion:
    """One declared pass/fail criterion of an experiment."""

    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed),
                "detail": self.detail}


@dataclass
class ConstantReading:
    """A measured or derived constant with its provenance."""

    name: str
    value: float
    mode: str
    formula: str

    def __post_init__(self):
        if self.mode not in ("proven", "empirical"):
            raise ValueError("constant mode must be 'proven' or 'empirical'")

    def to_dict(self) -> dict:
        return {"name": self.name, "value": self.value, "mode": self.mode,
                "formula": self.formula}


@dataclass
class ExperimentReport:
    """Everything one experiment run measured and asserted."""

    experiment: str
    seed: int
    parameters: dict
    grid: list
    constants: list = field(default_factory=list)
    assertions: list = field(default_factory=list)
    plots: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    ledger_hash: str | None = None
    runtime_s: float = 0.0

    @property
    def passed(self) -> bool:
        return all(a.passed for a in self.assertions)

    def to_dict(self) -> dict:
        return {
            "kind": "experiment_report",
            "experiment": self.experiment,
            "seed": self.seed,
            "parameters": _sanitize(self.parameters),
            "grid": _sanitize(self.grid),
            "constants": [c.to_dict() for c in self.constants],
            "assertions": [a.to_dict() for a in self.assertions],
            "plots": [list(p) for p in self.plots],
            "extras": _sanitize(self.extras),
            "ledger_hash": self.ledger_hash,
            "passed": self.passed,
            "fingerprint": self.fingerprint(),
            "runtime_s": self.runtime_s,
        }

    def fingerprint(self) -> str:
        doc = {
            "experiment": self.experiment,
            "seed": self.seed,
            "parameters": _sanitize(self.parameters),
            "grid": _sanitize(self.grid),
            "constants": [c.to_dict() for c in self.constants],
            "assertions": [a.to_dict() for a in self.assertions],
            "extras": _sanitize(self.extras),
            "ledger_hash": self.ledger_hash,
        }
        return hashlib.sha256(canonical_json(doc).encode()).hexdigest()[:16]

    def summary_lines(self) -> list:
        lines = [f"experiment {self.experiment}: "
                 f"{'PASS' if self.passed else 'FAIL'} "
                 f"({len(self.grid)} cells, seed {self.seed})"]
        for c in self.constants:
            lines.append(f"  constant {c.name} = {c.value:.6g} "
                         f"[{c.mode}] {c.formula}")
        for a in self.assertions:
            mark = "ok" if a.passed else "FAIL"
            lines.append(f"  [{mark}] {a.name}: {a.detail}")
        return lines


def _sanitize(obj):
    """Make an object JSON-safe: Fractions to strings, non-finite floats
    to strings, tuples to lists."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else repr(obj)
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    if hasattr(obj, "to_dict"):
        return _sanitize(obj.to_dict())
    if hasattr(obj, "item"):
        return _sanitize(obj.item())
    return str(obj)


def canonical_json(obj) -> str:
    return json.dumps(_sanitize(obj), sort_keys=True, indent=2)


def write_json(path: str, obj) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(obj))
        fh.write("\n")
    return path


def write_csv(path: str, rows: list) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    if not rows:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write("")
        return path
    header = list(rows[0].keys())
    for row in rows[1:]:
        for key in row:
            if key not in header:
                header.append(key)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=header, restval="")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(v) for k, v in row.items()})
    return path


def _cell(value):
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return value


def write_plot_data(path: str, xs, ys) -> str:
    """Two whitespace-separated columns, one point per line."""
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        for x, y in zip(xs, ys):
            fh.write(f"{_num(x)} {_num(y)}\n")
    return path


def _num(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_report_files(report: ExperimentReport, out_dir: str) -> dict:
    """Write report.json, tables/<name>.csv, and plots/*.dat; return paths."""
    paths = {}
    paths["report"] = write_json(os.path.join(out_dir, "report.json"),
                                 report.to_dict())
    if report.grid:
        paths["table"] = write_csv(
            os.path.join(out_dir, "tables", f"{report.experiment}.csv"),
            [_sanitize(r) for r in report.grid])
    for x_key, y_key in report.plots:
        cells = [r for r in report.grid if x_key in r and y_key in r]
        if not cells:
            continue
        name = f"{report.experiment}_{y_key}_vs_{x_key}.dat"
        paths[name] = write_plot_data(
            os.path.join(out_dir, "plots", name),
            [r[x_key] for r in cells], [r[y_key] for r in cells])
    return paths
