"""Run reports: JSON with decimal-string numbers, CSV tables and x-y data files."""
from __future__ import annotations

import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from . import __version__

SCHEMA = "matsaevlab-report"
SCHEMA_VERSION = 1
VERDICTS = ("holds", "violated", "undecided")


def fmt(x) -> str:
    """17 significant digits, enough to round-trip a double."""
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


@dataclass
class Report:
    pipeline: str
    scenario: dict
    seed: int
    quantities: dict = field(default_factory=dict)
    verdicts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)

    def value(self, name: str, x, method: str):
        self.quantities[name] = {"value": fmt(x), "method": method}

    def count(self, name: str, n: int, method: str = "count"):
        self.quantities[name] = {"value": str(int(n)), "method": method}

    def bracket(self, name: str, lower, upper, method_lower: str, method_upper: str):
        self.quantities[name] = {"lower": fmt(lower), "upper": fmt(upper),
                                 "method_lower": method_lower, "method_upper": method_upper}

    def pnorm_bracket(self, name: str, br):
        self.bracket(name, br.lower, br.upper, br.method_lower, br.method_upper)

    def verdict(self, name: str, v):
        if isinstance(v, bool):
            v = "holds" if v else "violated"
        if v not in VERDICTS:
            raise ValueError(f"invalid verdict {v!r}")
        self.verdicts[name] = v

    def table(self, name: str, header: list, rows: list):
        self.tables[name] = (header, rows)

    def plot(self, name: str, xs, ys):
        self.plots[name] = list(zip(xs, ys))

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "schema_version": SCHEMA_VERSION,
            "tool_version": __version__,
            "pipeline": self.pipeline,
            "seed": str(self.seed),
            "scenario": {k: str(v) for k, v in self.scenario.items()},
            "quantities": self.quantities,
            "verdicts": self.verdicts,
            "notes": self.notes,
        }


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _cell(v) -> str:
    if isinstance(v, float):
        return fmt(v)
    return str(v)


def write(report: Report, out_dir) -> Path:
    out = Path(out_dir)
    for name, (header, rows) in report.tables.items():
        lines = [",".join(header)] + [",".join(_cell(v) for v in r) for r in rows]
        _atomic_write(out / "tables" / f"{name}.csv", "\n".join(lines) + "\n")
    for name, pts in report.plots.items():
        lines = [f"# {name}"] + [f"{fmt(x)} {fmt(y)}" for x, y in pts]
        _atomic_write(out / "plots" / f"{name}.dat", "\n".join(lines) + "\n")
    path = out / "report.json"
    _atomic_write(path, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    return path


def load(path) -> dict:
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    data = json.loads(path.read_text())
    if data.get("schema") != SCHEMA:
        raise ValueError(f"{path}: not a {SCHEMA} file")
    return data


class SchemaMismatch(ValueError):
    pass


def compare(a: dict, b: dict, rtol: float = 1e-9) -> tuple[list, bool]:
    """Line-wise diff of two loaded reports.

    Returns ``(lines, verdicts_differ)``.  Numeric fields are compared with
    relative tolerance ``rtol``; differing numbers are listed but only verdict
    changes count as a difference.
    """
    if a["schema_version"] != b["schema_version"]:
        raise SchemaMismatch(f"schema version {a['schema_version']} vs {b['schema_version']}")
    lines = []
    if a["pipeline"] != b["pipeline"]:
        lines.append(f"pipeline: {a['pipeline']} != {b['pipeline']}")
    qa, qb = a["quantities"], b["quantities"]
    for name in sorted(set(qa) | set(qb)):
        if name not in qa or name not in qb:
            lines.append(f"quantity {name}: only in {'A' if name in qa else 'B'}")
            continue
        for key in sorted(set(qa[name]) | set(qb[name])):
            va, vb = qa[name].get(key), qb[name].get(key)
            if va == vb:
                continue
            try:
                fa, fb = float(va), float(vb)
                if math.isclose(fa, fb, rel_tol=rtol, abs_tol=rtol):
                    continue
            except (TypeError, ValueError):
                pass
            lines.append(f"quantity {name}.{key}: {va} != {vb}")
    differ = False
    va_, vb_ = a["verdicts"], b["verdicts"]
    for name in sorted(set(va_) | set(vb_)):
        if va_.get(name) != vb_.get(name):
            differ = True
            lines.append(f"verdict {name}: {va_.get(name)} != {vb_.get(name)}")
    return lines, differ
