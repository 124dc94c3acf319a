"""Experiment reports and their CSV / JSON serialization."""

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import LppError, ParameterError

CI_SIGMAS = 3.0

SCHEMAS = {
    "tail": ["s", "k", "p_hat", "stderr", "lo", "hi"],
    "convergence": ["n", "x", "p_hat", "limit", "abs_err"],
    "report": ["key", "value"],
}

# keys that vary between identical runs; kept out of CSV so replays match byte for byte
VOLATILE = ("wall_time",)


def fmt(x):
    """17 significant digits for floats, plain text otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "NaN"
        if math.isinf(x):
            return "Infinity" if x > 0 else "-Infinity"
        return "%.17g" % x
    return str(x)


def to_json(obj, indent=1, _lvl=0):
    """JSON text with every float written to 17 significant digits."""
    pad = " " * (indent * (_lvl + 1))
    end = " " * (indent * _lvl)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {to_json(v, indent, _lvl + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        return "[" + ", ".join(to_json(v, indent, _lvl + 1) for v in obj) + "]"
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_, int, np.integer, float, np.floating)):
        return fmt(obj)
    return json.dumps(str(obj))


@dataclass
class Table:
    columns: list
    rows: list

    def to_dict(self):
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d):
        return cls(list(d["columns"]), [list(r) for r in d["rows"]])

    def csv_text(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(self.columns)
        for r in self.rows:
            wr.writerow([fmt(v) for v in r])
        return buf.getvalue()


@dataclass
class McReport:
    experiment: str
    reps: int
    estimates: dict = field(default_factory=dict)
    stderrs: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)
    report_only: bool = False
    metadata: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)

    def add_estimate(self, key, value, se):
        self.estimates[key] = float(value)
        self.stderrs[key] = float(se)

    def ci(self, key):
        e, s = self.estimates[key], self.stderrs.get(key, 0.0)
        return e - CI_SIGMAS * s, e + CI_SIGMAS * s

    @property
    def verdict(self):
        if not self.checks:
            return "report-only" if self.report_only else "pass"
        return "pass" if all(bool(v) for v in self.checks.values()) else "fail"

    @property
    def passed(self):
        return self.verdict != "fail"

    def to_dict(self):
        return {
            "experiment": self.experiment,
            "reps": int(self.reps),
            "verdict": self.verdict,
            "report_only": bool(self.report_only),
            "estimates": dict(self.estimates),
            "stderrs": dict(self.stderrs),
            "ci": {k: list(self.ci(k)) for k in self.stderrs},
            "checks": {k: bool(v) for k, v in self.checks.items()},
            "metadata": dict(self.metadata),
            "tables": {k: t.to_dict() for k, t in self.tables.items()},
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["experiment"], d["reps"], dict(d["estimates"]), dict(d["stderrs"]),
                   dict(d["checks"]), d.get("report_only", False), dict(d["metadata"]),
                   {k: Table.from_dict(t) for k, t in d.get("tables", {}).items()})

    def to_json(self):
        return to_json(self.to_dict()) + "\n"

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))

    def rows(self):
        """Flat (key, value) rows of the report schema."""
        out = [("experiment", self.experiment), ("reps", self.reps), ("verdict", self.verdict)]
        for k, v in self.estimates.items():
            out.append((f"estimate.{k}", v))
            if k in self.stderrs:
                lo, hi = self.ci(k)
                out += [(f"stderr.{k}", self.stderrs[k]), (f"ci_lo.{k}", lo), (f"ci_hi.{k}", hi)]
        out += [(f"check.{k}", bool(v)) for k, v in self.checks.items()]
        out += [(f"meta.{k}", v if not isinstance(v, (list, dict)) else to_json(v, indent=0).replace("\n", ""))
                for k, v in self.metadata.items() if k not in VOLATILE]
        return out

    def csv_text(self):
        return Table(SCHEMAS["report"], [list(r) for r in self.rows()]).csv_text()


def spec_hash(spec):
    """Short digest of an experiment description (mapping of plain values)."""
    text = to_json(spec, indent=0)
    return hashlib.sha256(text.encode()).hexdigest()[:16]


def emit(report, fmt_name, path):
    """Write the report; CSV puts each table next to it as <stem>.<table>.csv."""
    path = Path(path)
    try:
        if fmt_name == "json":
            path.write_text(report.to_json())
        elif fmt_name == "csv":
            path.write_text(report.csv_text())
            for name, tab in report.tables.items():
                path.with_name(f"{path.stem}.{name}.csv").write_text(tab.csv_text())
        else:
            raise ParameterError(f"unknown format {fmt_name!r}; use csv or json")
    except OSError as e:
        raise LppError(f"cannot write {path}: {e}") from e
    return path


def read_csv_table(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    return rows[0], rows[1:]
