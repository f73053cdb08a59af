"""Experiment reports: named numeric columns, fitted exponents, and pass/fail verdicts."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

_RELATIONS = {
    "<=": lambda v, t: v <= t,
    "<": lambda v, t: v < t,
    ">=": lambda v, t: v >= t,
    ">": lambda v, t: v > t,
}


@dataclass
class Verdict:
    name: str
    value: float
    threshold: float
    relation: str

    @property
    def passed(self):
        return bool(np.isfinite(self.value)) and _RELATIONS[self.relation](self.value, self.threshold)

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"{self.name}: {self.value:.6g} {self.relation} {self.threshold:.6g}: {status}"


@dataclass
class Fit:
    slope: float
    halfwidth: float
    intercept: float
    x: str = ""


@dataclass
class ExperimentReport:
    name: str
    params: dict = field(default_factory=dict)
    columns: dict = field(default_factory=dict)
    fits: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add_column(self, name, values):
        values = np.asarray(values)
        if np.iscomplexobj(values):
            raise TypeError(f"column {name!r} is complex; store real and imaginary parts")
        self.columns[name] = np.asarray(values, dtype=float).ravel()

    def add_fit(self, series, fit, x=""):
        self.fits[series] = Fit(float(fit.slope), float(fit.halfwidth), float(fit.intercept), x)

    def add_verdict(self, name, value, threshold, relation="<="):
        if relation not in _RELATIONS:
            raise ValueError(f"unknown relation {relation!r}")
        v = Verdict(name, float(value), float(threshold), relation)
        self.verdicts.append(v)
        return v

    @property
    def passed(self):
        return all(v.passed for v in self.verdicts)

    def failures(self):
        return [v for v in self.verdicts if not v.passed]

    def summary_lines(self):
        out = [f"[{self.name}]"]
        out += [f"  {k} = {_fmt(v)}" for k, v in self.params.items()]
        out += [f"  fit {k}: slope {f.slope:.6g} +/- {f.halfwidth:.3g}" for k, f in self.fits.items()]
        out += [f"  {line}" for line in self.notes]
        out += [f"  {v.line()}" for v in self.verdicts]
        return out

    # lossless JSON form (floats as repr strings survive nan/inf)
    def to_json(self):
        return json.dumps({
            "name": self.name,
            "params": {k: _enc(v) for k, v in self.params.items()},
            "columns": {k: [repr(float(x)) for x in v] for k, v in self.columns.items()},
            "fits": {k: [repr(f.slope), repr(f.halfwidth), repr(f.intercept), f.x]
                     for k, f in self.fits.items()},
            "verdicts": [[v.name, repr(v.value), repr(v.threshold), v.relation]
                         for v in self.verdicts],
            "notes": self.notes,
        }, indent=1)

    @classmethod
    def from_json(cls, text):
        d = json.loads(text)
        rep = cls(d["name"], {k: _dec(v) for k, v in d["params"].items()})
        rep.columns = {k: np.array([float(x) for x in v]) for k, v in d["columns"].items()}
        rep.fits = {k: Fit(float(a), float(b), float(c), x) for k, (a, b, c, x) in d["fits"].items()}
        rep.verdicts = [Verdict(n, float(v), float(t), r) for n, v, t, r in d["verdicts"]]
        rep.notes = list(d["notes"])
        return rep


def _fmt(v):
    return f"{v:.10g}" if isinstance(v, float) else str(v)


def _enc(v):
    if isinstance(v, (float, np.floating)):
        return {"f": repr(float(v))}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_enc(x) for x in v]
    if isinstance(v, (np.integer,)):
        return int(v)
    return v


def _dec(v):
    if isinstance(v, dict) and set(v) == {"f"}:
        return float(v["f"])
    if isinstance(v, list):
        return [_dec(x) for x in v]
    return v


def format_number(x):
    """17 significant digits: enough for a bit-exact float64 round trip."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_csv(report, path):
    """Columns side by side; shorter columns are padded with empty cells."""
    path = Path(path)
    names = list(report.columns)
    rows = max((len(v) for v in report.columns.values()), default=0)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(names)
        for i in range(rows):
            w.writerow([format_number(report.columns[k][i]) if i < len(report.columns[k]) else ""
                        for k in names])
    return path


def read_csv(path):
    """Columns of a CSV written by :func:`write_csv`."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        return {}
    names = rows[0]
    cols = {k: [] for k in names}
    for row in rows[1:]:
        for k, cell in zip(names, row):
            if cell != "":
                cols[k].append(float(cell))
    return {k: np.array(v, dtype=float) for k, v in cols.items()}


def write_plot_script(report, path, csv_name=None):
    """A gnuplot script plotting each fitted series in log-log axes with its power law."""
    path = Path(path)
    csv_name = csv_name or f"{report.name}.csv"
    names = list(report.columns)
    lines = [f"# {report.name}", "set datafile separator ','", "set key autotitle columnhead",
             "set logscale xy", f"set terminal pngcairo size 800,600",
             f"set output '{report.name}.png'"]
    if not report.fits:
        lines.append("# no fitted series")
    for series, fit in report.fits.items():
        x = fit.x or names[0]
        if series not in names or x not in names:
            continue
        xi, yi = names.index(x) + 1, names.index(series) + 1
        lines.append(f"# fitted exponent for {series}: slope = {fit.slope:.10g} +/- {fit.halfwidth:.3g}")
        lines.append(f"f_{yi}(x) = exp({fit.intercept:.17g}) * x**({fit.slope:.17g})")
        lines.append(f"plot '{csv_name}' using {xi}:(abs(${yi})) with points title '{series}', "
                     f"f_{yi}(x) title 'slope {fit.slope:.4g}'")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path
