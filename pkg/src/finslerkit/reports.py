"""Comparison reports: per-sample ledgers with JSON and CSV output."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np


@dataclass
class SampleRecord:
    location: dict
    measured: float
    bound: float
    margin: float
    kind: str = "inequality"

    def passed(self, tol):
        return self.margin >= -tol

    def to_dict(self):
        return {"kind": self.kind, "location": self.location, "measured": self.measured,
                "bound": self.bound, "margin": self.margin}


@dataclass
class ComparisonReport:
    """Sampled margins of one inequality.  The verdict is a function of the records."""

    theorem: str
    metric: dict
    hypotheses: dict
    tolerance: float
    samples: list = field(default_factory=list)
    volume_form: str = "busemann-hausdorff"
    notes: dict = field(default_factory=dict)

    def add(self, location, measured, bound, margin, kind="inequality"):
        self.samples.append(SampleRecord(_clean(location), float(measured), float(bound),
                                         float(margin), kind))

    @property
    def verdict(self) -> bool:
        return all(s.passed(self.tolerance) for s in self.samples)

    @property
    def min_margin(self):
        return min((s.margin for s in self.samples), default=float("nan"))

    @property
    def max_abs_margin(self):
        return max((abs(s.margin) for s in self.samples if s.kind == "inequality"),
                   default=float("nan"))

    def to_dict(self):
        return {"theorem": self.theorem, "metric": self.metric, "hypotheses": _clean(self.hypotheses),
                "volume_form": self.volume_form, "tolerance": self.tolerance,
                "notes": _clean(self.notes), "min_margin": self.min_margin,
                "samples": [s.to_dict() for s in self.samples],
                "verdict": "pass" if self.verdict else "fail"}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        keys = sorted({k for s in self.samples for k in s.location})
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["theorem", "kind"] + keys + ["measured", "bound", "margin", "pass"])
        for s in self.samples:
            w.writerow([self.theorem, s.kind] + [_fmt(s.location.get(k, "")) for k in keys]
                       + [repr(s.measured), repr(s.bound), repr(s.margin),
                          int(s.passed(self.tolerance))])
        return buf.getvalue()

    def file_stem(self):
        tag = f"thm{self.theorem}" if self.theorem[:1].isdigit() else self.theorem
        return f"{self.metric.get('name', 'metric')}_{tag}"

    def write(self, outdir, formats=("json", "csv")):
        outdir = Path(outdir)
        outdir.mkdir(parents=True, exist_ok=True)
        paths = []
        if "json" in formats:
            p = outdir / f"{self.file_stem()}.json"
            p.write_text(self.to_json() + "\n", encoding="utf-8")
            paths.append(p)
        if "csv" in formats:
            p = outdir / f"{self.file_stem()}.csv"
            p.write_text(self.to_csv(), encoding="utf-8")
            paths.append(p)
        return paths


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, list):
        return " ".join(_fmt(x) for x in v)
    return v


def _clean(obj):
    """Plain JSON types (numpy scalars and arrays become floats and lists)."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


clean = _clean
