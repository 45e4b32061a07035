#!/usr/bin/env python
"""Run every comparison check on the metric roster and collect the verdicts.

Writes one JSON/CSV report per (metric, theorem) into OUTDIR and a summary.csv
with one row per run.  Hypotheses that the metric does not satisfy are listed
as "refused" rather than silently skipped.
"""
from __future__ import annotations

import argparse
import csv
import time
from pathlib import Path

from finslerkit import comparison as cmp
from finslerkit.config import VerifyConfig
from finslerkit.errors import FinslerError, HypothesisError
from finslerkit.metrics import make_metric

ROSTER = [
    ("euclidean", {}),
    ("sphere", {}),
    ("hyperbolic-disk", {}),
    ("randers", {"b": [0.3, 0.0]}),
    ("randers", {"b": [0.2, 0.0], "base": "hyperbolic-disk"}),
    ("funk", {}),
]


def checks(metric, cfg):
    yield "4.1-upper", lambda: cmp.verify_hessian(metric, side="upper", cfg=cfg)
    yield "4.1-lower", lambda: cmp.verify_hessian(metric, side="lower", cfg=cfg)
    for th in ("5.1", "5.2", "5.3"):
        yield th, lambda th=th: cmp.verify_laplacian(metric, theorem=th, cfg=cfg)
    for th in ("6.1", "6.3"):
        yield th, lambda th=th: cmp.verify_volume(metric, theorem=th, cfg=cfg)
    yield "lemma-2.1", lambda: cmp.lemma21_check(metric, rmax=cfg.rmax)
    yield "lemma-7.1", lambda: cmp.lemma71_check(metric)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/comparisons")
    ap.add_argument("--dim", type=int, default=2)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--rmax", type=float, default=1.5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = VerifyConfig(samples=args.samples, rmax=args.rmax, seed=args.seed)
    rows = []
    for kind, params in ROSTER:
        if kind == "randers" and args.dim != len(params["b"]):
            params = dict(params, b=params["b"] + [0.0] * (args.dim - len(params["b"])))
        m = make_metric(kind, dim=args.dim, **params)
        label = m.name + ("-" + params["base"] if "base" in params else "")
        for tag, job in checks(m, cfg):
            t0 = time.perf_counter()
            try:
                rep = job()
            except HypothesisError as exc:
                rows.append([label, tag, "refused", "", "", f"{time.perf_counter() - t0:.2f}", str(exc)])
                print(f"{label:28s} {tag:10s} refused  {exc}")
                continue
            except FinslerError as exc:
                rows.append([label, tag, "error", "", "", f"{time.perf_counter() - t0:.2f}", str(exc)])
                print(f"{label:28s} {tag:10s} error    {exc}")
                continue
            stem = f"{label}_{tag}"
            (out / f"{stem}.json").write_text(rep.to_json() + "\n")
            (out / f"{stem}.csv").write_text(rep.to_csv())
            rows.append([label, tag, "pass" if rep.verdict else "fail", repr(rep.min_margin),
                         len(rep.samples), f"{time.perf_counter() - t0:.2f}", ""])
            print(f"{label:28s} {tag:10s} {rows[-1][2]:8s} min margin {rep.min_margin:+.3e}")
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "check", "status", "min_margin", "samples", "seconds", "message"])
        w.writerows(rows)
    return 0 if all(r[2] in ("pass", "refused") for r in rows) else 1


if __name__ == "__main__":
    raise SystemExit(main())
