#!/usr/bin/env python
"""Tables of vol(B_p(r)) and the model volumes for plotting volume-ratio curves.

One CSV per metric with columns r, volume, error_estimate, and the model
volume and ratio for each requested (c, Lambda) pair.
"""
from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np

from finslerkit.comparison import geometric_radii, model_volume
from finslerkit.geodesy import ball_volumes
from finslerkit.metrics import make_metric
from finslerkit.volume import BusemannHausdorff

MODELS = {
    "euclidean": [(0.0, 0.0)],
    "hyperbolic-disk": [(-1.0, 0.0), (0.0, 0.0)],
    "sphere": [(1.0, 0.0), (0.0, 0.0)],
    "funk": [(-0.25, 1.5), (-0.25, -1.5)],
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results/volumes")
    ap.add_argument("--rmin", type=float, default=0.05)
    ap.add_argument("--rmax", type=float, default=1.5)
    ap.add_argument("--ratio", type=float, default=1.1)
    ap.add_argument("--ntheta", type=int, default=64)
    ap.add_argument("--step", type=float, default=1e-2)
    args = ap.parse_args(argv)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    radii = geometric_radii(args.rmin, args.rmax, args.ratio)
    for kind, models in MODELS.items():
        m = make_metric(kind)
        vols, errs, _ = ball_volumes(m, m.base_point, radii, args.ntheta, args.step, BusemannHausdorff())
        header = ["r", "volume", "error_estimate"]
        cols = [radii, vols, errs]
        for c, lam in models:
            # the model takes Lambda with the sign convention of the increasing-ratio theorem
            V = model_volume(c, lam, 2, radii)
            header += [f"V_c{c:g}_L{lam:g}", f"ratio_c{c:g}_L{lam:g}"]
            cols += [V, vols / V]
        with open(out / f"{kind}.csv", "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(header)
            for row in np.column_stack(cols):
                w.writerow([repr(float(v)) for v in row])
        print(f"{kind:16s} vol({radii[-1]:.2f}) = {vols[-1]:.6f}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
