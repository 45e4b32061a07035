"""finslerkit command line: one operation per invocation.

Every run prints (and optionally writes) a JSON document
{tool_version, config, results, verdict}.  Exit status: 0 success,
1 usage error, 2 hypothesis not certified or a failed verdict,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

THREAD_VARS = ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS")

EXIT_OK, EXIT_USAGE, EXIT_HYPOTHESIS, EXIT_NUMERICAL = 0, 1, 2, 3


# argument parsing ----------------------------------------------------------------------

def parse_vector(text):
    try:
        return [float(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated vector: {text!r}") from None


def parse_radii(text):
    """start:stop:xRATIO (geometric), start:stop:+STEP (arithmetic) or a comma list."""
    import numpy as np

    from .comparison import geometric_radii

    text = str(text)
    if ":" not in text:
        return parse_vector(text)
    parts = text.split(":")
    if len(parts) != 3 or not parts[2] or parts[2][0] not in "x+":
        raise argparse.ArgumentTypeError(f"radius grid must be start:stop:xRATIO or start:stop:+STEP, got {text!r}")
    try:
        start, stop, inc = float(parts[0]), float(parts[1]), float(parts[2][1:])
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad radius grid {text!r}") from None
    if parts[2][0] == "x":
        try:
            return geometric_radii(start, stop, inc).tolist()
        except Exception as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    if inc <= 0 or start <= 0 or stop < start:
        raise argparse.ArgumentTypeError("arithmetic grid needs 0 < start <= stop and step > 0")
    k = int(np.floor((stop - start) / inc + 1e-9))
    return (start + inc * np.arange(k + 1)).tolist()


def _add_metric_args(p):
    g = p.add_argument_group("metric")
    g.add_argument("--metric", help="roster kind (see list-metrics) or a YAML definition file")
    g.add_argument("--dim", type=int, default=None)
    g.add_argument("--b", type=parse_vector, default=None, help="Randers one-form, e.g. 0.2,0")
    g.add_argument("--base", default=None, help="Randers base: euclidean or hyperbolic-disk")
    g.add_argument("--scales", type=parse_vector, default=None, help="Minkowski axis scales")
    g.add_argument("--chart-radius", type=float, default=None)
    g.add_argument("--volume-form", default=None, help="busemann-hausdorff (default) or constant")


def _add_common(p):
    _add_metric_args(p)
    p.add_argument("--config", help="YAML file with a metric block and operation parameters")
    p.add_argument("--out", help="output directory for JSON/CSV artifacts")
    p.add_argument("--format", default="json", help="comma list of json, csv")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None, help="BLAS threads (default: all cores)")


def build_parser():
    ap = argparse.ArgumentParser(prog="finslerkit", description=__doc__.splitlines()[0])
    from . import __version__

    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list-metrics", help="roster of built-in metrics")
    _add_common(p)

    p = sub.add_parser("validate", help="strong convexity and domain checks only")
    _add_common(p)
    p.add_argument("--point", type=parse_vector)
    p.add_argument("--radii", type=parse_radii)
    p.add_argument("--c", type=float, default=None, help="curvature constant for ct_c domain checks")

    p = sub.add_parser("tensors", help="g, C, gamma, N, Gamma, G at one state")
    _add_common(p)
    p.add_argument("--point", type=parse_vector)
    p.add_argument("--vector", type=parse_vector)

    p = sub.add_parser("geodesic", help="integrate a geodesic")
    _add_common(p)
    p.add_argument("--point", type=parse_vector)
    p.add_argument("--vector", type=parse_vector)
    p.add_argument("--length", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--frame", action="store_true", help="also transport a parallel frame")

    p = sub.add_parser("curvature-scan", help="certify curvature, S-norm and reversibility bounds")
    _add_common(p)
    p.add_argument("--center", type=parse_vector)
    p.add_argument("--region-radius", type=float, default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--refinements", type=int, default=None)

    p = sub.add_parser("laplacian", help="Laplacian of a scalar field by two routes")
    _add_common(p)
    p.add_argument("--field", default=None, help="coordinate0, half-square, euclidean-distance, ...")
    p.add_argument("--field-center", type=parse_vector)
    p.add_argument("--point", type=parse_vector)

    p = sub.add_parser("s-curvature", help="S-curvature by two routes and the S-norm")
    _add_common(p)
    p.add_argument("--point", type=parse_vector)
    p.add_argument("--vector", type=parse_vector)

    p = sub.add_parser("volume", help="forward geodesic ball volumes")
    _add_common(p)
    p.add_argument("--point", type=parse_vector)
    p.add_argument("--radii", type=parse_radii)
    p.add_argument("--ntheta", type=int, default=None)
    p.add_argument("--step", type=float, default=None)

    p = sub.add_parser("verify", help="sampled check of a comparison theorem")
    _add_common(p)
    p.add_argument("--theorem", required=False,
                   help="4.1, 5.1, 5.2, 5.3, 6.1, 6.2, 6.3, 2.1 (Jacobi lemma) or 7.1 (dual lemma)")
    p.add_argument("--point", type=parse_vector)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--Lambda", dest="Lambda", type=float, default=None)
    p.add_argument("--side", default=None, choices=["upper", "lower"])
    p.add_argument("--radii", type=parse_radii)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--rmin", type=float, default=None)
    p.add_argument("--rmax", type=float, default=None)
    p.add_argument("--step", type=float, default=None)
    p.add_argument("--tolerance", type=float, default=None)

    p = sub.add_parser("eigen-bound", help="closed-form first-eigenvalue lower bounds")
    _add_common(p)
    p.add_argument("--theorem", default=None, help="7.3, 7.4 or 7.5")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--a", type=float, default=None)
    p.add_argument("--c", type=float, default=None)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--lambda", dest="reversibility", type=float, default=None)
    p.add_argument("--snorm", type=float, default=None)

    p = sub.add_parser("lambda1", help="Rayleigh-quotient estimate of lambda_1 on a ball (n = 2)")
    _add_common(p)
    p.add_argument("--point", type=parse_vector)
    p.add_argument("--R", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)

    p = sub.add_parser("riccati-check", help="Riccati identity along one radial geodesic")
    _add_common(p)
    p.add_argument("--point", type=parse_vector)
    p.add_argument("--theta", type=float, default=None, help="direction angle (n = 2)")
    p.add_argument("--vector", type=parse_vector, help="direction (any n)")
    p.add_argument("--rmax", type=float, default=None)
    return ap


# configuration -----------------------------------------------------------------------------

def resolve(args):
    """Merge --config file values under explicit flags; returns a plain dict."""
    import yaml

    from .errors import UsageError

    cfg = {k: v for k, v in vars(args).items() if k != "config"}
    if args.config:
        try:
            with open(args.config) as fh:
                filed = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        if not isinstance(filed, dict):
            raise UsageError("config file must be a mapping")
        filed = {str(k).replace("-", "_"): v for k, v in filed.items()}
        for k, v in filed.items():
            if k == "metric":
                continue
            if k not in cfg:
                raise UsageError(f"unknown config key {k!r} for {args.command}")
            if cfg[k] is None:
                if k == "radii" and isinstance(v, str):
                    v = parse_radii(v)
                elif k in ("point", "vector", "b", "scales", "center") and isinstance(v, str):
                    v = parse_vector(v)
                cfg[k] = v
        if "metric" in filed and cfg.get("metric") is None:
            cfg["metric"] = filed["metric"]
    if cfg.get("seed") is None:
        cfg["seed"] = 0
    return cfg


def metric_of(cfg):
    from .errors import UsageError
    from .metrics import load_metric, make_metric, metric_from_config

    spec = cfg.get("metric")
    if spec is None:
        raise UsageError("--metric is required")
    if isinstance(spec, dict):
        return metric_from_config(spec)
    if os.path.exists(spec) and spec.endswith((".yaml", ".yml", ".json")):
        return load_metric(spec)
    params = {}
    if cfg.get("b") is not None:
        params["b"] = cfg["b"]
    if cfg.get("base") is not None:
        params["base"] = cfg["base"]
    if cfg.get("scales") is not None:
        params["scales"] = cfg["scales"]
    dim = cfg.get("dim")
    if dim is None:
        dim = len(params["b"]) if "b" in params else len(params.get("scales", [0, 0]))
    return make_metric(spec, dim=int(dim), chart_radius=cfg.get("chart_radius"), **params)


def volume_of(cfg):
    from .volume import volume_form

    return volume_form(cfg.get("volume_form") or "busemann-hausdorff")


def _point(cfg, metric, key="point"):
    import numpy as np

    from .errors import DomainError, UsageError

    v = cfg.get(key)
    p = metric.base_point if v is None else np.asarray(v, float)
    if p.shape != (metric.dim,):
        raise UsageError(f"--{key} needs {metric.dim} components")
    if not metric.contains(p):
        raise DomainError(f"point {p.tolist()} lies outside the chart domain")
    return p


def _vector(cfg, metric, key="vector"):
    import numpy as np

    from .errors import UsageError

    v = cfg.get(key)
    if v is None:
        raise UsageError(f"--{key} is required")
    y = np.asarray(v, float)
    if y.shape != (metric.dim,):
        raise UsageError(f"--{key} needs {metric.dim} components")
    return y


# operations ---------------------------------------------------------------------------------

def _rows_csv(header, rows):
    import csv
    import io

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(float(v)) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def op_list_metrics(cfg):
    from .metrics import list_metrics

    roster = list_metrics()
    rows = sorted(roster.items())
    return {"metrics": roster}, True, {"metrics": _rows_csv(["kind", "description"], rows)}


def op_validate(cfg):
    import math

    import numpy as np

    from .tensors import check_positive_definite, metric_tensor

    m = metric_of(cfg)
    diag = {"metric": m.describe(), "warnings": []}
    p = _point(cfg, m)
    rng = np.random.default_rng(cfg["seed"])
    Y = rng.standard_normal((64, m.dim))
    check_positive_definite(metric_tensor(m, np.broadcast_to(p, Y.shape), Y))
    diag["strong_convexity"] = "ok at the base point (64 directions)"
    known = m.known
    c = cfg.get("c")
    if c is None and known is not None:
        c = known.K_max
    radii = cfg.get("radii")
    if radii and c is not None and c > 0:
        limit = math.pi / math.sqrt(c)
        if max(radii) >= limit:
            diag["warnings"].append(
                f"radii reach {max(radii):.6g} >= pi/sqrt(c) = {limit:.6g}: ct_c is undefined there")
    return diag, True, {}


def op_tensors(cfg):
    import numpy as np

    from .tensors import bundle

    m = metric_of(cfg)
    x = _point(cfg, m)
    y = _vector(cfg, m)
    b = bundle(m, x, y)
    names = ("g", "g_inv", "C", "gamma", "N", "Gamma", "G")
    res = {k: np.asarray(getattr(b, k)).tolist() for k in names}
    rows = []
    for k in names:
        a = np.asarray(getattr(b, k))
        for idx in np.ndindex(a.shape):
            rows.append([k, " ".join(map(str, idx)), float(a[idx])])
    return res, True, {"tensors": _rows_csv(["tensor", "index", "value"], rows)}


def op_geodesic(cfg):
    import io

    from .geodesy import DEFAULT_STEP, integrate_geodesic

    m = metric_of(cfg)
    x = _point(cfg, m)
    y = _vector(cfg, m)
    path = integrate_geodesic(m, x, y, cfg.get("length") or 1.0, cfg.get("step") or DEFAULT_STEP,
                              frame=bool(cfg.get("frame")))
    res = {"length": float(path.length), "endpoint": path.endpoint.tolist(),
           "speed_defect": float(path.speed_defect()), "nodes": int(len(path.t))}
    if cfg.get("frame"):
        res["frame_defect"] = float(path.frame_defect())
    buf = io.StringIO()
    path.to_csv(buf, frames=bool(cfg.get("frame")))
    return res, True, {"geodesic": buf.getvalue()}


def op_curvature_scan(cfg):
    from .curvature import certify_bounds
    from .metrics import Ball

    m = metric_of(cfg)
    c = _point(cfg, m, "center")
    region = None
    if cfg.get("region_radius") is not None:
        region = Ball(float(cfg["region_radius"]), tuple(float(v) for v in c))
    cert = certify_bounds(m, region, cfg.get("samples") or 4096, cfg.get("refinements") or 50,
                          volume_of(cfg), seed=cfg["seed"])
    d = cert.to_dict()
    rows = [[k, float(d[k])] for k in ("K_min", "K_max", "Ric_min", "Ric_max", "S_norm_max",
                                       "reversibility")]
    return d, True, {"bounds": _rows_csv(["quantity", "value"], rows)}


def op_laplacian(cfg):
    from .calculus import laplacian, laplacian_trace_route, scalar_field

    m = metric_of(cfg)
    x = _point(cfg, m)
    center = cfg.get("field_center")
    f = scalar_field(cfg.get("field") or "half-square", center, m.dim)
    dmu = volume_of(cfg)
    a = float(laplacian(m, f, x, dmu))
    b = float(laplacian_trace_route(m, f, x, dmu))
    res = {"field": f.name, "point": x.tolist(), "divergence_route": a, "trace_route": b,
           "difference": abs(a - b)}
    return res, True, {}


def op_s_curvature(cfg):
    from .calculus import s_curvature, s_curvature_geodesic, s_norm

    m = metric_of(cfg)
    x = _point(cfg, m)
    y = _vector(cfg, m)
    dmu = volume_of(cfg)
    a = float(s_curvature(m, x, y, dmu))
    b = float(s_curvature_geodesic(m, x, y, dmu))
    sn = s_norm(m, x, dmu)
    res = {"point": x.tolist(), "vector": y.tolist(), "S": a, "S_along_geodesic": b,
           "S_norm": float(sn.value), "S_norm_direction": sn.argmax.tolist()}
    return res, True, {}


def op_volume(cfg):
    import numpy as np

    from .config import VerifyConfig
    from .geodesy import ball_volumes

    m = metric_of(cfg)
    p = _point(cfg, m)
    radii = np.asarray(cfg.get("radii") or VerifyConfig().radii(), float)
    ntheta = cfg.get("ntheta") or (64 if m.dim == 2 else 8)
    V, err, _ = ball_volumes(m, p, radii, ntheta, cfg.get("step") or 1e-2, volume_of(cfg))
    rows = [[float(r), float(v), float(e)] for r, v, e in zip(radii, V, err)]
    res = {"radii": radii.tolist(), "volumes": V.tolist(), "error_estimates": err.tolist()}
    return res, True, {"volumes": _rows_csv(["r", "volume", "error_estimate"], rows)}


def op_verify(cfg):
    import numpy as np

    from . import comparison as cmp
    from .config import VerifyConfig, updated
    from .errors import UsageError

    m = metric_of(cfg)
    p = _point(cfg, m)
    th = str(cfg.get("theorem") or "")
    if not th:
        raise UsageError("--theorem is required")
    vc = updated(VerifyConfig(), samples=cfg.get("samples"), rmin=cfg.get("rmin"),
                 rmax=cfg.get("rmax"), step=cfg.get("step"), tolerance=cfg.get("tolerance"),
                 seed=cfg.get("seed"))
    dmu = volume_of(cfg)
    if th == "4.1":
        rep = cmp.verify_hessian(m, p, cfg.get("c"), cfg.get("side") or "upper", vc, dmu)
    elif th in ("5.1", "5.2", "5.3"):
        rep = cmp.verify_laplacian(m, p, th, cfg.get("c"), vc, dmu)
    elif th in ("6.1", "6.2", "6.3"):
        radii = cfg.get("radii")
        if radii is not None:
            radii = np.asarray(radii, float)
            vc = updated(vc, rmax=float(radii.max()))
        rep = cmp.verify_volume(m, p, th, radii, cfg.get("c"), cfg.get("Lambda"), vc, dmu)
    elif th == "2.1":
        rep = cmp.lemma21_check(m, p, cfg.get("c"), vc.samples, vc.rmax, vc.step, vc.seed)
    elif th == "7.1":
        rep = cmp.lemma71_check(m, vc.samples, seed=vc.seed)
    else:
        raise UsageError(f"unknown theorem {th!r}")
    return rep.to_dict(), rep.verdict, {"report": rep.to_csv(), "_stem": rep.file_stem()}


def op_eigen_bound(cfg):
    import math

    from .errors import UsageError
    from .spectral import EigenBoundInput, eigen_bound

    th = str(cfg.get("theorem") or "")
    if not th:
        raise UsageError("--theorem is required")
    n = cfg.get("n") or cfg.get("dim")
    if n is None:
        raise UsageError("--n is required")
    inp = EigenBoundInput(n=int(n), snorm=cfg.get("snorm") or 0.0,
                          reversibility=cfg.get("reversibility") or 1.0, c=cfg.get("c"),
                          a=cfg.get("a"), radius=cfg.get("R") if cfg.get("R") is not None else math.inf)
    val = eigen_bound(inp, th)
    res = {"theorem": th, "bound": val, "inputs": {k: getattr(inp, k) for k in
                                                   ("n", "snorm", "reversibility", "c", "a", "radius")}}
    if not math.isfinite(inp.radius):
        res["inputs"]["radius"] = "inf"
    return res, True, {}


def op_lambda1(cfg):
    import warnings

    from .config import Lambda1Config, updated
    from .spectral import lambda1_estimate

    m = metric_of(cfg)
    p = _point(cfg, m)
    lc = updated(Lambda1Config(), grid=cfg.get("grid"), seed=cfg.get("seed"))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        r = lambda1_estimate(m, p, cfg.get("R") or 1.0, lc, volume_of(cfg))
    res = r.to_dict()
    res["warning"] = None if r.converged else "did not converge; best quotient reported"
    return res, True, {}


def op_riccati(cfg):
    import math

    import numpy as np

    from .comparison import riccati_check
    from .config import RiccatiConfig, updated

    m = metric_of(cfg)
    p = _point(cfg, m)
    if cfg.get("vector") is not None:
        d = _vector(cfg, m)
    elif cfg.get("theta") is not None and m.dim == 2:
        d = np.array([math.cos(cfg["theta"]), math.sin(cfg["theta"])])
    else:
        d = None
    rc = updated(RiccatiConfig(), rmax=cfg.get("rmax"))
    rep = riccati_check(m, p, d, rc)
    rows = list(zip(rep.radii, rep.lhs, rep.rhs))
    return rep.to_dict(), rep.verdict, {"riccati": _rows_csv(["r", "d_tr_H", "rhs"], rows)}


OPERATIONS = {
    "list-metrics": op_list_metrics, "validate": op_validate, "tensors": op_tensors,
    "geodesic": op_geodesic, "curvature-scan": op_curvature_scan, "laplacian": op_laplacian,
    "s-curvature": op_s_curvature, "volume": op_volume, "verify": op_verify,
    "eigen-bound": op_eigen_bound, "lambda1": op_lambda1, "riccati-check": op_riccati,
}


# driver ----------------------------------------------------------------------------------------

def _exit_status(exc):
    from .errors import HypothesisError, NumericalError

    if isinstance(exc, HypothesisError):
        return EXIT_HYPOTHESIS
    if isinstance(exc, NumericalError):
        return EXIT_NUMERICAL
    return EXIT_USAGE


def _write(outdir, stem, doc, tables, formats):
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    if "json" in formats:
        (out / f"{stem}.json").write_text(doc + "\n", encoding="utf-8")
    if "csv" in formats:
        for name, text in tables.items():
            suffix = "" if name in ("report",) else f"_{name}"
            (out / f"{stem}{suffix}.csv").write_text(text, encoding="utf-8")


def run(argv=None, stdout=None):
    """Parse ``argv``, run one operation, print the JSON document; returns the exit status."""
    stdout = stdout or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if args.threads:
        for var in THREAD_VARS:
            os.environ[var] = str(args.threads)

    from . import __version__
    from .errors import FinslerError
    from .reports import clean

    cfg = {}
    formats = [f.strip() for f in (args.format or "json").split(",") if f.strip()]
    try:
        cfg = resolve(args)
        results, ok, tables = OPERATIONS[args.command](cfg)
        status = EXIT_OK if ok else EXIT_HYPOTHESIS
        verdict = "pass" if ok else "fail"
    except (FinslerError, ValueError, argparse.ArgumentTypeError) as exc:
        status = _exit_status(exc)
        results = {"error": {"type": type(exc).__name__, "message": str(exc),
                             "exit_status": status}}
        tables, verdict = {}, "error"
    stem = tables.pop("_stem", None) or args.command
    public = {k: v for k, v in cfg.items() if k not in ("out", "format", "threads")}
    doc = json.dumps(clean({"tool_version": __version__, "config": public, "results": results,
                            "verdict": verdict}), indent=2, sort_keys=True)
    print(doc, file=stdout)
    outdir = cfg.get("out") or getattr(args, "out", None)
    if outdir:
        _write(outdir, stem, doc, tables, formats)
    return status


def main(argv=None):
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
