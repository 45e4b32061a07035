"""Model functions and sampled verification of the comparison inequalities.

Every verifier works along radial geodesics from the base point, where the
distance function is r = t and its gradient is the velocity T, so no
boundary-value problem is solved.  The curvature and S-curvature constants
entering a bound are either the closed-form constants of a model metric or
certified by sampling (:func:`finslerkit.curvature.certify_bounds`); a
verifier refuses to run when the requested constants are not covered.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.integrate import quad

from . import curvature as curv
from .calculus import LocalJet2, hessian, laplacian_trace_route, s_norm
from .config import CertifyConfig, RiccatiConfig, VerifyConfig
from .errors import DomainError, HypothesisError, NumericalError, UsageError
from .geodesy import RadialField, ball_volumes, direction_grid, polar_density, radial_field
from .metrics import Ball, FinslerMetric
from .reports import ComparisonReport
from .tensors import metric_tensor, unit_ball_volume, unit_sphere_area
from .volume import BusemannHausdorff, VolumeForm


# model functions -------------------------------------------------------------------

def ct(c: float, t):
    """sqrt(c) cot(sqrt(c) t), 1/t, or sqrt(-c) coth(sqrt(-c) t)."""
    t = np.asarray(t, float)
    if np.any(t <= 0):
        raise DomainError("ct_c(t) needs t > 0")
    if c > 0:
        k = math.sqrt(c)
        if np.any(t >= math.pi / k):
            raise DomainError(f"ct_c(t) needs t < pi/sqrt(c) = {math.pi / k:.6g}")
        return k / np.tan(k * t)
    if c == 0:
        return 1.0 / t
    k = math.sqrt(-c)
    return k / np.tanh(k * t)


def s(c: float, t):
    """sin(sqrt(c) t)/sqrt(c), t, or sinh(sqrt(-c) t)/sqrt(-c).

    Normalised so that s_c(t) ~ t as t -> 0 (and continuous in c); for
    |c| = 1 this is sin t or sinh t.
    """
    t = np.asarray(t, float)
    if c > 0:
        k = math.sqrt(c)
        return np.sin(k * t) / k
    if c == 0:
        return t + 0.0
    k = math.sqrt(-c)
    return np.sinh(k * t) / k


def model_volume(c: float, lam: float, n: int, r):
    """V_{c,lam,n}(r) = vol(S^{n-1}) int_0^r e^{lam t} s_c(t)^{n-1} dt."""
    r_arr = np.atleast_1d(np.asarray(r, float))
    if np.any(r_arr <= 0):
        raise DomainError("model volume needs r > 0")
    if c > 0 and np.any(r_arr > math.pi / math.sqrt(c) + 1e-15):
        raise DomainError(f"model volume needs r <= pi/sqrt(c) = {math.pi / math.sqrt(c):.6g}")
    f = lambda t: math.exp(lam * t) * float(s(c, t)) ** (n - 1)
    order = np.argsort(r_arr)
    out = np.empty_like(r_arr)
    acc, prev = 0.0, 0.0
    for i in order:
        acc += quad(f, prev, r_arr[i], epsabs=0.0, epsrel=1e-12, limit=200)[0]
        prev = r_arr[i]
        out[i] = acc
    out *= unit_sphere_area(n)
    return out if np.ndim(r) else float(out[0])


def geometric_radii(start: float, stop: float, ratio: float):
    if start <= 0 or stop < start or ratio <= 1:
        raise UsageError("geometric radius grid needs 0 < start <= stop and ratio > 1")
    k = int(math.floor(math.log(stop / start) / math.log(ratio) + 1e-9))
    radii = start * ratio ** np.arange(k + 1)
    if radii[-1] < stop * (1 - 1e-12):
        radii = np.append(radii, stop)
    return radii


# hypotheses --------------------------------------------------------------------------

@dataclass
class Hypotheses:
    K_min: float
    K_max: float
    Ric_min: float
    Ric_max: float
    S_norm: float
    reversibility: float
    source: str
    region: dict
    certificate: Optional[dict] = None

    def to_dict(self):
        return asdict(self)


def metric_hypotheses(metric: FinslerMetric, region: Ball, dmu: Optional[VolumeForm] = None,
                      cfg: CertifyConfig = CertifyConfig()) -> Hypotheses:
    """Curvature constants over a region: closed form for model metrics, else certified."""
    dmu = dmu or BusemannHausdorff()
    n = metric.dim
    known = metric.known
    if known is not None and isinstance(dmu, BusemannHausdorff):
        rev = _region_reversibility(metric, region)
        return Hypotheses(known.K_min, known.K_max, (n - 1) * known.K_min, (n - 1) * known.K_max,
                          known.S_norm, rev, "closed-form", region.describe())
    cert = curv.certify_bounds(metric, region, cfg.nsamples, cfg.refinements, dmu,
                               seed=cfg.seed, top=cfg.top)
    return Hypotheses(cert.K_min, cert.K_max, cert.Ric_min, cert.Ric_max, cert.S_norm_max,
                      cert.reversibility, "certified", region.describe(), cert.to_dict())


def _region_reversibility(metric, region, count=512):
    if metric.riemannian:
        return 1.0
    rng = np.random.default_rng(0)
    n = metric.dim
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=-1, keepdims=True)
    c = np.zeros(n) if region.center is None else np.asarray(region.center, float)
    pts = np.concatenate([c[None], c + region.radius * d])
    if metric.reversibility_at(list(c)) is not None:
        return float(np.max(metric.reversibility_at([pts[:, i] for i in range(n)])))
    from .tensors import reversibility

    return float(np.max(reversibility(metric, pts)[0]))


def _traversed_region(metric, p, X):
    rho = float(np.max(np.linalg.norm(np.asarray(X) - p, axis=-1)))
    return Ball(rho * 1.02 + 1e-12, tuple(float(v) for v in p))


def _unit_directions(metric, p, count, seed):
    """Deterministic unit-speed initial vectors at p."""
    n = metric.dim
    rng = np.random.default_rng(seed)
    if n == 2:
        th = 2 * np.pi * (np.arange(count) + rng.uniform()) / count
        u = np.stack([np.cos(th), np.sin(th)], axis=-1)
    else:
        u = rng.standard_normal((count, n))
        u /= np.linalg.norm(u, axis=-1, keepdims=True)
    return u / metric.norm(np.broadcast_to(p, u.shape), u)[:, None]


def _require(cond, message):
    if not cond:
        raise HypothesisError(message)


def _base(metric, p):
    return metric.base_point if p is None else np.asarray(p, float)


def _pick_nodes(t, count, rmin, rng, nrays):
    valid = np.nonzero(t >= rmin - 1e-12)[0]
    if len(valid) == 0:
        raise UsageError("no nodes beyond rmin: increase rmax")
    rays = rng.integers(0, nrays, count)
    nodes = valid[rng.integers(0, len(valid), count)]
    return rays, nodes


# Hessian comparison ------------------------------------------------------------------------

def _check_reach(c, r):
    if c is not None and c > 0 and r >= math.pi / math.sqrt(c):
        raise DomainError("rmax must stay below pi/sqrt(c)")


def verify_hessian(metric: FinslerMetric, p=None, c: Optional[float] = None, side: str = "upper",
                   cfg: VerifyConfig = VerifyConfig(), dmu: Optional[VolumeForm] = None,
                   hypotheses: Optional[Hypotheses] = None) -> ComparisonReport:
    """H(r)(X, X) against ct_c(r) (g(X, X) - g(T, X)^2).

    side="upper": c bounds the flag curvature from above, so H >= bound.
    side="lower": c bounds it from below, so H <= bound.
    ``c`` defaults to the certified K_max (upper) or K_min (lower).
    """
    if side not in ("upper", "lower"):
        raise UsageError("side must be 'upper' or 'lower'")
    dmu = dmu or BusemannHausdorff()
    p = _base(metric, p)
    _check_reach(c, cfg.rmax)
    rng = np.random.default_rng(cfg.seed)
    dirs = _unit_directions(metric, p, cfg.nrays, cfg.seed)
    field = radial_field(metric, p, dirs, cfg.rmax, cfg.step)
    path = field.path
    hyp = hypotheses or metric_hypotheses(metric, _traversed_region(metric, p, path.x), dmu)
    slack = cfg.hypothesis_slack
    if side == "upper":
        c = hyp.K_max if c is None else float(c)
        _require(hyp.K_max <= c + slack, f"flag curvature reaches {hyp.K_max:.6g} > c = {c:.6g}")
    else:
        c = hyp.K_min if c is None else float(c)
        _require(hyp.K_min >= c - slack, f"flag curvature reaches {hyp.K_min:.6g} < c = {c:.6g}")
    if c > 0 and cfg.rmax >= math.pi / math.sqrt(c):
        raise DomainError("rmax must stay below pi/sqrt(c)")

    rays, nodes = _pick_nodes(path.t, cfg.samples, cfg.rmin, rng, len(dirs))
    loc = field.local()
    X = path.x[rays, nodes]
    T = path.v[rays, nodes]
    L = LocalJet2(loc.value[rays, nodes], loc.grad[rays, nodes], loc.hess[rays, nodes])
    H = hessian(metric, L, X, grad=T)
    W = rng.standard_normal(X.shape)
    g = metric_tensor(metric, X, T)
    HWW = np.einsum("...i,...ij,...j->...", W, H, W)
    gWW = np.einsum("...i,...ij,...j->...", W, g, W)
    gTW = np.einsum("...i,...ij,...j->...", T, g, W)
    r = path.t[nodes]
    bound = ct(c, r) * (gWW - gTW ** 2)
    margin = HWW - bound if side == "upper" else bound - HWW
    rep = ComparisonReport("4.1", metric.describe(),
                           {"c": c, "side": side, "curvature": hyp.to_dict()},
                           cfg.tolerance, volume_form=dmu.name,
                           notes={"rays": len(dirs), "step": path.step, "rmin": cfg.rmin,
                                  "rmax": cfg.rmax})
    for i in range(len(r)):
        rep.add({"r": float(r[i]), "x": X[i].tolist(), "T": T[i].tolist(), "X": W[i].tolist()},
                HWW[i], bound[i], margin[i])
    return rep


# Laplacian comparison ----------------------------------------------------------------------

def _laplacian_hypotheses(theorem, hyp, c, n, slack):
    if theorem == "5.1":
        c = hyp.K_max if c is None else c
        _require(hyp.K_max <= c + slack, f"flag curvature reaches {hyp.K_max:.6g} > c = {c:.6g}")
    elif theorem == "5.2":
        _require(hyp.K_max <= slack, f"flag curvature is not nonpositive (max {hyp.K_max:.6g})")
        c = hyp.Ric_max if c is None else c
        _require(c < 0, "Ricci bound c must be negative")
        _require(hyp.Ric_max <= c + slack, f"Ricci curvature reaches {hyp.Ric_max:.6g} > c = {c:.6g}")
    elif theorem == "5.3":
        c = hyp.Ric_min / (n - 1) if c is None else c
        _require(hyp.Ric_min >= (n - 1) * c - slack,
                 f"Ricci curvature reaches {hyp.Ric_min:.6g} < (n-1)c = {(n - 1) * c:.6g}")
    else:
        raise UsageError(f"unknown Laplacian theorem {theorem!r}")
    return float(c)


def verify_laplacian(metric: FinslerMetric, p=None, theorem: str = "5.1", c: Optional[float] = None,
                     cfg: VerifyConfig = VerifyConfig(), dmu: Optional[VolumeForm] = None,
                     hypotheses: Optional[Hypotheses] = None) -> ComparisonReport:
    """Delta r along radial geodesics against the Laplacian comparison bounds.

    Delta r is d/dr log sigma from the polar density; a subset of points is
    cross-checked against tr H(r) - S(grad r).  The S-norm in the bound is
    the pointwise sup at each sample point.
    """
    theorem = str(theorem)
    dmu = dmu or BusemannHausdorff()
    p = _base(metric, p)
    n = metric.dim
    _check_reach(c, cfg.rmax)
    rng = np.random.default_rng(cfg.seed)
    pol = polar_density(metric, p, direction_grid(n, cfg.ntheta), cfg.rmax, cfg.step, dmu)
    path = pol.path
    hyp = hypotheses or metric_hypotheses(metric, _traversed_region(metric, p, path.x), dmu)
    c = _laplacian_hypotheses(theorem, hyp, c, n, cfg.hypothesis_slack)
    if c > 0 and cfg.rmax >= math.pi / math.sqrt(c):
        raise DomainError("rmax must stay below pi/sqrt(c)")
    rays, nodes = _pick_nodes(path.t, cfg.samples, cfg.rmin, rng, len(pol.grid.theta))
    X = path.x[rays, nodes]
    T = path.v[rays, nodes]
    r = path.t[nodes]
    lap = pol.log_derivative[rays, nodes]
    snorm = s_norm(metric, X, dmu, count=cfg.snorm_directions).value
    if theorem == "5.1":
        bound = (n - 1) * ct(c, r) - snorm
        margin = lap - bound
    elif theorem == "5.2":
        bound = ct(c, r) - snorm
        margin = lap - bound
    else:
        bound = (n - 1) * ct(c, r) + snorm
        margin = bound - lap

    # cross-check against the Hessian-trace route at a few points
    k = min(cfg.crosscheck_points, len(r))
    loc = RadialField(path).local()
    L = LocalJet2(loc.value[rays[:k], nodes[:k]], loc.grad[rays[:k], nodes[:k]],
                  loc.hess[rays[:k], nodes[:k]])
    other = laplacian_trace_route(metric, L, X[:k], dmu, grad=T[:k])
    disagreement = float(np.max(np.abs(other - lap[:k])))
    if disagreement > cfg.crosscheck_tolerance:
        raise NumericalError(f"Laplacian routes disagree by {disagreement:.3g}")

    rep = ComparisonReport(theorem, metric.describe(),
                           {"c": c, "S_norm": "pointwise", "curvature": hyp.to_dict()},
                           cfg.tolerance, volume_form=dmu.name,
                           notes={"ntheta": cfg.ntheta, "step": path.step,
                                  "crosscheck_max_difference": disagreement,
                                  "crosscheck_points": k})
    for i in range(len(r)):
        rep.add({"r": float(r[i]), "x": X[i].tolist(), "T": T[i].tolist(),
                 "S_norm": float(snorm[i])}, lap[i], bound[i], margin[i])
    return rep


# volume comparison ---------------------------------------------------------------------------

def _volume_hypotheses(theorem, hyp, c, lam, n, slack):
    if theorem == "6.1":
        c = hyp.K_max if c is None else c
        _require(hyp.K_max <= c + slack, f"flag curvature reaches {hyp.K_max:.6g} > c = {c:.6g}")
    elif theorem == "6.2":
        _require(hyp.K_max <= slack, f"flag curvature is not nonpositive (max {hyp.K_max:.6g})")
        c = hyp.Ric_max if c is None else c
        _require(c < 0, "Ricci bound c must be negative")
        _require(hyp.Ric_max <= c + slack, f"Ricci curvature reaches {hyp.Ric_max:.6g} > c = {c:.6g}")
    elif theorem == "6.3":
        c = hyp.Ric_min / (n - 1) if c is None else c
        _require(hyp.Ric_min >= (n - 1) * c - slack,
                 f"Ricci curvature reaches {hyp.Ric_min:.6g} < (n-1)c = {(n - 1) * c:.6g}")
    else:
        raise UsageError(f"unknown volume theorem {theorem!r}")
    lam = max(hyp.S_norm, 0.0) if lam is None else lam
    _require(hyp.S_norm <= lam + slack, f"S-norm reaches {hyp.S_norm:.6g} > Lambda = {lam:.6g}")
    return float(c), float(lam)


def model_for(theorem, c, lam, n, r):
    if theorem == "6.1":
        return model_volume(c, -lam, n, r)
    if theorem == "6.2":
        return unit_ball_volume(n) / unit_ball_volume(2) * model_volume(c, -lam, 2, r)
    return model_volume(c, lam, n, r)


def verify_volume(metric: FinslerMetric, p=None, theorem: str = "6.1", radii=None,
                  c: Optional[float] = None, lam: Optional[float] = None,
                  cfg: VerifyConfig = VerifyConfig(), dmu: Optional[VolumeForm] = None,
                  hypotheses: Optional[Hypotheses] = None) -> ComparisonReport:
    """Monotonicity of vol(B_p(r)) / V(r) on a radius grid.

    Increasing for 6.1/6.2, decreasing for 6.3; each consecutive pair of
    radii contributes one margin.  With the Busemann-Hausdorff form the
    small-radius normalisation vol/V -> 1 is recorded too.
    """
    theorem = str(theorem)
    dmu = dmu or BusemannHausdorff()
    p = _base(metric, p)
    n = metric.dim
    radii = cfg.radii() if radii is None else np.sort(np.asarray(radii, float))
    rnorm = cfg.normalization_radius
    allr = np.unique(np.concatenate([radii, [rnorm]]))
    if c is not None and c > 0 and allr.max() > math.pi / math.sqrt(c):
        raise DomainError("radii must stay below pi/sqrt(c)")
    ntheta = cfg.ntheta if n == 2 else max(4, cfg.ntheta // 4)
    vols, errs, pol = ball_volumes(metric, p, allr, ntheta, cfg.step, dmu)
    hyp = hypotheses or metric_hypotheses(metric, _traversed_region(metric, p, pol.path.x), dmu)
    c, lam = _volume_hypotheses(theorem, hyp, c, lam, n, cfg.hypothesis_slack)
    if c > 0 and allr.max() > math.pi / math.sqrt(c):
        raise DomainError("radii must stay below pi/sqrt(c)")
    model = model_for(theorem, c, lam, n, allr)
    ratio = vols / model
    idx = np.searchsorted(allr, radii)
    q = ratio[idx]
    sign = 1.0 if theorem in ("6.1", "6.2") else -1.0
    rep = ComparisonReport(theorem, metric.describe(),
                           {"c": c, "Lambda": lam, "curvature": hyp.to_dict()},
                           cfg.tolerance, volume_form=dmu.name,
                           notes={"ntheta": ntheta, "step": pol.path.step,
                                  "monotonicity": "increasing" if sign > 0 else "decreasing",
                                  "radii": radii.tolist(), "volumes": vols[idx].tolist(),
                                  "model_volumes": model[idx].tolist(), "ratios": q.tolist(),
                                  "volume_error_estimates": errs[idx].tolist()})
    for k in range(len(radii) - 1):
        d = sign * (q[k + 1] - q[k])
        rep.add({"r": float(radii[k]), "r_next": float(radii[k + 1])}, q[k + 1], q[k], d)
    if isinstance(dmu, BusemannHausdorff):
        # the small-ball limit holds against V_{c,-Lambda,n} whatever the theorem
        qn = float(vols[np.searchsorted(allr, rnorm)] / model_volume(c, -lam, n, rnorm))
        rep.add({"r": float(rnorm)}, qn, 1.0, cfg.normalization_tolerance - abs(qn - 1.0),
                kind="normalization")
    return rep


# Riccati identity and the two lemmas ------------------------------------------------------------

def _frame_hessians(field: RadialField):
    """Transverse Hessian of r in the parallel frame at all nodes (nan at r = 0)."""
    path = field.path
    loc = field.local()
    n = path.x.shape[-1]
    H = np.full(path.x.shape[:-1] + (n, n), np.nan)
    H[..., 1:, :, :] = hessian(path.metric, LocalJet2(loc.value[..., 1:], loc.grad[..., 1:, :],
                                                      loc.hess[..., 1:, :, :]),
                               path.x[..., 1:, :], grad=path.v[..., 1:, :])
    E = path.frame[..., :-1]
    return np.einsum("...ia,...ij,...jb->...ab", E, H, E)


@dataclass
class RiccatiReport:
    radii: list
    lhs: list
    rhs: list
    residual: float
    tolerance: float

    @property
    def verdict(self):
        return self.residual < self.tolerance

    def to_dict(self):
        return {"radii": self.radii, "lhs": self.lhs, "rhs": self.rhs, "residual": self.residual,
                "tolerance": self.tolerance, "verdict": "pass" if self.verdict else "fail"}


def riccati_check(metric: FinslerMetric, p=None, direction=None,
                  cfg: RiccatiConfig = RiccatiConfig(), tolerance: float = 1e-3) -> RiccatiReport:
    """d/dr tr H(r) against -Ric(T) - sum_ij H(E_i, E_j)^2 along one ray."""
    p = _base(metric, p)
    n = metric.dim
    if direction is None:
        direction = np.ones(n) / math.sqrt(n)
    field = radial_field(metric, p, [direction], cfg.rmax, cfg.step)
    path = field.path
    Hf = _frame_hessians(field)[0]
    tr = np.trace(Hf, axis1=-2, axis2=-1)
    sq = np.sum(Hf ** 2, axis=(-2, -1))
    h = path.step
    N = len(path.t) - 1
    lo = max(2, int(math.ceil(cfg.rmin / h)))
    ks = np.unique(np.linspace(lo, N - 2, cfg.radii).round().astype(int))
    d = (-tr[ks + 2] + 8 * tr[ks + 1] - 8 * tr[ks - 1] + tr[ks - 2]) / (12 * h)
    X = path.x[0, ks]
    T = path.v[0, ks]
    ric = curv.ricci_batch(metric, X, T)
    rhs = -ric - sq[ks]
    res = float(np.max(np.abs(d - rhs)))
    return RiccatiReport(path.t[ks].tolist(), d.tolist(), rhs.tolist(), res, tolerance)


def lemma21_check(metric: FinslerMetric, p=None, c: Optional[float] = None, samples: int = 50,
                  rmax: float = 1.5, step: float = 1e-2, seed: int = 0,
                  hypotheses: Optional[Hypotheses] = None) -> ComparisonReport:
    """g_T(nabla_T J, J) / g_T(J, J) >= ct_c(t) for transverse Jacobi fields with J(0) = 0."""
    p = _base(metric, p)
    n = metric.dim
    rng = np.random.default_rng(seed)
    dirs = _unit_directions(metric, p, 8, seed)
    field = radial_field(metric, p, dirs, rmax, step)
    path = field.path
    hyp = hypotheses or metric_hypotheses(metric, _traversed_region(metric, p, path.x))
    c = hyp.K_max if c is None else float(c)
    _require(hyp.K_max <= c + 1e-6, f"flag curvature reaches {hyp.K_max:.6g} > c = {c:.6g}")
    rays, nodes = _pick_nodes(path.t, samples, 2 * step, rng, len(dirs))
    coef = rng.standard_normal((samples, n - 1))
    J = np.einsum("...ia,...a->...i", path.variations[rays, nodes], coef)
    Jd = np.einsum("...ia,...a->...i", path.variation_rates[rays, nodes], coef)
    X, T = path.x[rays, nodes], path.v[rays, nodes]
    from .tensors import spray_derivatives

    sd = spray_derivatives(metric, X, T, 1)
    DJ = Jd + np.einsum("...ij,...j->...i", sd.Gy, J)
    g = metric_tensor(metric, X, T)
    ratio = np.einsum("...i,...ij,...j->...", DJ, g, J) / np.einsum("...i,...ij,...j->...", J, g, J)
    t = path.t[nodes]
    bound = ct(c, t)
    rep = ComparisonReport("lemma-2.1", metric.describe(), {"c": c, "curvature": hyp.to_dict()},
                           1e-4, notes={"step": path.step})
    for i in range(samples):
        rep.add({"t": float(t[i]), "x": X[i].tolist()}, ratio[i], bound[i], ratio[i] - bound[i])
    return rep


def lemma71_check(metric: FinslerMetric, samples: int = 1000, radius: Optional[float] = None,
                  seed: int = 0) -> ComparisonReport:
    """|xi(X)| <= lambda F*(xi) F(X) with lambda the reversibility at the sample point."""
    from .calculus import dual_norm
    from .tensors import reversibility

    n = metric.dim
    rng = np.random.default_rng(seed)
    rad = radius if radius is not None else 0.5 * getattr(metric.domain, "radius", 1.0)
    d = rng.standard_normal((samples, n))
    d /= np.linalg.norm(d, axis=-1, keepdims=True)
    X = metric.base_point + rad * rng.uniform(size=(samples, 1)) ** (1 / n) * d
    xi = rng.standard_normal((samples, n))
    V = rng.standard_normal((samples, n))
    lam_cf = metric.reversibility_at([X[:, i] for i in range(n)])
    lam = (np.broadcast_to(np.asarray(lam_cf, float), (samples,)) if lam_cf is not None
           else reversibility(metric, X)[0])
    Fs = dual_norm(metric, X, xi)
    F = metric.norm(X, V)
    lhs = np.abs(np.sum(xi * V, -1))
    rhs = lam * Fs * F
    rep = ComparisonReport("lemma-7.1", metric.describe(), {"reversibility": "pointwise"}, 1e-8)
    for i in range(samples):
        rep.add({"x": X[i].tolist()}, lhs[i], rhs[i], rhs[i] - lhs[i])
    return rep


__all__ = ["ct", "s", "model_volume", "geometric_radii", "Hypotheses", "metric_hypotheses",
           "verify_hessian", "verify_laplacian", "verify_volume", "riccati_check",
           "lemma21_check", "lemma71_check"]
