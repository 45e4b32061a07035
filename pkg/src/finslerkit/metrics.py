"""Finsler metric abstraction, chart domains and the built-in model roster.

Every metric evaluates ``F(x, y)`` on sequences of coordinate components, where a
component may be a float, a numpy array (a batch of points) or a jet.  Metrics
that are Randers-type (``alpha + beta``) also expose their Riemannian part and
one-form, which gives closed forms for the Busemann-Hausdorff density, the dual
norm and the reversibility.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from . import autodiff as ad
from .errors import StrongConvexityError, UsageError


# chart domains -------------------------------------------------------------

@dataclass(frozen=True)
class Ball:
    radius: float
    center: Optional[tuple] = None

    def _center(self, n):
        return np.zeros(n) if self.center is None else np.asarray(self.center, float)

    def contains(self, X):
        X = np.asarray(X, float)
        return np.linalg.norm(X - self._center(X.shape[-1]), axis=-1) < self.radius

    def describe(self):
        return {"type": "ball", "radius": self.radius,
                "center": None if self.center is None else list(self.center)}


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def contains(self, X):
        X = np.asarray(X, float)
        return np.all((X > np.asarray(self.lo)) & (X < np.asarray(self.hi)), axis=-1)

    def describe(self):
        return {"type": "box", "lo": list(self.lo), "hi": list(self.hi)}


@dataclass(frozen=True)
class KnownConstants:
    """Closed-form curvature data of a model metric (Busemann-Hausdorff volume)."""

    K_min: float
    K_max: float
    S_norm: float

    def ricci_bounds(self, n):
        return (n - 1) * self.K_min, (n - 1) * self.K_max


def _norm2(v):
    return ad.dot(v, v)


class FinslerMetric:
    """Base class.  Subclasses implement :meth:`F` (and optionally :meth:`F2`)."""

    kind = "abstract"
    name: str
    dim: int
    domain: object

    def F(self, x, y):
        raise NotImplementedError

    def F2(self, x, y):
        f = self.F(x, y)
        return f * f

    # numeric conveniences -------------------------------------------------
    def norm(self, X, Y):
        """F on arrays with the coordinate axis last."""
        X = np.asarray(X, float)
        Y = np.asarray(Y, float)
        n = self.dim
        return np.asarray(self.F([X[..., i] for i in range(n)], [Y[..., i] for i in range(n)]))

    def contains(self, X):
        return self.domain.contains(X)

    @property
    def base_point(self):
        return np.zeros(self.dim)

    def bh_density(self, x):
        """Closed-form Busemann-Hausdorff density, or None when not wired in."""
        return None

    def dual_norm(self, x, xi):
        """Closed-form dual norm F*(x, xi), or None."""
        return None

    def reversibility_at(self, x):
        """Closed-form sup F(-y)/F(y) at x, or None."""
        return None

    known: Optional[KnownConstants] = None
    riemannian = False

    def params(self):
        return {}

    def describe(self):
        return {"name": self.name, "kind": self.kind, "dimension": self.dim,
                "parameters": self.params(), "domain": self.domain.describe()}


# Riemannian models -------------------------------------------------------------

class ConformalMetric(FinslerMetric):
    """F = phi(x) |y| for a conformal factor phi."""

    riemannian = True

    def factor(self, x):
        raise NotImplementedError

    def F(self, x, y):
        return self.factor(x) * ad.sqrt(_norm2(y))

    def F2(self, x, y):
        phi = self.factor(x)
        return phi * phi * _norm2(y)

    def bh_density(self, x):
        return self.factor(x) ** self.dim

    def dual_norm(self, x, xi):
        return ad.sqrt(_norm2(xi)) / self.factor(x)

    def reversibility_at(self, x):
        return 1.0

    def riemannian_matrix(self, X):
        X = np.asarray(X, float)
        phi = np.asarray(self.factor([X[..., i] for i in range(self.dim)]))
        return phi[..., None, None] ** 2 * np.eye(self.dim)


@dataclass(frozen=True)
class Euclidean(ConformalMetric):
    dim: int = 2
    radius: float = 10.0
    name: str = "euclidean"
    kind = "euclidean"
    known = KnownConstants(0.0, 0.0, 0.0)

    @property
    def domain(self):
        return Ball(self.radius)

    def factor(self, x):
        return 1.0

    def F2(self, x, y):
        return _norm2(y)

    def params(self):
        return {}


@dataclass(frozen=True)
class RoundSphere(ConformalMetric):
    """Unit round sphere in the stereographic chart, 2|y| / (1 + |x|^2)."""

    dim: int = 2
    radius: float = 20.0
    name: str = "sphere"
    kind = "sphere"
    known = KnownConstants(1.0, 1.0, 0.0)

    @property
    def domain(self):
        return Ball(self.radius)

    def factor(self, x):
        return 2.0 / (1.0 + _norm2(x))


@dataclass(frozen=True)
class HyperbolicDisk(ConformalMetric):
    """Poincare ball model, 2|y| / (1 - |x|^2)."""

    dim: int = 2
    radius: float = 0.99
    name: str = "hyperbolic-disk"
    kind = "hyperbolic-disk"
    known = KnownConstants(-1.0, -1.0, 0.0)

    def __post_init__(self):
        if not 0 < self.radius < 1:
            raise UsageError("hyperbolic disk chart radius must lie in (0, 1)")

    @property
    def domain(self):
        return Ball(self.radius)

    def factor(self, x):
        return 2.0 / (1.0 - _norm2(x))


@dataclass(frozen=True)
class HyperbolicHalfPlane(ConformalMetric):
    """Upper half-space model, |y| / x_n."""

    dim: int = 2
    width: float = 20.0
    height: float = 50.0
    floor: float = 1e-2
    name: str = "hyperbolic-halfplane"
    kind = "hyperbolic-halfplane"
    known = KnownConstants(-1.0, -1.0, 0.0)

    @property
    def domain(self):
        lo = (-self.width,) * (self.dim - 1) + (self.floor,)
        hi = (self.width,) * (self.dim - 1) + (self.height,)
        return Box(lo, hi)

    @property
    def base_point(self):
        p = np.zeros(self.dim)
        p[-1] = 1.0
        return p

    def factor(self, x):
        return 1.0 / x[-1]

    def params(self):
        return {"width": self.width, "height": self.height}


@dataclass(frozen=True)
class Minkowski(FinslerMetric):
    """Axis-scaled Euclidean norm sqrt(sum a_i y_i^2), constant in x."""

    scales: tuple = (1.0, 2.0)
    radius: float = 10.0
    name: str = "minkowski"
    kind = "minkowski"
    riemannian = True
    known = KnownConstants(0.0, 0.0, 0.0)

    def __post_init__(self):
        if any(a <= 0 for a in self.scales):
            raise StrongConvexityError("Minkowski scales must be positive")

    @property
    def dim(self):
        return len(self.scales)

    @property
    def domain(self):
        return Ball(self.radius)

    def F2(self, x, y):
        out = self.scales[0] * y[0] * y[0]
        for a, yi in zip(self.scales[1:], y[1:]):
            out = out + a * yi * yi
        return out

    def F(self, x, y):
        return ad.sqrt(self.F2(x, y))

    def bh_density(self, x):
        return math.sqrt(math.prod(self.scales))

    def dual_norm(self, x, xi):
        out = xi[0] * xi[0] / self.scales[0]
        for a, e in zip(self.scales[1:], xi[1:]):
            out = out + e * e / a
        return ad.sqrt(out)

    def reversibility_at(self, x):
        return 1.0

    def riemannian_matrix(self, X):
        X = np.asarray(X, float)
        return np.broadcast_to(np.diag(self.scales), X.shape[:-1] + (self.dim, self.dim))

    def params(self):
        return {"scales": list(self.scales)}


# Randers-type models --------------------------------------------------------

class RandersType(FinslerMetric):
    """F = sqrt(a_ij(x) y^i y^j) + b_i(x) y^i with |b|_a < 1."""

    def alpha_matrix(self, x):
        raise NotImplementedError

    def alpha_inverse(self, x):
        return ad.mat_inv(self.alpha_matrix(x))

    def one_form(self, x):
        raise NotImplementedError

    def alpha2(self, x, y):
        a = self.alpha_matrix(x)
        n = self.dim
        out = 0.0
        for i in range(n):
            for j in range(n):
                out = out + a[i][j] * y[i] * y[j]
        return out

    def F(self, x, y):
        return ad.sqrt(self.alpha2(x, y)) + ad.dot(self.one_form(x), y)

    def _dual_pairing(self, x, u, v):
        ainv = self.alpha_inverse(x)
        n = self.dim
        out = 0.0
        for i in range(n):
            for j in range(n):
                out = out + ainv[i][j] * u[i] * v[j]
        return out

    def b_norm2(self, x):
        b = self.one_form(x)
        return self._dual_pairing(x, b, b)

    def bh_density(self, x):
        b2 = self.b_norm2(x)
        return (1.0 - b2) ** ((self.dim + 1) / 2.0) * ad.sqrt(ad.mat_det(self.alpha_matrix(x)))

    def dual_norm(self, x, xi):
        b = self.one_form(x)
        b2 = self.b_norm2(x)
        xx = self._dual_pairing(x, xi, xi)
        xb = self._dual_pairing(x, xi, b)
        return (ad.sqrt((1.0 - b2) * xx + xb * xb) - xb) / (1.0 - b2)

    def reversibility_at(self, x):
        bn = np.sqrt(np.asarray(ad.value_of(self.b_norm2(x))))
        return (1.0 + bn) / (1.0 - bn)


@dataclass(frozen=True)
class Randers(RandersType):
    """alpha + beta with a constant one-form beta on a Euclidean or Poincare alpha."""

    b: tuple = (0.3, 0.0)
    base: str = "euclidean"
    radius: Optional[float] = None
    name: str = "randers"
    kind = "randers"

    def __post_init__(self):
        if self.base not in ("euclidean", "hyperbolic-disk"):
            raise UsageError(f"unknown Randers base {self.base!r}")
        if self.radius is None:
            object.__setattr__(self, "radius", 10.0 if self.base == "euclidean" else 0.99)
        bn = math.hypot(*self.b)
        if self.base == "euclidean" and bn >= 1.0:
            raise StrongConvexityError(
                f"Randers one-form norm {bn:.6g} >= 1: F is not positive/strongly convex")
        if self.base == "hyperbolic-disk":
            if not 0 < self.radius < 1:
                raise UsageError("hyperbolic base needs chart radius in (0, 1)")
            if bn / 2.0 >= 1.0:
                raise StrongConvexityError(
                    f"Randers one-form alpha-norm reaches {bn / 2:.6g} >= 1 near the origin")

    @property
    def dim(self):
        return len(self.b)

    @property
    def domain(self):
        return Ball(self.radius)

    def _conformal(self, x):
        if self.base == "euclidean":
            return 1.0
        return 2.0 / (1.0 - _norm2(x))

    def alpha_matrix(self, x):
        phi = self._conformal(x)
        phi2 = phi * phi
        n = self.dim
        return [[phi2 if i == j else 0.0 for j in range(n)] for i in range(n)]

    def alpha_inverse(self, x):
        phi = self._conformal(x)
        inv = 1.0 / (phi * phi)
        n = self.dim
        return [[inv if i == j else 0.0 for j in range(n)] for i in range(n)]

    def alpha2(self, x, y):
        phi = self._conformal(x)
        return phi * phi * _norm2(y)

    def F(self, x, y):
        return self._conformal(x) * ad.sqrt(_norm2(y)) + ad.dot(self.b, y)

    def one_form(self, x):
        return list(self.b)

    @property
    def known(self):
        if self.base == "euclidean":
            # x-independent norm: flat, zero S-curvature
            return KnownConstants(0.0, 0.0, 0.0)
        return None

    def params(self):
        return {"b": list(self.b), "base": self.base}


@dataclass(frozen=True)
class Funk(RandersType):
    """Funk metric of the unit ball: the indicatrix at x is the unit ball shifted by -x."""

    dim: int = 2
    radius: float = 0.99
    name: str = "funk"
    kind = "funk"

    def __post_init__(self):
        if not 0 < self.radius < 1:
            raise UsageError("Funk chart radius must lie in (0, 1)")

    @property
    def known(self):
        return KnownConstants(-0.25, -0.25, (self.dim + 1) / 2.0)

    @property
    def domain(self):
        return Ball(self.radius)

    def alpha_matrix(self, x):
        s = 1.0 - _norm2(x)
        inv2 = 1.0 / (s * s)
        n = self.dim
        return [[((s if i == j else 0.0) + x[i] * x[j]) * inv2 for j in range(n)] for i in range(n)]

    def alpha_inverse(self, x):
        s = 1.0 - _norm2(x)
        n = self.dim
        return [[s * ((1.0 if i == j else 0.0) - x[i] * x[j]) for j in range(n)] for i in range(n)]

    def one_form(self, x):
        s = 1.0 - _norm2(x)
        return [xi / s for xi in x]

    def F(self, x, y):
        s = 1.0 - _norm2(x)
        xy = ad.dot(x, y)
        return (ad.sqrt(s * _norm2(y) + xy * xy) + xy) / s


# roster and metric definition files --------------------------------------------

ROSTER = {
    "euclidean": "flat Euclidean norm |y|",
    "minkowski": "axis-scaled constant norm sqrt(sum a_i y_i^2)",
    "sphere": "unit round sphere, stereographic chart (K = 1)",
    "hyperbolic-disk": "hyperbolic space, Poincare ball chart (K = -1)",
    "hyperbolic-halfplane": "hyperbolic space, upper half-space chart (K = -1)",
    "randers": "alpha + beta, constant beta on Euclidean or Poincare alpha",
    "funk": "Funk metric of the unit ball (K = -1/4, S = (n+1)/2 F)",
}


def list_metrics():
    return dict(ROSTER)


def make_metric(kind: str, dim: int = 2, name: Optional[str] = None,
                chart_radius: Optional[float] = None, **params) -> FinslerMetric:
    """Construct a roster metric from its kind and parameters."""
    kw = {}
    if chart_radius is not None:
        kw["radius"] = float(chart_radius)
    if name is not None:
        kw["name"] = name
    if kind == "euclidean":
        return Euclidean(dim=dim, **kw)
    if kind == "sphere":
        return RoundSphere(dim=dim, **kw)
    if kind == "hyperbolic-disk":
        return HyperbolicDisk(dim=dim, **kw)
    if kind == "hyperbolic-halfplane":
        kw.pop("radius", None)
        extra = {k: float(params[k]) for k in ("width", "height") if k in params}
        return HyperbolicHalfPlane(dim=dim, **extra, **kw)
    if kind == "minkowski":
        scales = tuple(float(a) for a in params.get("scales", [1.0 + i for i in range(dim)]))
        if len(scales) != dim:
            raise UsageError("minkowski scales must have one entry per dimension")
        return Minkowski(scales=scales, **kw)
    if kind == "randers":
        b = params.get("b", [0.3] + [0.0] * (dim - 1))
        b = tuple(float(v) for v in b)
        if len(b) != dim:
            raise UsageError("randers b-vector must have one entry per dimension")
        base = params.get("base", "euclidean")
        return Randers(b=b, base=base, **kw)
    if kind == "funk":
        return Funk(dim=dim, **kw)
    raise UsageError(f"unknown metric kind {kind!r}; choose from {sorted(ROSTER)}")


def metric_from_config(cfg: dict) -> FinslerMetric:
    """Build a metric from a parsed definition mapping."""
    cfg = dict(cfg)
    try:
        kind = cfg.pop("kind")
    except KeyError:
        raise UsageError("metric definition needs a 'kind' field") from None
    dim = int(cfg.pop("dimension", cfg.pop("dim", 2)))
    params = dict(cfg.pop("parameters", None) or {})
    radius = cfg.pop("chart-radius", cfg.pop("chart_radius", None))
    name = cfg.pop("name", None)
    if cfg:
        raise UsageError(f"unknown metric fields: {sorted(cfg)}")
    if dim < 2:
        raise UsageError("dimension must be at least 2")
    return make_metric(kind, dim=dim, name=name, chart_radius=radius, **params)


def load_metric(path) -> FinslerMetric:
    with open(Path(path)) as fh:
        cfg = yaml.safe_load(fh)
    if not isinstance(cfg, dict):
        raise UsageError(f"{path}: metric definition must be a mapping")
    return metric_from_config(cfg.get("metric", cfg))
