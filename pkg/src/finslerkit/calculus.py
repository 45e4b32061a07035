"""Dual norm, Legendre transform, gradient, Hessian, divergence, Laplacian and S-curvature.

Functions are batched over leading axes.  Scalar fields are evaluated on
jets in x, so their first and second derivatives are exact; the distance
function from a point, which has no closed form in general, enters through
:class:`LocalJet2` records (value, differential and coordinate Hessian)
built along radial geodesics.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import autodiff as ad
from .errors import DegenerateGradientError, NonConvergenceError
from .metrics import FinslerMetric
from .sphere import SupResult, sup_on_sphere
from .tensors import bundle, components, f2_jet, metric_tensor, spray, spray_derivatives
from .volume import BusemannHausdorff, VolumeForm


# scalar fields -------------------------------------------------------------------

@dataclass(frozen=True)
class ScalarField:
    """A chart function f(x) evaluated on coordinate components (floats, arrays or jets)."""

    name: str
    func: Callable

    def __call__(self, xs):
        return self.func(xs)

    def jet(self, X, order: int = 2):
        X = np.asarray(X, float)
        xs = ad.seed(components(X), order)
        val = self.func(xs)
        if not isinstance(val, ad.Jet):
            val = ad.Jet.constant(np.broadcast_to(val, X.shape[:-1]), len(xs), order)
        return val

    def local(self, X) -> "LocalJet2":
        J = self.jet(X, 2)
        X = np.asarray(X, float)
        shape = X.shape[:-1]
        return LocalJet2(np.broadcast_to(J.value, shape), J.gradient(), J.hessian())


@dataclass
class LocalJet2:
    """Second-order data of a scalar field at points: f, df (..., n), d2f (..., n, n)."""

    value: np.ndarray
    grad: np.ndarray
    hess: np.ndarray


def coordinate(i: int) -> ScalarField:
    return ScalarField(f"x{i + 1}", lambda xs: xs[i] + 0.0 * xs[0])


def half_square(p) -> ScalarField:
    p = [float(c) for c in p]
    return ScalarField("half-square", lambda xs: 0.5 * sum((x - c) * (x - c) for x, c in zip(xs, p)))


def euclidean_distance(p) -> ScalarField:
    p = [float(c) for c in p]
    return ScalarField("euclidean-distance",
                       lambda xs: ad.sqrt(sum((x - c) * (x - c) for x, c in zip(xs, p))))


def log_distance(p) -> ScalarField:
    p = [float(c) for c in p]
    return ScalarField("log-distance",
                       lambda xs: 0.5 * ad.log(sum((x - c) * (x - c) for x, c in zip(xs, p))))


def poincare_distance() -> ScalarField:
    """Hyperbolic distance from the origin of the Poincare ball, 2 artanh |x|."""
    return ScalarField("poincare-distance",
                       lambda xs: 2.0 * ad.arctanh(ad.sqrt(sum(x * x for x in xs))))


def scalar_field(name: str, p=None, dim: int = 2) -> ScalarField:
    p = np.zeros(dim) if p is None else np.asarray(p, float)
    if name.startswith("x") and name[1:].isdigit():
        return coordinate(int(name[1:]) - 1)
    table = {"half-square": lambda: half_square(p), "euclidean-distance": lambda: euclidean_distance(p),
             "log-distance": lambda: log_distance(p), "poincare-distance": poincare_distance}
    if name not in table:
        from .errors import UsageError

        raise UsageError(f"unknown scalar field {name!r}; choose x<i>, {', '.join(table)}, "
                         "or radial-distance")
    return table[name]()


def _local(f, X) -> LocalJet2:
    if isinstance(f, LocalJet2):
        return f
    return f.local(X)


# dual norm and Legendre transform ----------------------------------------------------

def legendre(metric: FinslerMetric, X, Y):
    """xi_i = g_ij(x, y) y^j = 1/2 dF^2/dy^i; zero vector maps to zero."""
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    zero = ~np.any(Y != 0, axis=-1)
    Ysafe = np.where(zero[..., None], 1.0, Y)
    J, _ = f2_jet(metric, X, Ysafe, 1, wrt="y")
    xi = 0.5 * J.gradient()
    return np.where(zero[..., None], 0.0, xi)


def dual_norm(metric: FinslerMetric, X, xi, count: int = 2048) -> np.ndarray:
    """F*(x, xi) = sup xi(y) / F(x, y), by dense sampling plus ascent."""
    X = np.asarray(X, float)
    xi = np.asarray(xi, float)
    batch = np.broadcast_shapes(X.shape[:-1], xi.shape[:-1])
    Xb = np.broadcast_to(X, batch + X.shape[-1:])
    xib = np.broadcast_to(xi, batch + xi.shape[-1:])

    def ratio(U):
        Xe = np.broadcast_to(Xb[..., None, :], U.shape)
        return np.einsum("...i,...mi->...m", xib, U) / metric.norm(Xe, U)

    res = sup_on_sphere(ratio, X.shape[-1], batch_shape=batch, count=count)
    zero = ~np.any(xib != 0, axis=-1)
    return np.where(zero, 0.0, res.value)


def legendre_inverse(metric: FinslerMetric, X, xi, tol: float = 1e-10, maxiter: int = 30,
                     anchor=None):
    """Solve g(x, Y) Y = xi for Y by damped Newton.

    Newton minimises the strictly convex psi(Y) = F^2(Y)/2 - xi(Y), whose
    gradient is g_Y(Y, .) - xi and whose Hessian is g(x, Y).  The start is
    g(x, anchor)^{-1} xi with a fixed anchor vector (default: xi itself).
    """
    X = np.asarray(X, float)
    xi = np.asarray(xi, float)
    batch = np.broadcast_shapes(X.shape[:-1], xi.shape[:-1])
    n = X.shape[-1]
    X = np.broadcast_to(X, batch + (n,))
    xi = np.broadcast_to(xi, batch + (n,))
    zero = ~np.any(xi != 0, axis=-1)
    if np.all(zero):
        return np.zeros(batch + (n,))
    xi_s = np.where(zero[..., None], 1.0, xi)
    anchor = xi_s if anchor is None else np.broadcast_to(np.asarray(anchor, float), batch + (n,))
    g0 = metric_tensor(metric, X, anchor)
    Y = np.linalg.solve(g0, xi_s[..., None])[..., 0]
    scale = np.maximum(1.0, np.max(np.abs(xi_s), axis=-1))

    def state(Y):
        J, _ = f2_jet(metric, X, Y, 2, wrt="y")
        F2 = np.asarray(J.value)
        psi = 0.5 * F2 - np.sum(xi_s * Y, -1)
        return psi, 0.5 * J.gradient() - xi_s, 0.5 * J.hessian()

    psi, r, g = state(Y)
    res = np.max(np.abs(r), -1) / scale
    for _ in range(maxiter):
        if np.all(res < tol):
            break
        step = -np.linalg.solve(g, r[..., None])[..., 0]
        t = np.ones(batch)
        active = res >= tol
        for _ls in range(30):
            Yt = Y + t[..., None] * step
            ok = metric.norm(X, Yt) > 0
            psit, rt, gt = state(np.where(ok[..., None], Yt, Y))
            accept = ok & (psit <= psi + 1e-4 * t * np.sum(r * step, -1) + 1e-15 * np.abs(psi))
            accept |= ~active
            if np.all(accept):
                break
            t = np.where(accept, t, 0.5 * t)
        Y = np.where(active[..., None], Yt, Y)
        psi, r, g = state(Y)
        res = np.max(np.abs(r), -1) / scale
    res = np.where(zero, 0.0, res)
    if np.any(res >= tol):
        raise NonConvergenceError(
            f"Legendre inversion did not converge in {maxiter} iterations "
            f"(residual {float(np.max(res)):.3g})", float(np.max(res)))
    return np.where(zero[..., None], 0.0, Y)


# gradient and Hessian ------------------------------------------------------------------

@dataclass
class Gradient:
    vector: np.ndarray
    degenerate: np.ndarray


def gradient(metric: FinslerMetric, f, X) -> Gradient:
    """nabla f = l^{-1}(df); a vanishing differential yields zero with the degenerate flag."""
    X = np.asarray(X, float)
    loc = _local(f, X)
    df = loc.grad
    degenerate = ~np.any(df != 0, axis=-1)
    V = legendre_inverse(metric, X, df)
    return Gradient(V, degenerate)


def _require_gradient(metric, f, X):
    loc = _local(f, X)
    grad = gradient(metric, loc, X)
    if np.any(grad.degenerate):
        raise DegenerateGradientError("the differential vanishes: gradient-based quantities undefined")
    return loc, grad.vector


def hessian(metric: FinslerMetric, f, X, grad=None):
    """H_ij = d_i d_j f - Gamma^k_ij(x, nabla f) d_k f."""
    X = np.asarray(X, float)
    loc = _local(f, X)
    if grad is None:
        loc, grad = _require_gradient(metric, loc, X)
    tb = bundle(metric, X, grad)
    return loc.hess - np.einsum("...kij,...k->...ij", tb.Gamma, loc.grad)


def gradient_derivative(metric: FinslerMetric, f, X, grad=None):
    """D(nabla f)^i_j = d(nabla f)^i / dx^j by implicit differentiation.

    Differentiating 1/2 d_y F^2(x, V(x)) = df(x) gives
    g(x, V) DV = D^2 f - 1/2 [F^2]_{yx}(x, V).
    """
    X = np.asarray(X, float)
    loc = _local(f, X)
    if grad is None:
        loc, grad = _require_gradient(metric, loc, X)
    n = X.shape[-1]
    J, _ = f2_jet(metric, X, grad, 2)
    D2 = J.hessian()
    g = 0.5 * D2[..., n:, n:]
    F2yx = D2[..., n:, :n]
    return np.linalg.solve(g, loc.hess - 0.5 * F2yx)


def gradient_derivative_fd(metric: FinslerMetric, f: ScalarField, X, step: float = 1e-5):
    """Finite-difference oracle for D(nabla f), central differences with Richardson."""
    X = np.asarray(X, float)
    n = X.shape[-1]

    def central(h):
        cols = []
        for j in range(n):
            e = np.zeros(n)
            e[j] = h
            gp = gradient(metric, f, X + e).vector
            gm = gradient(metric, f, X - e).vector
            cols.append((gp - gm) / (2 * h))
        return np.stack(cols, axis=-1)

    return (4 * central(step / 2) - central(step)) / 3


def hessian_connection_form(metric: FinslerMetric, f, X, grad=None):
    """H(X, Y) = g_{nabla f}(nabla^{nabla f}_X nabla f, Y) in coordinates."""
    X = np.asarray(X, float)
    loc = _local(f, X)
    if grad is None:
        loc, grad = _require_gradient(metric, loc, X)
    DV = gradient_derivative(metric, loc, X, grad)
    tb = bundle(metric, X, grad)
    A = DV + tb.N                # A[k, i] = (nabla_{e_i} nabla f)^k
    return np.einsum("...jk,...ki->...ij", tb.g, A)


# divergence and Laplacian -------------------------------------------------------------------

def divergence(metric: FinslerMetric, field, X, dmu: Optional[VolumeForm] = None):
    """div X = (1/sigma) d_i (sigma X^i) for a jet-capable vector field ``field(xs) -> list``."""
    dmu = dmu or BusemannHausdorff()
    X = np.asarray(X, float)
    xs = ad.seed(components(X), 1)
    sigma = dmu.density(metric, xs)
    comps = field(xs)
    total = 0.0
    for i, c in enumerate(comps):
        prod = sigma * c
        if isinstance(prod, ad.Jet):
            total = total + prod.gradient()[..., i]
    return total / np.asarray(ad.value_of(sigma))


def laplacian(metric: FinslerMetric, f, X, dmu: Optional[VolumeForm] = None, grad=None):
    """Delta f = div(nabla f), with the gradient field differentiated implicitly."""
    dmu = dmu or BusemannHausdorff()
    X = np.asarray(X, float)
    loc = _local(f, X)
    if grad is None:
        loc, grad = _require_gradient(metric, loc, X)
    DV = gradient_derivative(metric, loc, X, grad)
    return np.trace(DV, axis1=-2, axis2=-1) + np.einsum(
        "...i,...i->...", grad, dmu.log_gradient(metric, X))


def laplacian_fd(metric: FinslerMetric, f: ScalarField, X, dmu: Optional[VolumeForm] = None,
                 step: float = 1e-5):
    """Oracle: divergence of the gradient field with finite differences."""
    dmu = dmu or BusemannHausdorff()
    X = np.asarray(X, float)
    DV = gradient_derivative_fd(metric, f, X, step)
    V = gradient(metric, f, X).vector
    return np.trace(DV, axis1=-2, axis2=-1) + np.einsum(
        "...i,...i->...", V, dmu.log_gradient(metric, X))


def trace_hessian(metric: FinslerMetric, f, X, grad=None):
    """tr_{nabla f} H(f) = g^{ij}(nabla f) H_ij."""
    X = np.asarray(X, float)
    loc = _local(f, X)
    if grad is None:
        loc, grad = _require_gradient(metric, loc, X)
    H = hessian(metric, loc, X, grad)
    ginv = np.linalg.inv(metric_tensor(metric, X, grad))
    return np.einsum("...ij,...ij->...", ginv, H)


def laplacian_trace_route(metric: FinslerMetric, f, X, dmu: Optional[VolumeForm] = None, grad=None):
    """Delta f = tr_{nabla f} H(f) - S(nabla f)."""
    X = np.asarray(X, float)
    loc = _local(f, X)
    if grad is None:
        loc, grad = _require_gradient(metric, loc, X)
    return trace_hessian(metric, loc, X, grad) - s_curvature(metric, X, grad, dmu)


# distortion and S-curvature --------------------------------------------------------------------

def distortion(metric: FinslerMetric, X, Y, dmu: Optional[VolumeForm] = None):
    """tau(x, y) = log( sqrt(det g(x, y)) / sigma(x) )."""
    dmu = dmu or BusemannHausdorff()
    g = metric_tensor(metric, X, Y)
    return 0.5 * np.log(np.linalg.det(g)) - np.log(dmu.at(metric, X))


def s_curvature(metric: FinslerMetric, X, Y, dmu: Optional[VolumeForm] = None):
    """S(y) = N^i_i(x, y) - y^i d_i log sigma(x)."""
    dmu = dmu or BusemannHausdorff()
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    sd = spray_derivatives(metric, X, Y, 1)
    Xb = np.broadcast_to(X, np.broadcast_shapes(X.shape, Y.shape))
    return np.trace(sd.Gy, axis1=-2, axis2=-1) - np.einsum(
        "...i,...i->...", Y, dmu.log_gradient(metric, Xb))


def geodesic_flow(metric: FinslerMetric, X, Y, s: float, substeps: int = 10):
    """(x, x') at time s along the geodesic with initial velocity y (s may be negative)."""
    x = np.asarray(X, float).copy()
    v = np.asarray(Y, float).copy()
    h = s / substeps
    for _ in range(substeps):
        k1x, k1v = v, -2 * spray(metric, x, v)
        k2x, k2v = v + h / 2 * k1v, -2 * spray(metric, x + h / 2 * k1x, v + h / 2 * k1v)
        k3x, k3v = v + h / 2 * k2v, -2 * spray(metric, x + h / 2 * k2x, v + h / 2 * k2v)
        k4x, k4v = v + h * k3v, -2 * spray(metric, x + h * k3x, v + h * k3v)
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
    return x, v


def s_curvature_geodesic(metric: FinslerMetric, X, Y, dmu: Optional[VolumeForm] = None,
                         delta: float = 1e-2):
    """S(y) = d/dt tau(gamma'(t)) at t = 0, by a five-point stencil along the geodesic."""
    dmu = dmu or BusemannHausdorff()
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    F = metric.norm(X, Y)
    U = Y / F[..., None]
    taus = [distortion(metric, *geodesic_flow(metric, X, U, k * delta), dmu) for k in (-2, -1, 1, 2)]
    return F * (taus[0] - 8 * taus[1] + 8 * taus[2] - taus[3]) / (12 * delta)


def s_norm(metric: FinslerMetric, X, dmu: Optional[VolumeForm] = None,
           count: int = 512) -> SupResult:
    """||S||(x) = sup_y S(y) / F(y) with the arg-max direction."""
    dmu = dmu or BusemannHausdorff()
    X = np.asarray(X, float)

    def ratio(U):
        Xe = np.broadcast_to(X[..., None, :], U.shape)
        return s_curvature(metric, Xe, U, dmu) / metric.norm(Xe, U)

    return sup_on_sphere(ratio, X.shape[-1], batch_shape=X.shape[:-1], count=count)
