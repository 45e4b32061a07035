"""Geodesics, parallel frames, Jacobi fields, polar volume densities and ball volumes.

Geodesics solve x'' + 2 G(x, x') = 0 with classical RK4.  The parallel frame
(E' = -N(x, T) E) and the linearised flow (variation fields) are carried in
the same RK4 state, so every quantity along a ray is fourth-order accurate
in the step.  Rays are batched: initial data of shape (B, n) produce arrays
with a leading ray axis.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import roots_legendre

from . import autodiff as ad
from .errors import ChartExitError, ConjugatePointError, DomainError
from .metrics import FinslerMetric
from .tensors import metric_tensor, spray, spray_derivatives
from .volume import BusemannHausdorff, VolumeForm

DEFAULT_STEP = 1e-3


# frames ------------------------------------------------------------------------

def g_inner(g, u, v):
    return np.einsum("...i,...ij,...j->...", u, g, v)


def orthonormal_frame(g, T):
    """g-orthonormal frame whose last column is T / |T|_g.

    Modified Gram-Schmidt over the coordinate vectors, at each stage taking
    the candidate with the largest remaining g-norm.
    """
    g = np.asarray(g, float)
    T = np.asarray(T, float)
    n = T.shape[-1]
    batch = T.shape[:-1]
    basis = [T / np.sqrt(g_inner(g, T, T))[..., None]]
    cands = np.broadcast_to(np.eye(n), batch + (n, n)).copy()  # candidates along axis -2
    used = np.zeros(batch + (n,), dtype=bool)
    chosen = []
    for _ in range(n - 1):
        b = basis[-1]
        proj = np.einsum("...ci,...ij,...j->...c", cands, g, b)
        cands = cands - proj[..., None] * b[..., None, :]
        norms = np.sqrt(np.maximum(np.einsum("...ci,...ij,...cj->...c", cands, g, cands), 0.0))
        norms = np.where(used, -np.inf, norms)
        k = np.argmax(norms, axis=-1)
        np.put_along_axis(used, k[..., None], True, axis=-1)
        vec = np.take_along_axis(cands, k[..., None, None], -2)[..., 0, :]
        nrm = np.take_along_axis(norms, k[..., None], -1)
        vec = vec / nrm
        basis.append(vec)
        chosen.append(vec)
    return np.stack(chosen + [basis[0]], axis=-1)


# integration -------------------------------------------------------------------

@dataclass
class GeodesicPath:
    """Unit-speed geodesic(s) sampled at t = 0, h, ..., length.

    ``x`` and ``v`` have shape (..., N+1, n).  ``frame`` has shape
    (..., N+1, n, n) with the frame vectors as columns and E_n = T.
    ``variations``/``variation_rates`` hold coordinate Jacobi fields J and
    dJ/dt with J(0) = 0 (shape (..., N+1, n, k)).
    """

    metric: FinslerMetric
    t: np.ndarray
    x: np.ndarray
    v: np.ndarray
    step: float
    frame: Optional[np.ndarray] = None
    variations: Optional[np.ndarray] = None
    variation_rates: Optional[np.ndarray] = None
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def length(self):
        return float(self.t[-1])

    @property
    def endpoint(self):
        return self.x[..., -1, :]

    def speed_defect(self):
        return np.max(np.abs(self.metric.norm(self.x, self.v) - 1.0))

    def frame_defect(self):
        if self.frame is None:
            raise ValueError("path carries no frame")
        g = metric_tensor(self.metric, self.x, self.v)
        G = np.einsum("...ia,...ij,...jb->...ab", self.frame, g, self.frame)
        return np.max(np.abs(G - np.eye(self.x.shape[-1])))

    def ray(self, i):
        """The i-th ray of a batched path."""
        pick = lambda a: None if a is None else a[i]
        return GeodesicPath(self.metric, self.t, self.x[i], self.v[i], self.step,
                            pick(self.frame), pick(self.variations), pick(self.variation_rates))

    def to_csv(self, fh, frames: bool = False):
        """Write t, x_i, v_i (and optionally E_a^i) for a single ray."""
        if self.x.ndim != 2:
            raise ValueError("CSV dump needs a single ray")
        n = self.x.shape[-1]
        cols = ["t"] + [f"x{i + 1}" for i in range(n)] + [f"v{i + 1}" for i in range(n)]
        data = [self.t[:, None], self.x, self.v]
        if frames:
            if self.frame is None:
                raise ValueError("path carries no frame")
            cols += [f"E{a + 1}_{i + 1}" for a in range(n) for i in range(n)]
            data.append(np.swapaxes(self.frame, -1, -2).reshape(len(self.t), n * n))
        fh.write(",".join(cols) + "\n")
        for row in np.hstack(data):
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def _unit(metric, x, y):
    f = metric.norm(x, y)
    if np.any(~(f > 0)):
        raise DomainError("initial vector must have positive length")
    return y / f[..., None]


def _shoot(metric, x0, v0, length, h, E0=None, Q0=None, P0=None):
    x0 = np.asarray(x0, float)
    v0 = np.asarray(v0, float)
    if length <= 0:
        raise ValueError("length must be positive")
    nsteps = max(1, int(math.ceil(length / h - 1e-9)))
    h = length / nsteps
    if not np.all(metric.contains(x0)):
        raise ChartExitError(f"start point outside the chart of {metric.name}", 0.0)
    linear = E0 is not None or Q0 is not None
    if Q0 is not None and P0 is None:
        P0 = np.zeros_like(Q0)

    def rhs(s):
        x, v, E, P, Q = s
        if not linear:
            return v, -2.0 * spray(metric, x, v), None, None, None
        sd = spray_derivatives(metric, x, v, 1)
        dE = None if E is None else -sd.Gy @ E
        dQ = None if Q is None else -2.0 * (sd.Gx @ P + sd.Gy @ Q)
        return v, -2.0 * sd.G, dE, Q, dQ

    def axpy(s, k, a):
        return tuple(None if si is None else si + a * ki for si, ki in zip(s, k))

    state = (x0, v0, E0, P0, Q0)
    hist = [state]
    for step in range(nsteps):
        k1 = rhs(state)
        k2 = rhs(axpy(state, k1, h / 2))
        k3 = rhs(axpy(state, k2, h / 2))
        k4 = rhs(axpy(state, k3, h))
        state = tuple(None if s is None else s + h / 6 * (a + 2 * b + 2 * c + d)
                      for s, a, b, c, d in zip(state, k1, k2, k3, k4))
        x = state[0]
        if not (np.all(np.isfinite(x)) and np.all(metric.contains(x))):
            te = (step + 1) * h
            raise ChartExitError(f"geodesic leaves the chart of {metric.name} at t = {te:.6g}", te)
        hist.append(state)
    t = np.arange(nsteps + 1) * h
    x = np.stack([s[0] for s in hist], axis=-2)
    v = np.stack([s[1] for s in hist], axis=-2)
    E = None if E0 is None else np.stack([s[2] for s in hist], axis=-3)
    P = None if Q0 is None else np.stack([s[3] for s in hist], axis=-3)
    Q = None if Q0 is None else np.stack([s[4] for s in hist], axis=-3)
    return GeodesicPath(metric, t, x, v, h, E, P, Q)


def integrate_geodesic(metric: FinslerMetric, x0, y0, length: float, h: float = DEFAULT_STEP,
                       frame: bool = False, jacobi: bool = False) -> GeodesicPath:
    """Unit-speed geodesic from x0 in direction y0 (normalised to F = 1).

    With ``frame`` the parallel frame is transported along; with ``jacobi``
    the n-1 Jacobi fields J_a(0) = 0, J_a'(0) = E_a(0) are carried too.
    """
    x0 = np.asarray(x0, float)
    T0 = _unit(metric, x0, np.asarray(y0, float))
    E0 = Q0 = None
    if frame or jacobi:
        E0 = orthonormal_frame(metric_tensor(metric, x0, T0), T0)
    if jacobi:
        Q0 = E0[..., :-1].copy()
    return _shoot(metric, x0, T0, length, h, E0=E0, Q0=Q0)


def parallel_frame(path: GeodesicPath) -> GeodesicPath:
    """The same geodesic with a transported g_T-orthonormal frame (E_n = T)."""
    if path.frame is not None:
        return path
    return integrate_geodesic(path.metric, path.x[..., 0, :], path.v[..., 0, :],
                              path.length, path.step, frame=True,
                              jacobi=path.variations is not None)


def exp_map(metric: FinslerMetric, p, v, h: float = DEFAULT_STEP):
    """exp_p(v): endpoint of the geodesic with initial velocity v at time 1."""
    v = np.asarray(v, float)
    L = metric.norm(np.broadcast_to(p, v.shape), v)
    if np.any(L == 0):
        return np.broadcast_to(np.asarray(p, float), v.shape).copy()
    return integrate_geodesic(metric, p, v, float(np.max(L)), h).endpoint if np.ndim(L) == 0 \
        else np.stack([integrate_geodesic(metric, p, vi, float(li), h).endpoint for vi, li in zip(v, L)])


# quantities at nodes and midpoints ---------------------------------------------------

def _midpoints(path: GeodesicPath):
    """Hermite (fourth-order) interpolation of x, v and the frame at half steps."""
    h = path.step
    x, v = path.x, path.v
    x0, x1, v0, v1 = x[..., :-1, :], x[..., 1:, :], v[..., :-1, :], v[..., 1:, :]
    xm = 0.5 * (x0 + x1) + h / 8 * (v0 - v1)
    vm = 1.5 / h * (x1 - x0) - 0.25 * (v0 + v1)
    Em = None
    if path.frame is not None:
        sd = spray_derivatives(path.metric, x, v, 1)
        dE = -sd.Gy @ path.frame
        E0, E1 = path.frame[..., :-1, :, :], path.frame[..., 1:, :, :]
        Em = 0.5 * (E0 + E1) + h / 8 * (dE[..., :-1, :, :] - dE[..., 1:, :, :])
    return xm, vm, Em


def frame_curvature(path: GeodesicPath, midpoints: bool = False):
    """R_ab = g_T(E_a, R(E_b)) at the nodes (and optionally half steps)."""
    from .curvature import riemann_operator_batch

    key = ("Rf", midpoints)
    if key in path._cache:
        return path._cache[key]
    path = parallel_frame(path) if path.frame is None else path
    x, v, E = path.x, path.v, path.frame
    if midpoints:
        xm, vm, Em = _midpoints(path)
        x = np.concatenate([x, xm], axis=-2)
        v = np.concatenate([v, vm], axis=-2)
        E = np.concatenate([E, Em], axis=-3)
    R = riemann_operator_batch(path.metric, x, v)
    g = metric_tensor(path.metric, x, v)
    Rf = np.einsum("...ia,...ij,...jk,...kb->...ab", E, g, R, E)
    Rf = 0.5 * (Rf + np.swapaxes(Rf, -1, -2))
    path._cache[key] = Rf
    return Rf


@dataclass
class JacobiSolution:
    """Jacobi field along a path, in parallel-frame components."""

    path: GeodesicPath
    a: np.ndarray      # (..., N+1, n)  J = E a
    adot: np.ndarray   # (..., N+1, n)  nabla_T J = E adot

    @property
    def J(self):
        return np.einsum("...ia,...a->...i", self.path.frame, self.a)

    def norm(self):
        return np.linalg.norm(self.a, axis=-1)

    def residual(self):
        """max |a'' + R a| at interior nodes, a'' by a five-point stencil."""
        a = self.a
        h = self.path.step
        d2 = (-a[..., 4:, :] + 16 * a[..., 3:-1, :] - 30 * a[..., 2:-2, :]
              + 16 * a[..., 1:-3, :] - a[..., :-4, :]) / (12 * h * h)
        Rf = frame_curvature(self.path)[..., 2:-2, :, :]
        res = d2 + np.einsum("...ab,...b->...a", Rf, a[..., 2:-2, :])
        return float(np.max(np.abs(res)))


def jacobi_integrate(path: GeodesicPath, J0, J0dot) -> JacobiSolution:
    """Integrate a'' = -R_frame a with RK4 (frame components of J and nabla_T J)."""
    path = parallel_frame(path)
    N = len(path.t) - 1
    R_all = frame_curvature(path, midpoints=True)
    Rn = R_all[..., : N + 1, :, :]
    Rm = R_all[..., N + 1:, :, :]
    h = path.step
    a = np.asarray(J0, float) * np.ones(path.x.shape[:-2] + (path.x.shape[-1],))
    b = np.asarray(J0dot, float) * np.ones_like(a)
    A, B = [a], [b]
    mv = lambda R, u: np.einsum("...ab,...b->...a", R, u)
    for k in range(N):
        R0, R1, R2 = Rn[..., k, :, :], Rm[..., k, :, :], Rn[..., k + 1, :, :]
        k1a, k1b = b, -mv(R0, a)
        k2a, k2b = b + h / 2 * k1b, -mv(R1, a + h / 2 * k1a)
        k3a, k3b = b + h / 2 * k2b, -mv(R1, a + h / 2 * k2a)
        k4a, k4b = b + h * k3b, -mv(R2, a + h * k3a)
        a = a + h / 6 * (k1a + 2 * k2a + 2 * k3a + k4a)
        b = b + h / 6 * (k1b + 2 * k2b + 2 * k3b + k4b)
        A.append(a)
        B.append(b)
    return JacobiSolution(path, np.stack(A, axis=-2), np.stack(B, axis=-2))


def index_form(path: GeodesicPath, X, Y, Xdot=None, Ydot=None) -> float:
    """I(X, Y) = int g_T(nabla X, nabla Y) - g_T(R(X), Y) dt for frame-component fields.

    X, Y have shape (N+1, n) (components in the parallel frame); their
    derivatives default to second-order finite differences.
    """
    from scipy.integrate import simpson

    path = parallel_frame(path)
    h = path.step
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    Xdot = np.gradient(X, h, axis=-2, edge_order=2) if Xdot is None else np.asarray(Xdot, float)
    Ydot = np.gradient(Y, h, axis=-2, edge_order=2) if Ydot is None else np.asarray(Ydot, float)
    Rf = frame_curvature(path)
    integrand = np.sum(Xdot * Ydot, -1) - np.einsum("...a,...ab,...b->...", X, Rf, Y)
    return simpson(integrand, x=path.t, axis=-1)


# polar coordinates ---------------------------------------------------------------

@dataclass
class DirectionGrid:
    """Parametrised directions on the Euclidean unit sphere with quadrature weights.

    ``theta`` holds the parameters (angle for n = 2; face, a, b for the
    cubed sphere in n = 3); ``weights`` integrate functions of theta.
    """

    theta: np.ndarray
    weights: np.ndarray
    dim: int

    def unit_vectors(self, order: int = 0):
        """u(theta), with jets in the theta-parameters when order > 0."""
        if self.dim == 2:
            th = self.theta if order == 0 else ad.seed([self.theta], order)[0]
            return [ad.cos(th), ad.sin(th)]
        if self.dim == 3:
            face = self.theta[:, 0].astype(int)
            a, b = self.theta[:, 1], self.theta[:, 2]
            if order:
                a, b = ad.seed([a, b], order)
            ta, tb = ad_tan(a), ad_tan(b)
            one = np.ones(len(face))
            sign = np.where(face % 2 == 0, 1.0, -1.0)
            axis = face // 2
            # the face normal is axis; the two tangent coordinates follow cyclically
            comps = {0: (0, 1, 2), 1: (1, 2, 0), 2: (2, 0, 1)}
            out = [0.0, 0.0, 0.0]
            for ax in range(3):
                sel = axis == ax
                if not np.any(sel):
                    continue
                i0, i1, i2 = comps[ax]
                mask = sel.astype(float)
                out[i0] = out[i0] + mask * sign * one
                out[i1] = out[i1] + mask * ta
                out[i2] = out[i2] + mask * tb
            r = ad.sqrt(out[0] * out[0] + out[1] * out[1] + out[2] * out[2])
            return [c / r for c in out]
        raise ValueError("direction grids are implemented for n = 2, 3")


def ad_tan(a):
    return ad.sin(a) / ad.cos(a)


def direction_grid(n: int, count: int) -> DirectionGrid:
    """n = 2: ``count`` equispaced angles (trapezoid rule, spectrally accurate).

    n = 3: cubed sphere with ``count`` Gauss-Legendre nodes per face side.
    """
    if n == 2:
        th = 2 * np.pi * (np.arange(count) + 0.5) / count
        return DirectionGrid(th, np.full(count, 2 * np.pi / count), 2)
    if n == 3:
        nodes, w = roots_legendre(count)
        a = nodes * np.pi / 4
        wa = w * np.pi / 4
        A, B = np.meshgrid(a, a, indexing="ij")
        W = np.outer(wa, wa)
        theta = np.concatenate([np.stack([np.full(A.size, f), A.ravel(), B.ravel()], axis=-1)
                                for f in range(6)])
        return DirectionGrid(theta, np.tile(W.ravel(), 6), 3)
    raise ValueError("direction grids are implemented for n = 2, 3")


def indicatrix_directions(metric: FinslerMetric, p, grid: DirectionGrid):
    """Unit vectors v(theta) = u / F(p, u) and dv/dtheta (shape (m, n, n-1))."""
    p = np.asarray(p, float)
    u = grid.unit_vectors(order=1)
    m = len(grid.theta)
    xs = [np.full(m, pi) for pi in p]
    f = metric.F(xs, u)
    v = [ui / f for ui in u]
    vals = np.stack([np.broadcast_to(vi.value, (m,)) for vi in v], axis=-1)
    dv = np.stack([vi.gradient() for vi in v], axis=-2)
    return vals, dv


@dataclass
class PolarDensity:
    """sigma(r, theta) on a radius grid, for each direction of a grid.

    ``sigma`` and ``dsigma`` (its r-derivative) have shape (m, N+1);
    ``log_derivative`` = d/dr log sigma (nan at r = 0).
    """

    p: np.ndarray
    grid: DirectionGrid
    r: np.ndarray
    sigma: np.ndarray
    dsigma: np.ndarray
    log_derivative: np.ndarray
    path: GeodesicPath
    volume_form: str

    def total(self):
        """theta-integrated density and its r-derivative."""
        w = self.grid.weights
        return w @ self.sigma, w @ self.dsigma


def polar_density(metric: FinslerMetric, p, theta, rmax: float, h: float = DEFAULT_STEP,
                  dmu: Optional[VolumeForm] = None) -> PolarDensity:
    """Polar volume density along the rays exp_p(r v(theta)), 0 <= r <= rmax.

    ``theta`` is a :class:`DirectionGrid` or an array of angles (n = 2).
    """
    dmu = dmu or BusemannHausdorff()
    p = np.asarray(p, float)
    n = p.shape[-1]
    if not isinstance(theta, DirectionGrid):
        th = np.atleast_1d(np.asarray(theta, float))
        if n != 2:
            raise ValueError("pass a DirectionGrid for n > 2")
        theta = DirectionGrid(th, np.full(len(th), 2 * np.pi / max(len(th), 1)), 2)
    v0, dv = indicatrix_directions(metric, p, theta)
    m = len(v0)
    X0 = np.broadcast_to(p, (m, n)).copy()
    path = _shoot(metric, X0, v0, rmax, h, Q0=dv)
    T = path.v
    J, Jd = path.variations, path.variation_rates
    M = np.concatenate([T[..., None], J], axis=-1)
    sd = spray_derivatives(metric, path.x, T, 1)
    Md = np.concatenate([-2.0 * sd.G[..., None], Jd], axis=-1)
    det = np.linalg.det(M)
    sig_mu = dmu.at(metric, path.x)
    dlog_mu = np.einsum("...i,...i->...", dmu.log_gradient(metric, path.x), T)
    with np.errstate(divide="ignore", invalid="ignore"):
        trace = np.trace(np.linalg.solve(M[:, 1:], Md[:, 1:]), axis1=-2, axis2=-1)
    logd = np.full(det.shape, np.nan)
    logd[:, 1:] = trace + dlog_mu[:, 1:]
    # conjugate points: the determinant must keep the sign it has just after r = 0
    s0 = np.sign(det[:, 1:2])
    bad = np.sign(det[:, 1:]) != s0
    if np.any(bad):
        k = int(np.argmax(np.any(bad, axis=0))) + 1
        raise ConjugatePointError(
            f"Jacobi determinant changes sign near r = {path.t[k]:.6g}", float(path.t[k]))
    sigma = sig_mu * np.abs(det)
    dsigma = np.zeros_like(sigma)
    dsigma[:, 1:] = sigma[:, 1:] * logd[:, 1:]
    # at r = 0, sigma ~ r^{n-1}: its slope is only nonzero for n = 2
    if n == 2:
        dsigma[:, 0] = sig_mu[:, 0] * np.abs(np.linalg.det(np.concatenate(
            [T[:, 0, :, None], Jd[:, 0]], axis=-1)))
    return PolarDensity(p, theta, path.t, sigma, dsigma, logd, path, dmu.name)


@dataclass
class BallVolume:
    radius: float
    value: float
    error: float
    radii: np.ndarray
    volumes: np.ndarray
    volume_form: str

    def at(self, r):
        return np.interp(r, self.radii, self.volumes)


def _radial_integral(r, f, df):
    spline = CubicHermiteSpline(r, f, df).antiderivative()
    return spline


def ball_volumes(metric: FinslerMetric, p, radii, ntheta: int = 64, h: float = DEFAULT_STEP,
                 dmu: Optional[VolumeForm] = None, polar: Optional[PolarDensity] = None):
    """vol(B_p(r)) at each requested radius, with an error estimate.

    The radial integral uses the cubic Hermite interpolant of the
    theta-integrated density (whose r-derivative is known exactly); the
    error estimate compares against half the direction grid and half the
    radial nodes.
    """
    radii = np.atleast_1d(np.asarray(radii, float))
    n = np.size(p)
    if polar is None:
        polar = polar_density(metric, p, direction_grid(n, ntheta), float(radii.max()), h, dmu)
    r = polar.r
    f, df = polar.total()
    V = _radial_integral(r, f, df)(radii)
    # error: coarser direction grid and every other radial node
    if n == 2 and len(polar.grid.weights) % 2 == 0:
        w2 = 2 * polar.grid.weights[::2]
        fc, dfc = w2 @ polar.sigma[::2], w2 @ polar.dsigma[::2]
        e_theta = np.abs(_radial_integral(r, fc, dfc)(radii) - V)
    else:
        e_theta = np.zeros_like(V)
    if len(r) >= 5:
        Vr = _radial_integral(r[::2], f[::2], df[::2])(radii)
        e_r = np.abs(Vr - V) / 15.0
    else:
        e_r = np.zeros_like(V)
    return V, e_theta + e_r, polar


def ball_volume(metric: FinslerMetric, p, R: float, ntheta: int = 64, h: float = DEFAULT_STEP,
                dmu: Optional[VolumeForm] = None) -> BallVolume:
    dmu = dmu or BusemannHausdorff()
    V, err, polar = ball_volumes(metric, p, [R], ntheta, h, dmu)
    f, df = polar.total()
    cum = _radial_integral(polar.r, f, df)(polar.r)
    return BallVolume(float(R), float(V[0]), float(err[0]), polar.r, cum, dmu.name)


# the distance function along radial geodesics ---------------------------------------------

@dataclass
class RadialField:
    """Second-order data of r = d(p, .) at the nodes of radial geodesics from p.

    Along a ray r(gamma(t)) = t and grad r = T.  The differential is
    dr = g_T(T, .) and its coordinate derivative follows from
    dT = [T', J_1', ...] [T, J_1, ...]^{-1}, the J_a being Jacobi fields
    through unit-speed geodesics from p.
    """

    path: GeodesicPath

    @property
    def metric(self):
        return self.path.metric

    def dT(self):
        """Coordinate derivative of the unit radial field, (..., N+1, n, n); nan at r = 0."""
        if "dT" in self.path._cache:
            return self.path._cache["dT"]
        p = self.path
        M = np.concatenate([p.v[..., None], p.variations], axis=-1)
        sd = spray_derivatives(p.metric, p.x, p.v, 1)
        Md = np.concatenate([-2.0 * sd.G[..., None], p.variation_rates], axis=-1)
        out = np.full(M.shape, np.nan)
        # dT M = Md  <=>  M^T dT^T = Md^T
        out[..., 1:, :, :] = np.swapaxes(np.linalg.solve(
            np.swapaxes(M[..., 1:, :, :], -1, -2), np.swapaxes(Md[..., 1:, :, :], -1, -2)), -1, -2)
        self.path._cache["dT"] = out
        return out

    def local(self, raw: bool = False):
        """LocalJet2 of r at every node (value t, dr, coordinate Hessian of r)."""
        from .calculus import LocalJet2
        from .tensors import f2_jet

        p = self.path
        n = p.x.shape[-1]
        J, _ = f2_jet(p.metric, p.x, p.v, 2)
        D2 = J.hessian()
        g = 0.5 * D2[..., n:, n:]
        dr = np.einsum("...ij,...j->...i", g, p.v)
        hess = 0.5 * D2[..., n:, :n] + g @ self.dT()
        if not raw:
            hess = 0.5 * (hess + np.swapaxes(hess, -1, -2))
        value = np.broadcast_to(p.t, p.x.shape[:-1])
        return LocalJet2(value, dr, hess)


def radial_field(metric: FinslerMetric, p, directions, rmax: float,
                 h: float = DEFAULT_STEP) -> RadialField:
    """Shoot unit-speed rays from p in the given directions (any lengths) up to rmax."""
    p = np.asarray(p, float)
    directions = np.atleast_2d(np.asarray(directions, float))
    X0 = np.broadcast_to(p, directions.shape).copy()
    return RadialField(integrate_geodesic(metric, X0, directions, rmax, h, frame=True, jacobi=True))
