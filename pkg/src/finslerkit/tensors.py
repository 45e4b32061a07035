"""Fundamental tensor, Cartan tensor, Chern connection and geodesic spray.

All batched helpers take points and vectors as arrays with the coordinate axis
last and return tensors with their index axes last, so a (B, n) batch of states
produces (B, n, n) fundamental tensors and so on.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from . import autodiff as ad
from .errors import DomainError, StrongConvexityError
from .metrics import FinslerMetric
from .sphere import sup_on_sphere

PIVOT_THRESHOLD = 1e-12


@dataclass(frozen=True)
class PointState:
    """A chart point x with a nonzero reference vector y."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "y", np.asarray(self.y, dtype=float))
        if self.x.shape != self.y.shape:
            raise ValueError("x and y must have the same shape")

    def check(self, metric: FinslerMetric):
        if not np.all(metric.contains(self.x)):
            raise DomainError(f"point {self.x} is outside the chart of {metric.name}")
        if not np.all(np.any(self.y != 0, axis=-1)):
            raise DomainError("reference vector y must be nonzero")
        return self


@dataclass
class TensorBundle:
    g: np.ndarray
    g_inv: np.ndarray
    C: np.ndarray
    gamma: np.ndarray
    N: np.ndarray
    Gamma: np.ndarray
    G: np.ndarray
    dg_dx: np.ndarray


def components(X):
    X = np.asarray(X, dtype=float)
    return [X[..., i] for i in range(X.shape[-1])]


def f2_jet(metric: FinslerMetric, X, Y, order: int, wrt: str = "xy"):
    """Jet of F^2 at (X, Y) in the x- and y-variables (or y only).

    Returns the jet and the seeded variables, x-variables first.
    """
    xs, ys = components(X), components(Y)
    if wrt == "y":
        seeds = ad.seed(ys, order)
        return metric.F2(xs, seeds), seeds
    seeds = ad.seed(xs + ys, order)
    n = len(xs)
    return metric.F2(seeds[:n], seeds[n:]), seeds


def pivoted_cholesky_min_pivot(g):
    """Smallest pivot of a diagonally pivoted Cholesky factorisation, batched."""
    a = np.array(g, dtype=float, copy=True)
    n = a.shape[-1]
    batch = a.shape[:-2]
    a = a.reshape((-1, n, n))
    minpiv = np.full(a.shape[0], np.inf)
    active = np.ones((a.shape[0], n), dtype=bool)
    for _ in range(n):
        diag = np.where(active, np.diagonal(a, axis1=1, axis2=2), -np.inf)
        k = np.argmax(diag, axis=1)
        piv = diag[np.arange(a.shape[0]), k]
        minpiv = np.minimum(minpiv, piv)
        safe = np.where(piv > 0, piv, 1.0)
        col = a[np.arange(a.shape[0]), :, k] / np.sqrt(safe)[:, None]
        col = np.where(active, col, 0.0)
        a = a - col[:, :, None] * col[:, None, :]
        active[np.arange(a.shape[0]), k] = False
    return minpiv.reshape(batch)


def check_positive_definite(g, X=None, Y=None):
    piv = pivoted_cholesky_min_pivot(g)
    bad = ~(piv > PIVOT_THRESHOLD)
    if np.any(bad):
        where = ""
        if X is not None:
            i = np.unravel_index(np.argmax(bad), bad.shape) if bad.ndim else ()
            xb = np.asarray(X)[i] if np.ndim(X) > 1 else X
            yb = np.asarray(Y)[i] if np.ndim(Y) > 1 else Y
            where = f" at x={np.round(xb, 12).tolist()}, y={np.round(yb, 12).tolist()}"
            raise StrongConvexityError("fundamental tensor is not positive definite" + where, xb, yb)
        raise StrongConvexityError("fundamental tensor is not positive definite")


def metric_tensor(metric: FinslerMetric, X, Y, check: bool = True):
    """g_ij = 1/2 d^2 F^2 / dy^i dy^j, batched."""
    J, _ = f2_jet(metric, X, Y, 2, wrt="y")
    g = 0.5 * J.hessian()
    if check:
        check_positive_definite(g, X, Y)
    return g


def fundamental_tensor(metric: FinslerMetric, s: PointState):
    s.check(metric)
    return metric_tensor(metric, s.x, s.y)


def cartan_tensor(metric: FinslerMetric, s: PointState):
    """C_ijk = 1/4 d^3 F^2 / dy^i dy^j dy^k."""
    s.check(metric)
    J, _ = f2_jet(metric, s.x, s.y, 3, wrt="y")
    return 0.25 * J.derivative_tensor(3)


def bundle(metric: FinslerMetric, X, Y, check: bool = True) -> TensorBundle:
    """All connection data at a batch of states."""
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    n = X.shape[-1]
    J, _ = f2_jet(metric, X, Y, 3)
    D2 = J.derivative_tensor(2)
    D3 = J.derivative_tensor(3)
    g = 0.5 * D2[..., n:, n:]
    if check:
        check_positive_definite(g, X, Y)
    ginv = np.linalg.inv(g)
    C = 0.25 * D3[..., n:, n:, n:]
    dg = 0.5 * D3[..., :n, n:, n:]  # dg[l, i, j] = d g_ij / dx^l
    # gamma^k_ij = 1/2 g^km (d_i g_mj + d_j g_im - d_m g_ij)
    low = (np.einsum("...imj->...mij", dg)
           + np.einsum("...jim->...mij", dg)
           - np.einsum("...mij->...mij", dg))
    gamma = 0.5 * np.einsum("...km,...mij->...kij", ginv, low)
    G = 0.5 * np.einsum("...ijk,...j,...k->...i", gamma, Y, Y)
    Cup = np.einsum("...il,...ljk->...ijk", ginv, C)
    N = (np.einsum("...ijk,...k->...ij", gamma, Y)
         - np.einsum("...ijk,...krs,...r,...s->...ij", Cup, gamma, Y, Y))
    corr = (np.einsum("...ijs,...sk->...ijk", C, N)
            + np.einsum("...kis,...sj->...ijk", C, N)
            - np.einsum("...jks,...si->...ijk", C, N))
    Gamma = gamma - np.einsum("...li,...ijk->...ljk", ginv, corr)
    return TensorBundle(g=g, g_inv=ginv, C=C, gamma=gamma, N=N, Gamma=Gamma, G=G, dg_dx=dg)


def connection_bundle(metric: FinslerMetric, s: PointState) -> TensorBundle:
    s.check(metric)
    return bundle(metric, s.x, s.y)


def almost_compatibility_residual(tb: TensorBundle):
    """dx-part of dg_ij - g_kj w^k_i - g_ik w^k_j - 2 C_ijk (dy^k + N^k_l dx^l)."""
    res = (np.einsum("...lij->...ijl", tb.dg_dx)
           - np.einsum("...kj,...kil->...ijl", tb.g, tb.Gamma)
           - np.einsum("...ik,...kjl->...ijl", tb.g, tb.Gamma)
           - 2.0 * np.einsum("...ijk,...kl->...ijl", tb.C, tb.N))
    return res


# geodesic spray ----------------------------------------------------------------

def spray_jet(metric: FinslerMetric, X, Y, order: int):
    """Jets (in the 2n variables x, y) of the spray coefficients G^i.

    G^i = 1/4 g^il ( [F^2]_{x^k y^l} y^k - [F^2]_{x^l} ).
    """
    n = np.shape(X)[-1]
    J, seeds = f2_jet(metric, X, Y, order + 2)
    ys = [s.truncate(order) for s in seeds[n:]]
    Jx = [J.diff(k) for k in range(n)]
    Jy = [J.diff(n + k) for k in range(n)]
    g = [[0.5 * Jy[i].diff(n + j) for j in range(n)] for i in range(n)]
    A = []
    for l in range(n):
        a = -Jx[l].truncate(order)
        for k in range(n):
            a = a + Jx[k].diff(n + l) * ys[k]
        A.append(a)
    ginv = ad.mat_inv(g)
    G = []
    for i in range(n):
        gi = ginv[i][0] * A[0]
        for l in range(1, n):
            gi = gi + ginv[i][l] * A[l]
        G.append(0.25 * gi)
    return G


def spray(metric: FinslerMetric, X, Y):
    """Spray coefficients G^i(x, y), shape (..., n)."""
    G = spray_jet(metric, X, Y, 0)
    return np.stack([np.asarray(Gi.value) for Gi in G], axis=-1)


@dataclass
class SprayDerivatives:
    G: np.ndarray            # (..., n)
    Gx: np.ndarray           # [i, k] = dG^i/dx^k
    Gy: np.ndarray           # [i, k] = dG^i/dy^k  (nonlinear connection N^i_k)
    Gxy: np.ndarray = None   # [i, j, k] = d2G^i/dx^j dy^k
    Gyy: np.ndarray = None   # [i, j, k] = d2G^i/dy^j dy^k


def spray_derivatives(metric: FinslerMetric, X, Y, order: int = 1) -> SprayDerivatives:
    X = np.asarray(X, float)
    Y = np.asarray(Y, float)
    n = X.shape[-1]
    G = spray_jet(metric, X, Y, order)
    val = np.stack([np.broadcast_to(Gi.value, np.broadcast_shapes(X.shape[:-1], Y.shape[:-1]))
                    for Gi in G], axis=-1)
    D1 = np.stack([Gi.gradient() for Gi in G], axis=-2)
    out = SprayDerivatives(G=val, Gx=D1[..., :n], Gy=D1[..., n:])
    if order >= 2:
        D2 = np.stack([Gi.hessian() for Gi in G], axis=-3)
        out.Gxy = D2[..., :n, n:]
        out.Gyy = D2[..., n:, n:]
    return out


# indicatrix quantities -----------------------------------------------------------

def reversibility(metric: FinslerMetric, x, tol: float = 1e-9):
    """sup over directions of F(x, -y) / F(x, y) at the chart point x.

    Returns (value, tolerance).
    """
    x = np.asarray(x, float)
    n = metric.dim

    def ratio(U):
        Xb = np.broadcast_to(x[..., None, :], U.shape)
        return metric.norm(Xb, -U) / metric.norm(Xb, U)

    res = sup_on_sphere(ratio, n, batch_shape=x.shape[:-1])
    return np.maximum(res.value, 1.0 - tol), tol


@dataclass
class DensityEstimate:
    value: float
    stderr: float


def bh_density(metric: FinslerMetric, x, nsamples: int = 2 ** 14, nrep: int = 8,
               seed: int = 0) -> DensityEstimate:
    """Busemann-Hausdorff density by randomized quasi-Monte Carlo.

    vol{F(x, .) < 1} = vol(B^n) * E_u[F(x, u)^-n] for u uniform on the sphere,
    so the density is 1 / E[F^-n].  The standard error comes from independent
    scrambles.
    """
    if nsamples < 10 ** 4:
        raise ValueError("need at least 1e4 samples")
    x = np.asarray(x, float)
    n = metric.dim
    estimates = []
    for r in range(nrep):
        pts = qmc.Sobol(max(n - 1, 1), scramble=True, seed=seed + r).random(nsamples)
        U = uniform_sphere_map(pts, n)
        vals = metric.norm(np.broadcast_to(x, U.shape), U) ** (-n)
        estimates.append(1.0 / vals.mean())
    estimates = np.array(estimates)
    return DensityEstimate(float(estimates.mean()), float(estimates.std(ddof=1) / math.sqrt(nrep)))


def uniform_sphere_map(pts, n):
    """Map points of the unit cube to (area-)uniform points on S^{n-1}."""
    if n == 2:
        t = 2 * np.pi * pts[:, 0]
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    if n == 3:
        z = 2 * pts[:, 0] - 1
        phi = 2 * np.pi * pts[:, 1]
        s = np.sqrt(1 - z * z)
        return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=-1)
    raise ValueError("uniform sphere map implemented for n = 2, 3")


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def unit_sphere_area(n: int) -> float:
    """Area of S^{n-1} in R^n."""
    return n * unit_ball_volume(n)
