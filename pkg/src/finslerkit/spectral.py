"""First-eigenvalue bounds and a direct estimate of lambda_1 on geodesic balls (n = 2).

The estimate minimises the Rayleigh quotient

    Q(f) = int F*(df)^2 dmu / int f^2 dmu

over continuous piecewise-linear functions that vanish on the boundary of the
polygon through the endpoints of radial geodesics.  The mesh is a Delaunay
triangulation of the interior grid nodes and the polygon vertices, so for a
ball containing its inscribed polygon the result is an upper bound on
lambda_1 up to quadrature error.  Since F*^2 is 2-homogeneous, F*(xi)^2 = xi . g*(xi) xi and the
Euler-Lagrange equation is the nonlinear eigenproblem K(u) u = Q M u; it is
solved by freezing g* at the current iterate (a generalized symmetric
eigenproblem each step) and finished by L-BFGS on Q itself.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
from matplotlib.path import Path
from scipy.optimize import minimize
from scipy.sparse.linalg import ArpackNoConvergence, eigsh
from scipy.spatial import Delaunay

from . import autodiff as ad
from .calculus import divergence, legendre_inverse
from .comparison import ct
from .config import Lambda1Config
from .errors import HypothesisError, NumericalError, UsageError
from .geodesy import integrate_geodesic
from .metrics import FinslerMetric
from .tensors import components, metric_tensor
from .volume import BusemannHausdorff, VolumeForm


# closed-form bounds ------------------------------------------------------------------

@dataclass(frozen=True)
class EigenBoundInput:
    """Inputs of the eigenvalue bounds.

    ``c`` is the flag-curvature upper bound (7.3); ``a`` is the positive
    constant with K <= -a^2 (7.4) or Ric <= -a^2 (7.5).  ``radius`` may be
    math.inf for 7.4 and 7.5 only.
    """

    n: int
    snorm: float = 0.0
    reversibility: float = 1.0
    c: Optional[float] = None
    a: Optional[float] = None
    radius: float = math.inf

    def __post_init__(self):
        if self.n < 2:
            raise UsageError("dimension must be at least 2")
        if self.reversibility < 1:
            raise UsageError("reversibility is at least 1")
        if self.snorm < 0:
            raise UsageError("S-norm bound must be nonnegative")


def eigen_bound(inp: EigenBoundInput, theorem: str) -> float:
    theorem = str(theorem)
    lam, S, n = inp.reversibility, inp.snorm, inp.n
    if theorem == "7.3":
        if inp.c is None or not math.isfinite(inp.radius):
            raise UsageError("theorem 7.3 needs c and a finite radius")
        head = (n - 1) * float(ct(inp.c, inp.radius)) - S
        if head <= 0:
            raise HypothesisError(f"(n-1) ct_c(R) - sup|S| = {head:.6g} is not positive")
        return (head / (2 * lam)) ** 2
    if theorem in ("7.4", "7.5"):
        if inp.a is None or inp.a <= 0:
            raise UsageError(f"theorem {theorem} needs a > 0")
        top = (n - 1) * inp.a if theorem == "7.4" else inp.a
        if S >= top:
            raise HypothesisError(f"sup|S| = {S:.6g} is not below {top:.6g}")
        return (top - S) ** 2 / (4 * lam ** 2)
    raise UsageError(f"unknown eigenvalue theorem {theorem!r}")


@dataclass
class FieldBound:
    value: float
    inf_div: float
    sup_norm: float
    reversibility: float
    npoints: int


def lambda1_from_field(metric: FinslerMetric, points, vector_field: Callable,
                       dmu: Optional[VolumeForm] = None, reversibility: Optional[float] = None,
                       ) -> FieldBound:
    """[inf div X / (2 lambda sup F(X))]^2 over the sample points of a domain.

    ``vector_field(xs)`` takes coordinate components (arrays or jets) and
    returns the components of X.  The reversibility defaults to the sup of
    the closed form over the sample points.
    """
    dmu = dmu or BusemannHausdorff()
    P = np.atleast_2d(np.asarray(points, float))
    div = divergence(metric, vector_field, P, dmu)
    vals = np.stack([np.broadcast_to(np.asarray(ad.value_of(v), float), P.shape[:-1])
                     for v in vector_field(components(P))], axis=-1)
    inf_div = float(np.min(div))
    if not inf_div > 0:
        raise HypothesisError(f"inf div X = {inf_div:.6g} is not positive")
    sup_norm = float(np.max(metric.norm(P, vals)))
    if reversibility is None:
        rev = metric.reversibility_at(components(P))
        if rev is None:
            from .tensors import reversibility as rev_sup

            rev = rev_sup(metric, P)[0]
        reversibility = float(np.max(rev))
    value = (inf_div / (2 * reversibility * sup_norm)) ** 2
    return FieldBound(value, inf_div, sup_norm, reversibility, len(P))


# Rayleigh-quotient estimate ---------------------------------------------------------------

@dataclass
class Lambda1Result:
    value: float
    converged: bool
    iterations: int
    history: list
    grid: int
    nodes: int
    polygon: np.ndarray = field(repr=False)
    eigenfunction: np.ndarray = field(repr=False)

    def to_dict(self):
        return {"lambda1": self.value, "converged": self.converged, "iterations": self.iterations,
                "grid": self.grid, "interior_nodes": self.nodes, "history": self.history}


class _Mesh:
    """P1 mesh of a polygon: grid nodes inside plus the polygon vertices, which carry u = 0."""

    def __init__(self, polygon, size):
        lo, hi = polygon.min(0), polygon.max(0)
        h = float(np.max(hi - lo)) / size
        xs = np.arange(lo[0] + h / 2, hi[0], h)
        ys = np.arange(lo[1] + h / 2, hi[1], h)
        GX, GY = np.meshgrid(xs, ys, indexing="ij")
        grid = np.stack([GX.ravel(), GY.ravel()], -1)
        path = Path(polygon)
        grid = grid[path.contains_points(grid)]
        # keep interior nodes off the boundary so no sliver triangles form
        grid = grid[_segment_distance(grid, polygon) > 0.4 * h]
        nodes = np.concatenate([grid, polygon])
        tri = Delaunay(nodes).simplices
        P = nodes[tri]
        e1, e2 = P[:, 1] - P[:, 0], P[:, 2] - P[:, 0]
        area = 0.5 * np.abs(e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])
        keep = path.contains_points(P.mean(1)) & (area > 1e-12 * h * h)
        tri, P, e1, e2 = tri[keep], P[keep], e1[keep], e2[keep]
        self.nodes = nodes
        self.free = np.arange(len(grid))
        self.tri = np.where(tri < len(grid), tri, -1)          # -1 marks a boundary zero
        self.centroid = P.mean(1)
        self.area = area[keep]
        # gradients of the three barycentric functions, (T, 3, 2)
        B = np.stack([e1, e2], 1)                             # rows e1, e2
        Binv = np.linalg.inv(B)                               # columns give grad of lambda_1, lambda_2
        g12 = np.swapaxes(Binv, 1, 2)
        self.dphi = np.concatenate([-(g12[:, 0] + g12[:, 1])[:, None], g12], 1)
        self.nfree = len(grid)

    def gather(self, u):
        ue = np.append(u, 0.0)
        return ue[self.tri]                                   # index -1 picks the zero

    def scatter(self, vals):
        """Sum per-element, per-vertex values into the free nodes."""
        mask = self.tri >= 0
        return np.bincount(self.tri[mask], vals[mask], minlength=self.nfree)

    def assemble(self, local):
        """Sparse matrix from per-element 3x3 blocks."""
        rows = np.repeat(self.tri, 3, axis=1)
        cols = np.tile(self.tri, (1, 3))
        vals = local.reshape(len(self.tri), 9)
        keep = (rows >= 0) & (cols >= 0)
        return sp.csr_matrix((vals[keep], (rows[keep], cols[keep])), shape=(self.nfree, self.nfree))


class _DualSquare:
    """F*^2 on triangle centroids with its xi-gradient and xi-Hessian."""

    def __init__(self, metric, X):
        self.metric = metric
        self.X = X
        self.xs = components(X)
        probe = metric.dual_norm([v[:1] for v in self.xs], [np.ones(1), np.zeros(1)])
        self.closed = probe is not None

    def _jet(self, xi, order):
        seeds = ad.seed(components(xi), order)
        Fs = self.metric.dual_norm(self.xs, seeds)
        return Fs * Fs

    def value_grad(self, xi):
        if self.closed:
            J = self._jet(xi, 1)
            return np.asarray(J.value), J.gradient()
        # grad of F*^2 / 2 is the inverse Legendre map
        Y = legendre_inverse(self.metric, self.X, xi)
        return self.metric.norm(self.X, Y) ** 2, 2 * Y

    def matrix(self, xi):
        """g*(xi), homogeneous of degree 0, so F*^2 = xi . g* xi."""
        if self.closed:
            return 0.5 * self._jet(xi, 2).hessian()
        Y = legendre_inverse(self.metric, self.X, xi)
        return np.linalg.inv(metric_tensor(self.metric, self.X, Y))


def _segment_distance(points, polygon, chunk=4096):
    """Distance from each point to the closed polyline through ``polygon``."""
    a = polygon
    d = np.roll(polygon, -1, axis=0) - a
    dd = np.sum(d * d, -1)
    out = np.empty(len(points))
    for k in range(0, len(points), chunk):
        q = points[k:k + chunk, None, :] - a
        t = np.clip(np.sum(q * d, -1) / dd, 0.0, 1.0)
        out[k:k + chunk] = np.linalg.norm(q - t[..., None] * d, axis=-1).min(1)
    return out


def ball_polygon(metric: FinslerMetric, p, R: float, rays: int, h: float):
    th = 2 * np.pi * np.arange(rays) / rays
    U = np.stack([np.cos(th), np.sin(th)], -1)
    P0 = np.broadcast_to(p, U.shape)
    U = U / metric.norm(P0, U)[:, None]
    path = integrate_geodesic(metric, P0.copy(), U, R, h)
    return path.endpoint


def lambda1_estimate(metric: FinslerMetric, p=None, R: float = 1.0,
                     cfg: Lambda1Config = Lambda1Config(),
                     dmu: Optional[VolumeForm] = None) -> Lambda1Result:
    """Minimised Rayleigh quotient on the forward geodesic ball B_p(R), n = 2."""
    if metric.dim != 2:
        raise UsageError("lambda_1 estimates are implemented for n = 2 only")
    dmu = dmu or BusemannHausdorff()
    p = metric.base_point if p is None else np.asarray(p, float)
    poly = ball_polygon(metric, p, R, cfg.boundary_rays, cfg.step)
    mesh = _Mesh(poly, cfg.grid)
    if mesh.nfree < 3:
        raise UsageError("grid too coarse for this ball")
    sigma = dmu.at(metric, mesh.centroid)
    w = sigma * mesh.area
    # consistent P1 mass matrix with piecewise-constant density
    Mloc = w[:, None, None] * (np.ones((3, 3)) + np.eye(3)) / 12.0
    M = mesh.assemble(Mloc)
    dual = _DualSquare(metric, mesh.centroid)

    def stiffness(A):
        loc = np.einsum("t,tai,tij,tbj->tab", w, mesh.dphi, A, mesh.dphi)
        return mesh.assemble(loc)

    def du(u):
        return np.einsum("ta,tai->ti", mesh.gather(u), mesh.dphi)

    def quotient(u):
        val, grad = dual.value_grad(du(u))
        num = float(np.sum(w * val))
        den = float(u @ (M @ u))
        # d num / du: sum_T w grad F*^2 . dphi_a
        gnum = mesh.scatter(np.einsum("t,ti,tai->ta", w, grad, mesh.dphi))
        q = num / den
        return q, (gnum - 2 * q * (M @ u)) / den

    def lowest(K, v0=None):
        try:
            vals, vecs = eigsh(K, k=1, M=M, sigma=0.0, which="LM", v0=v0)
        except ArpackNoConvergence as exc:  # pragma: no cover - rare
            raise NumericalError(f"eigensolver failed: {exc}") from exc
        u = vecs[:, 0]
        return u if u.sum() >= 0 else -u

    # first iterate: g* frozen at a fixed covector
    A = dual.matrix(np.broadcast_to([1.0, 0.0], mesh.centroid.shape))
    u = lowest(stiffness(A))
    best_q, best_u = quotient(u)[0], u
    history = [best_q]
    converged = False
    it = 0
    for it in range(1, cfg.fixed_point_iter + 1):
        xi = du(u)
        flat = np.linalg.norm(xi, axis=-1) < 1e-14
        xi[flat] = [1.0, 0.0]
        u = lowest(stiffness(dual.matrix(xi)), v0=u)
        q = quotient(u)[0]
        history.append(q)
        if q < best_q:
            best_q, best_u = q, u
        if abs(history[-2] - q) <= cfg.tolerance * abs(q):
            converged = True
            break
    if not metric.riemannian:
        scale = 1.0 / math.sqrt(best_u @ (M @ best_u))
        res = minimize(lambda v: quotient(v), best_u * scale, jac=True, method="L-BFGS-B",
                       options={"maxiter": cfg.max_iter, "ftol": cfg.tolerance * 1e-3, "gtol": 1e-10})
        if res.fun < best_q:
            best_q, best_u = float(res.fun), res.x
        history.append(float(res.fun))
        converged = converged or bool(res.success)
    if not converged:
        warnings.warn("lambda_1 estimate did not converge; returning the best quotient found",
                      RuntimeWarning, stacklevel=2)
    full = np.column_stack([mesh.nodes, np.append(best_u, np.zeros(len(poly)))])
    return Lambda1Result(float(best_q), converged, it, [float(h) for h in history], cfg.grid,
                         mesh.nfree, poly, full)
