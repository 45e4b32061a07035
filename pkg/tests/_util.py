"""Shared roster instances and random-state generators for the tests."""
import numpy as np
from scipy.linalg import eigh_tridiagonal

from finslerkit import autodiff as ad
from finslerkit.metrics import Ball, make_metric
from finslerkit.tensors import components

# (label, kind, dim, params)
ROSTER_CASES = [
    ("euclidean-2", "euclidean", 2, {}),
    ("euclidean-3", "euclidean", 3, {}),
    ("minkowski-2", "minkowski", 2, {"scales": [1.0, 2.5]}),
    ("sphere-2", "sphere", 2, {}),
    ("hyperbolic-disk-2", "hyperbolic-disk", 2, {}),
    ("hyperbolic-disk-3", "hyperbolic-disk", 3, {}),
    ("hyperbolic-halfplane-2", "hyperbolic-halfplane", 2, {}),
    ("randers-2", "randers", 2, {"b": [0.3, 0.0]}),
    ("randers-hyperbolic-2", "randers", 2, {"b": [0.2, 0.0], "base": "hyperbolic-disk"}),
    ("funk-2", "funk", 2, {}),
    ("funk-3", "funk", 3, {}),
]

RIEMANNIAN_CASES = [c for c in ROSTER_CASES if c[1] in
                    ("euclidean", "minkowski", "sphere", "hyperbolic-disk", "hyperbolic-halfplane")]
RANDERS_CASES = [c for c in ROSTER_CASES if c[1] in ("randers", "funk")]


def build(case):
    _, kind, dim, params = case
    return make_metric(kind, dim=dim, **params)


def ids(cases):
    return [c[0] for c in cases]


def random_points(metric, count, rng, spread=0.6):
    """Points in a ball around the base point, well inside the chart."""
    n = metric.dim
    p = metric.base_point
    d = rng.standard_normal((count, n))
    d /= np.linalg.norm(d, axis=-1, keepdims=True)
    dom = metric.domain
    rad = spread * min(dom.radius, 1.0) if isinstance(dom, Ball) else 0.5
    return p + rad * rng.uniform(size=(count, 1)) ** (1.0 / n) * d


def random_states(metric, count, rng, spread=0.6):
    X = random_points(metric, count, rng, spread)
    Y = rng.standard_normal(X.shape)
    return X, Y


def levi_civita_conformal(metric, X):
    """Christoffel symbols of phi^2 delta: d_j u delta^k_i + d_i u delta^k_j - d_k u delta_ij."""
    xs = ad.seed(components(X), 1)
    u = ad.log(metric.factor(xs))
    n = X.shape[-1]
    du = u.gradient() if isinstance(u, ad.Jet) else np.zeros(X.shape)
    du = np.broadcast_to(du, X.shape)
    eye = np.eye(n)
    return (np.einsum("ki,...j->...kij", eye, du) + np.einsum("kj,...i->...kij", eye, du)
            - np.einsum("ij,...k->...kij", eye, du))


def radial_fd_lambda1(R=1.0, n=4000):
    """Lowest Dirichlet eigenvalue of -u'' - u'/r on (0, R), cell-centred finite volumes."""
    h = R / n
    r = (np.arange(n) + 0.5) * h
    face = np.arange(n + 1) * h
    diag = (face[:-1] + face[1:]) / h ** 2
    diag[-1] += face[-1] / h ** 2                     # ghost value -u_n at r = R
    off = -face[1:-1] / h ** 2
    # symmetric pencil (A, diag(r)); rescale to a standard tridiagonal problem
    s = 1 / np.sqrt(r)
    return eigh_tridiagonal(diag * s * s, off * s[:-1] * s[1:], select="i", select_range=(0, 0))[0][0]
