import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _util import RANDERS_CASES, ROSTER_CASES, build, ids, random_points, random_states
from finslerkit.calculus import (divergence, dual_norm, gradient, gradient_derivative,
                                 gradient_derivative_fd, hessian, hessian_connection_form,
                                 laplacian, laplacian_fd, laplacian_trace_route, legendre,
                                 legendre_inverse, s_curvature, s_curvature_geodesic, s_norm,
                                 scalar_field, trace_hessian)
from finslerkit.errors import DegenerateGradientError, NonConvergenceError, UsageError
from finslerkit.metrics import make_metric
from finslerkit.tensors import bundle, components, metric_tensor
from finslerkit.volume import ConstantDensity

FIELDS = ["x1", "half-square", "euclidean-distance", "log-distance"]


def field_for(metric, name, rng):
    # centre off the sample region so distance-type fields stay smooth
    c = metric.base_point + 0.9 * np.eye(metric.dim)[0] * (1 if metric.kind != "euclidean" else 2)
    return scalar_field(name, c, metric.dim)


def test_riemannian_legendre_is_lowering():
    m = make_metric("hyperbolic-disk")
    X = np.array([[0.2, -0.1]])
    Y = np.array([[1.0, 2.0]])
    assert np.allclose(legendre(m, X, Y), np.einsum("...ij,...j->...i", m.riemannian_matrix(X), Y))
    assert np.all(legendre(m, X, np.zeros((1, 2))) == 0)
    assert np.all(legendre_inverse(m, X, np.zeros((1, 2))) == 0)


@pytest.mark.parametrize("case", ROSTER_CASES, ids=ids(ROSTER_CASES))
def test_legendre_roundtrip_and_dual_norm(case):
    m = build(case)
    rng = np.random.default_rng(10)
    X, Y = random_states(m, 40, rng)
    xi = legendre(m, X, Y)
    assert np.max(np.abs(legendre_inverse(m, X, xi) - Y)) < 1e-9
    closed = np.asarray(m.dual_norm(components(X), components(xi)))
    assert np.allclose(closed, m.norm(X, Y), rtol=1e-10)
    assert np.allclose(dual_norm(m, X, xi), closed, rtol=1e-9)


def test_legendre_inverse_reports_non_convergence():
    m = make_metric("funk")
    with pytest.raises(NonConvergenceError):
        legendre_inverse(m, [[0.9, 0.0]], [[50.0, -30.0]], maxiter=0)


@pytest.mark.parametrize("case", RANDERS_CASES + [ROSTER_CASES[4]], ids=ids(RANDERS_CASES + [ROSTER_CASES[4]]))
@pytest.mark.parametrize("name", FIELDS)
def test_gradient_and_hessian(case, name):
    m = build(case)
    rng = np.random.default_rng(11)
    X = random_points(m, 12, rng, 0.4)
    f = field_for(m, name, rng)
    loc = f.local(X)
    V = gradient(m, f, X).vector
    # F(grad f) = F*(df) and df(grad f) = F(grad f)^2
    assert np.allclose(m.norm(X, V), np.asarray(m.dual_norm(components(X), components(loc.grad))), rtol=1e-9)
    assert np.allclose(np.sum(loc.grad * V, -1), m.norm(X, V) ** 2, rtol=1e-9)
    H = hessian(m, f, X)
    assert np.allclose(H, np.swapaxes(H, -1, -2), atol=1e-9)
    assert np.allclose(H, hessian_connection_form(m, f, X), atol=1e-7)
    D = gradient_derivative(m, f, X)
    assert np.allclose(D, gradient_derivative_fd(m, f, X), rtol=1e-5, atol=1e-6)


def test_flat_hessian_and_laplacian():
    m = make_metric("euclidean", dim=3)
    X = np.array([[0.3, -0.2, 0.5]])
    f = scalar_field("half-square", [0, 0, 1], 3)
    assert np.allclose(hessian(m, f, X), np.eye(3))
    assert laplacian(m, f, X)[0] == pytest.approx(3.0)
    pos = lambda xs: list(xs)
    assert divergence(m, pos, X)[0] == pytest.approx(3.0)


def test_degenerate_gradient():
    m = make_metric("randers")
    f = scalar_field("half-square", [0.1, 0.1])
    with pytest.raises(DegenerateGradientError):
        hessian(m, f, np.array([[0.1, 0.1]]))
    assert gradient(m, f, np.array([[0.1, 0.1]])).degenerate.all()
    with pytest.raises(UsageError):
        scalar_field("nope")


@pytest.mark.parametrize("case", RANDERS_CASES, ids=ids(RANDERS_CASES))
def test_laplacian_routes_and_differences(case):
    m = build(case)
    rng = np.random.default_rng(12)
    X = random_points(m, 10, rng, 0.4)
    f = field_for(m, "euclidean-distance", rng)
    a = laplacian(m, f, X)
    assert np.allclose(a, laplacian_trace_route(m, f, X), atol=1e-8)
    assert np.allclose(a, laplacian_fd(m, f, X), rtol=1e-5, atol=1e-6)
    # constant density changes the Laplacian but keeps the two routes equal
    dmu = ConstantDensity(2.0)
    assert np.allclose(laplacian(m, f, X, dmu), laplacian_trace_route(m, f, X, dmu), atol=1e-8)


def test_riemannian_trace_route_is_trace():
    m = make_metric("hyperbolic-disk")
    X = np.array([[0.1, 0.3], [-0.2, 0.1]])
    f = scalar_field("poincare-distance")
    r = f(components(X))
    # hyperbolic Laplacian of the distance from the origin is coth r
    assert np.allclose(trace_hessian(m, f, X), 1 / np.tanh(r), rtol=1e-10)
    assert np.allclose(laplacian(m, f, X), 1 / np.tanh(r), rtol=1e-10)


@pytest.mark.parametrize("case", ROSTER_CASES, ids=ids(ROSTER_CASES))
def test_s_curvature_routes(case):
    m = build(case)
    rng = np.random.default_rng(13)
    X, Y = random_states(m, 6, rng, 0.4)
    S = s_curvature(m, X, Y)
    assert np.allclose(S, s_curvature_geodesic(m, X, Y), atol=1e-7)
    if m.kind == "funk":
        assert np.allclose(S, 0.5 * (m.dim + 1) * m.norm(X, Y), rtol=1e-10)
    elif m.kind != "randers" or m.base == "euclidean":
        assert np.max(np.abs(S)) < 1e-10


def test_funk_s_norm():
    m = make_metric("funk")
    X = random_points(m, 5, np.random.default_rng(14), 0.8)
    assert np.allclose(s_norm(m, X).value, 1.5, atol=1e-9)


@given(case=st.sampled_from(ROSTER_CASES), seed=st.integers(0, 10 ** 6))
def test_legendre_properties(case, seed):
    m = build(case)
    X, Y = random_states(m, 3, np.random.default_rng(seed))
    xi = legendre(m, X, Y)
    # xi(Y) = F(Y)^2 and xi = g_Y Y
    assert np.allclose(np.sum(xi * Y, -1), m.norm(X, Y) ** 2, rtol=1e-10)
    assert np.allclose(xi, np.einsum("...ij,...j->...i", metric_tensor(m, X, Y), Y), rtol=1e-10)
    # l is positively homogeneous
    assert np.allclose(legendre(m, X, 3.0 * Y), 3.0 * xi, rtol=1e-10)
    back = legendre_inverse(m, X, xi)
    assert np.allclose(back, Y, atol=1e-8 * (1 + np.abs(Y).max()))


@given(case=st.sampled_from(RANDERS_CASES), seed=st.integers(0, 10 ** 6))
def test_s_curvature_is_one_homogeneous(case, seed):
    m = build(case)
    X, Y = random_states(m, 3, np.random.default_rng(seed), 0.4)
    assert np.allclose(s_curvature(m, X, 2.5 * Y), 2.5 * s_curvature(m, X, Y), rtol=1e-9, atol=1e-12)
    tb = bundle(m, X, Y)
    assert np.all(np.isfinite(tb.Gamma))
