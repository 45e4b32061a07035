import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _util import ROSTER_CASES, build, ids
from finslerkit.errors import ChartExitError, ConjugatePointError
from finslerkit.geodesy import (ball_volume, ball_volumes, direction_grid, exp_map,
                                index_form, integrate_geodesic, jacobi_integrate,
                                orthonormal_frame, parallel_frame, polar_density, radial_field)
from finslerkit.metrics import make_metric
from finslerkit.tensors import metric_tensor

H = make_metric("hyperbolic-disk")
HP = make_metric("hyperbolic-halfplane")


def test_halfplane_geodesic_closed_form():
    path = integrate_geodesic(HP, [0.0, 1.0], [1.0, 0.0], 1.0, 1e-2)
    t = path.t
    exact = np.stack([np.tanh(t), 1 / np.cosh(t)], -1)
    assert np.max(np.abs(path.x - exact)) < 1e-9


def test_rk4_is_fourth_order():
    errs = []
    for h in (2e-2, 1e-2):
        p = integrate_geodesic(HP, [0.0, 1.0], [1.0, 0.0], 1.0, h)
        errs.append(np.abs(p.endpoint - [math.tanh(1), 1 / math.cosh(1)]).max())
    assert 12 < errs[0] / errs[1] < 20


def test_funk_geodesics_are_straight():
    m = make_metric("funk")
    path = integrate_geodesic(m, [0.1, -0.2], [0.3, 0.5], 1.0, 1e-2)
    d = path.x - path.x[0]
    cross = d[:, 0] * 0.5 - d[:, 1] * 0.3
    assert np.max(np.abs(cross)) < 1e-12


def test_exp_map_of_zero_is_base_point():
    assert np.array_equal(exp_map(H, [0.1, 0.0], [0.0, 0.0]), [0.1, 0.0])


def test_chart_exit_is_reported():
    with pytest.raises(ChartExitError):
        integrate_geodesic(make_metric("funk"), [0.0, 0.0], [1.0, 0.0], 10.0, 1e-2)


def test_conjugate_points_on_the_sphere():
    # from (1, 0) the rays through the origin reach the antipode (-1, 0) inside the chart
    S = make_metric("sphere")
    theta = np.array([math.pi - 0.1, math.pi, math.pi + 0.1])
    with pytest.raises(ConjugatePointError) as info:
        polar_density(S, [1.0, 0.0], theta, 3.3, 1e-2)
    assert abs(info.value.radius - math.pi) < 0.02


def test_jacobi_fields_on_hyperbolic_space():
    path = integrate_geodesic(H, [0.1, 0.2], [1.0, 0.3], 2.0, 1e-2, frame=True)
    sol = jacobi_integrate(path, [0.0, 0.0], [1.0, 0.0])
    assert np.max(np.abs(sol.norm() - np.sinh(path.t))) < 1e-8
    assert sol.residual() < 1e-6
    # the carried variation field is the same Jacobi field
    carried = integrate_geodesic(H, [0.1, 0.2], [1.0, 0.3], 2.0, 1e-2, jacobi=True)
    g = metric_tensor(H, carried.x, carried.v)
    J = carried.variations[..., 0]
    nJ = np.sqrt(np.einsum("...i,...ij,...j->...", J, g, J))
    assert np.max(np.abs(nJ - np.sinh(carried.t))) < 1e-8


def test_index_form_of_a_jacobi_field():
    # I(J, J) = g(nabla J, J) at the endpoint when J(0) = 0
    m = make_metric("randers", b=[0.2, 0.0], base="hyperbolic-disk")
    path = integrate_geodesic(m, [0.0, 0.1], [1.0, 0.2], 1.0, 1e-2, frame=True)
    sol = jacobi_integrate(path, [0.0, 0.0], [1.0, 0.0])
    I = index_form(path, sol.a, sol.a, sol.adot, sol.adot)
    assert I == pytest.approx(float(sol.adot[-1] @ sol.a[-1]), rel=1e-6)


@pytest.mark.parametrize("case", ROSTER_CASES, ids=ids(ROSTER_CASES))
def test_speed_and_frame_are_preserved(case):
    m = build(case)
    rng = np.random.default_rng(7)
    y0 = rng.standard_normal(m.dim)
    path = integrate_geodesic(m, m.base_point, y0, 0.3, 1e-2, frame=True)
    assert path.speed_defect() < 1e-9
    assert path.frame_defect() < 1e-9
    assert parallel_frame(path) is path


def test_polar_density_on_model_spaces():
    pol = polar_density(H, [0.0, 0.0], direction_grid(2, 8), 1.5, 1e-2)
    r = pol.r[1:]
    assert np.max(np.abs(pol.sigma[:, 1:] - np.sinh(r))) < 1e-9
    assert np.max(np.abs(pol.log_derivative[:, 1:] - 1 / np.tanh(r))) < 1e-8


def test_ball_volumes():
    v = ball_volume(make_metric("euclidean"), [0.0, 0.0], 1.0, 16, 1e-2)
    assert v.value == pytest.approx(math.pi, rel=1e-12)
    V, err, _ = ball_volumes(H, [0.0, 0.0], [0.5, 1.0], 32, 1e-2)
    exact = 2 * math.pi * (np.cosh([0.5, 1.0]) - 1)
    assert np.allclose(V, exact, rtol=1e-9)
    assert np.all(err < 1e-6)
    V3, _, _ = ball_volumes(make_metric("euclidean", dim=3), [0.0, 0.0, 0.0], [1.0], 8, 1e-2)
    assert V3[0] == pytest.approx(4 * math.pi / 3, rel=1e-8)


def test_distance_function_hessian_on_hyperbolic_space():
    dirs = np.array([[1.0, 0.0], [0.3, -1.0]])
    field = radial_field(H, [0.0, 0.0], dirs, 1.0, 1e-2)
    loc = field.local()
    path = field.path
    g = metric_tensor(H, path.x[:, 1:], path.v[:, 1:])
    T = path.v[:, 1:]
    gT = np.einsum("...ij,...j->...i", g, T)
    transverse = g - gT[..., :, None] * gT[..., None, :]
    expect = (1 / np.tanh(path.t[1:]))[None, :, None, None] * transverse
    # on a Riemannian metric the Finsler Hessian is the coordinate Hessian minus Gamma df
    from finslerkit.calculus import LocalJet2, hessian

    Hr = hessian(H, LocalJet2(loc.value[:, 1:], loc.grad[:, 1:], loc.hess[:, 1:]), path.x[:, 1:],
                 grad=T)
    assert np.max(np.abs(Hr - expect) / (1 + np.abs(expect))) < 1e-9
    raw = field.local(raw=True).hess[:, 1:]
    assert np.max(np.abs(raw - np.swapaxes(raw, -1, -2))) < 1e-9


@given(st.integers(0, 10 ** 6), st.sampled_from([2, 3]))
def test_orthonormal_frame_property(seed, n):
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((5, n, n))
    g = A @ np.swapaxes(A, -1, -2) + n * np.eye(n)
    T = rng.standard_normal((5, n))
    E = orthonormal_frame(g, T)
    gram = np.einsum("...ia,...ij,...jb->...ab", E, g, E)
    assert np.allclose(gram[..., :-1, :-1], np.eye(n - 1), atol=1e-10)
    assert np.allclose(gram[..., :-1, -1], 0.0, atol=1e-10)
    assert np.allclose(np.cross(E[..., -1], T) if n == 3 else
                       E[..., 0, -1] * T[..., 1] - E[..., 1, -1] * T[..., 0], 0.0, atol=1e-10)


@given(st.floats(0.0, 2 * math.pi), st.floats(0.2, 1.2))
def test_geodesic_reversal_on_reversible_metric(angle, length):
    y = np.array([math.cos(angle), math.sin(angle)])
    fwd = integrate_geodesic(H, [0.1, -0.1], y, length, 1e-2)
    back = integrate_geodesic(H, fwd.endpoint, -fwd.v[-1], length, 1e-2)
    assert np.allclose(back.endpoint, [0.1, -0.1], atol=1e-8)
