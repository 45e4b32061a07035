import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from _util import (RANDERS_CASES, RIEMANNIAN_CASES, ROSTER_CASES, build, ids, levi_civita_conformal,
                   random_points, random_states)
from finslerkit.errors import DomainError, StrongConvexityError, UsageError
from finslerkit.metrics import Funk, list_metrics, load_metric, make_metric, metric_from_config
from finslerkit.sphere import directions, sup_on_sphere
from finslerkit.tensors import (PointState, almost_compatibility_residual, bh_density, bundle,
                                cartan_tensor, check_positive_definite, components,
                                connection_bundle, fundamental_tensor, metric_tensor,
                                reversibility, spray, spray_derivatives, unit_ball_volume,
                                unit_sphere_area)
from finslerkit.volume import BusemannHausdorff, ConstantDensity, volume_form


@pytest.mark.parametrize("case", RIEMANNIAN_CASES, ids=ids(RIEMANNIAN_CASES))
def test_riemannian_tensors_match_closed_forms(case):
    m = build(case)
    rng = np.random.default_rng(1)
    X, Y = random_states(m, 50, rng)
    tb = bundle(m, X, Y)
    assert np.max(np.abs(tb.g - m.riemannian_matrix(X))) < 1e-10
    assert np.max(np.abs(tb.C)) < 1e-10
    if m.kind == "minkowski":
        expected = np.zeros_like(tb.Gamma)
    else:
        expected = levi_civita_conformal(m, X)
    assert np.max(np.abs(tb.Gamma - expected)) < 1e-9


def test_euclidean_identity_tensors():
    tb = connection_bundle(make_metric("euclidean", dim=3), PointState([0, 0, 0], [1, 0, 0]))
    assert np.array_equal(tb.g, np.eye(3))
    assert np.all(tb.C == 0)
    assert np.all(tb.G == 0)


@pytest.mark.parametrize("case", ROSTER_CASES, ids=ids(ROSTER_CASES))
def test_structure_equations(case):
    m = build(case)
    rng = np.random.default_rng(2)
    X, Y = random_states(m, 40, rng)
    tb = bundle(m, X, Y)
    assert np.max(np.abs(almost_compatibility_residual(tb))) < 1e-9
    # torsion free, N = Gamma y, G = 1/2 gamma y y, Gy = N
    assert np.max(np.abs(tb.Gamma - np.swapaxes(tb.Gamma, -1, -2))) < 1e-10
    assert np.allclose(np.einsum("...ijk,...k->...ij", tb.Gamma, Y), tb.N, atol=1e-9)
    sd = spray_derivatives(m, X, Y, 1)
    assert np.allclose(sd.Gy, tb.N, atol=1e-9)
    assert np.allclose(spray(m, X, Y), tb.G, atol=1e-10)


@pytest.mark.parametrize("case", RANDERS_CASES, ids=ids(RANDERS_CASES))
def test_randers_tensors_are_non_riemannian(case):
    m = build(case)
    rng = np.random.default_rng(3)
    X, Y = random_states(m, 20, rng)
    C = bundle(m, X, Y).C
    assert np.max(np.abs(C)) > 1e-3
    # C(y, ., .) = 0 by homogeneity
    assert np.max(np.abs(np.einsum("...ijk,...i->...jk", C, Y))) < 1e-10


@pytest.mark.parametrize("case", ROSTER_CASES, ids=ids(ROSTER_CASES))
def test_closed_form_density_matches_qmc(case):
    m = build(case)
    x = random_points(m, 1, np.random.default_rng(4))[0]
    closed = float(np.asarray(m.bh_density(list(x))))
    est = bh_density(m, x)
    assert abs(est.value - closed) < max(6 * est.stderr, 1e-9 * closed)


@pytest.mark.parametrize("case", RANDERS_CASES, ids=ids(RANDERS_CASES))
def test_reversibility_sup_matches_closed_form(case):
    m = build(case)
    X = random_points(m, 5, np.random.default_rng(5))
    val, _ = reversibility(m, X)
    assert np.allclose(val, m.reversibility_at(components(X)), rtol=1e-7)


def test_funk_indicatrix_is_shifted_unit_ball():
    m = Funk(dim=2)
    rng = np.random.default_rng(6)
    X = random_points(m, 100, rng, 0.9)
    U = rng.standard_normal(X.shape)
    F = m.norm(X, U)
    assert np.allclose(np.linalg.norm(X + U / F[:, None], axis=-1), 1.0, atol=1e-12)


def test_sup_on_sphere_recovers_linear_maximum():
    c = np.array([[3.0, 4.0], [-1.0, 0.5]])
    res = sup_on_sphere(lambda U: np.einsum("bi,bmi->bm", c, U), 2, batch_shape=(2,), count=64)
    assert np.allclose(res.value, np.linalg.norm(c, axis=-1), atol=1e-12)
    assert np.allclose(res.argmax, c / np.linalg.norm(c, axis=-1, keepdims=True), atol=1e-6)
    d = directions(3, 100)
    assert np.allclose(np.linalg.norm(d, axis=-1), 1.0)


def test_unit_volumes():
    assert unit_ball_volume(2) == pytest.approx(math.pi)
    assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)
    assert unit_sphere_area(2) == pytest.approx(2 * math.pi)


def test_errors_and_configuration(tmp_path):
    with pytest.raises(StrongConvexityError):
        make_metric("randers", b=[1.2, 0.0])
    with pytest.raises(UsageError):
        make_metric("nonsense")
    with pytest.raises(DomainError):
        fundamental_tensor(make_metric("funk"), PointState([1.5, 0], [1, 0]))
    with pytest.raises(DomainError):
        cartan_tensor(make_metric("funk"), PointState([0.1, 0], [0, 0]))
    with pytest.raises(StrongConvexityError):
        check_positive_definite(np.array([[1.0, 0.0], [0.0, -1.0]]))
    assert "funk" in list_metrics()
    m = metric_from_config({"kind": "randers", "dimension": 2,
                            "parameters": {"b": [0.2, 0.0], "base": "hyperbolic-disk"}})
    assert m.base == "hyperbolic-disk" and m.radius == 0.99
    path = tmp_path / "m.yaml"
    path.write_text("metric:\n  kind: funk\n  dimension: 3\n")
    assert load_metric(path).dim == 3
    with pytest.raises(UsageError):
        metric_from_config({"kind": "funk", "colour": "red"})
    assert isinstance(volume_form("bh"), BusemannHausdorff)
    assert isinstance(volume_form("constant"), ConstantDensity)


cases = st.sampled_from(ROSTER_CASES)


@given(case=cases, seed=st.integers(0, 10 ** 6), scale=st.floats(0.1, 10.0))
def test_homogeneity(case, seed, scale):
    m = build(case)
    X, Y = random_states(m, 4, np.random.default_rng(seed))
    assert np.allclose(m.norm(X, scale * Y), scale * m.norm(X, Y), rtol=1e-12)
    g1 = metric_tensor(m, X, Y)
    g2 = metric_tensor(m, X, scale * Y)
    assert np.allclose(g1, g2, rtol=1e-9, atol=1e-12)
    # Euler: g_y(y, y) = F(y)^2
    assert np.allclose(np.einsum("...i,...ij,...j->...", Y, g1, Y), m.norm(X, Y) ** 2, rtol=1e-10)
    # spray is 2-homogeneous
    assert np.allclose(spray(m, X, scale * Y), scale ** 2 * spray(m, X, Y), rtol=1e-8, atol=1e-12)


@given(case=cases, seed=st.integers(0, 10 ** 6))
def test_fundamental_tensor_positive_and_symmetric(case, seed):
    m = build(case)
    X, Y = random_states(m, 8, np.random.default_rng(seed))
    g = metric_tensor(m, X, Y)
    assert np.allclose(g, np.swapaxes(g, -1, -2))
    assert np.all(np.linalg.eigvalsh(g) > 0)
    C = bundle(m, X, Y).C
    assert np.allclose(C, np.transpose(C, (0, 2, 1, 3)), atol=1e-12)
    assert np.allclose(C, np.transpose(C, (0, 3, 2, 1)), atol=1e-12)
