import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from finslerkit import autodiff as ad
from finslerkit.autodiff import MultiIndex, derive, derive_fd, jet_value
from finslerkit.errors import DomainError, UnsupportedOrderError


def quad_norm(x, y):
    return y[0] * y[0] + y[1] * y[1]


def quartic(x, y):
    s = y[0] * y[0] + y[1] * y[1]
    return s * s


def mixed(x, y):
    # smooth function coupling x and y through the elementary functions
    return ad.exp(0.3 * x[0]) * ad.sqrt(1.0 + y[0] * y[0] + 0.5 * y[1] * y[1]) + ad.sin(x[1] * y[0])


def test_quadratic_second_derivative():
    assert derive(quad_norm, [0.3, -1.0], [0.7, 2.0], MultiIndex.of(2, y=[0, 0])) == 2.0


def test_independent_variable_is_zero():
    f = lambda x, y: y[0] * y[0]
    assert derive(f, [0.0, 0.0], [1.0, 1.0], MultiIndex.of(2, y=[1])) == 0.0


def test_third_derivative_against_differences():
    idx = MultiIndex.of(2, y=[0, 0, 0])
    exact = derive(quartic, [0, 0], [1, 0], idx)
    assert exact == pytest.approx(24.0, abs=1e-12)
    assert derive_fd(quartic, [0, 0], [1, 0], idx, 1e-4) == pytest.approx(exact, rel=1e-5)


def test_order_five_is_rejected():
    with pytest.raises(UnsupportedOrderError):
        derive(quartic, [0, 0], [1, 0], MultiIndex.of(2, y=[0, 0, 0, 0, 1]))


def test_zero_vector_rejected_for_metric_functions():
    with pytest.raises(DomainError):
        derive(quad_norm, [0, 0], [0, 0], MultiIndex.of(2, y=[0]), nonzero_y=True)


def test_multi_index_validation():
    with pytest.raises(ValueError):
        MultiIndex((1, -1), (0, 0))
    with pytest.raises(ValueError):
        derive(quartic, [0, 0], [1, 0], MultiIndex.of(2))
    with pytest.raises(ValueError):
        derive_fd(quartic, [0, 0], [1, 0], MultiIndex.of(2, y=[0]), step=0.0)


def test_jet_value_contains_value_and_gradient():
    jv = jet_value(mixed, [0.1, 0.2], [0.3, -0.4], 2)
    assert jv[MultiIndex.of(2)] == pytest.approx(mixed([0.1, 0.2], [0.3, -0.4]))
    grad = jv[MultiIndex.of(2, x=[0])]
    assert grad == pytest.approx(0.3 * math.exp(0.03) * math.sqrt(1 + 0.09 + 0.08))


def test_batched_jets_match_pointwise():
    X = np.array([[0.1, 0.2], [-0.3, 0.5]])
    Y = np.array([[0.3, -0.4], [1.0, 2.0]])
    seeds = ad.seed([X[:, 0], X[:, 1], Y[:, 0], Y[:, 1]], 2)
    J = mixed(seeds[:2], seeds[2:])
    H = J.hessian()
    for b in range(2):
        for i in range(4):
            for j in range(4):
                orders = [0] * 4
                orders[i] += 1
                orders[j] += 1
                idx = MultiIndex(tuple(orders[:2]), tuple(orders[2:]))
                assert H[b, i, j] == pytest.approx(derive(mixed, X[b], Y[b], idx), abs=1e-12)


def test_matrix_helpers():
    a = [[2.0, 0.5], [0.5, 1.0]]
    inv = ad.mat_inv(a)
    assert np.allclose(np.array(inv, float), np.linalg.inv(a))
    assert float(ad.mat_det(a)) == pytest.approx(1.75)


coords = st.floats(-0.8, 0.8)
orders = st.lists(st.integers(0, 1), min_size=4, max_size=4).filter(lambda o: sum(o) >= 1)


@given(x0=coords, x1=coords, y0=coords, y1=coords, extra=st.lists(st.integers(0, 3), min_size=1, max_size=3))
def test_exact_matches_finite_differences(x0, x1, y0, y1, extra):
    pos = [0] * 4
    for k in extra:
        pos[k] += 1
    idx = MultiIndex(tuple(pos[:2]), tuple(pos[2:]))
    exact = derive(mixed, [x0, x1], [y0, y1], idx)
    approx = derive_fd(mixed, [x0, x1], [y0, y1], idx, 1e-2)
    assert approx == pytest.approx(exact, rel=1e-5, abs=1e-6)


@given(x0=coords, x1=coords, y0=coords, y1=coords,
       i=st.integers(0, 3), j=st.integers(0, 3), k=st.integers(0, 3))
def test_mixed_partials_commute(x0, x1, y0, y1, i, j, k):
    # Schwarz symmetry: the answer depends only on the multiset of variables
    def idx(seq):
        pos = [0] * 4
        for v in seq:
            pos[v] += 1
        return MultiIndex(tuple(pos[:2]), tuple(pos[2:]))

    a = derive(mixed, [x0, x1], [y0, y1], idx([i, j, k]))
    seeds = ad.seed([x0, x1, y0, y1], 3)
    J = mixed(seeds[:2], seeds[2:])
    b = J.diff(k).diff(j).diff(i)
    assert float(np.asarray(b.value)) == pytest.approx(a, abs=1e-12)


@given(st.floats(0.2, 3.0))
def test_composition_identities(v):
    (s,) = ad.seed([v], 4)
    lhs = ad.exp(ad.log(s))
    assert np.allclose(lhs.c, s.c, atol=1e-12)
    one = ad.sin(s) * ad.sin(s) + ad.cos(s) * ad.cos(s)
    assert np.allclose(one.c[1:], 0.0, atol=1e-12)
