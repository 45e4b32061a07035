"""The twelve acceptance criteria at their stated tolerances.

Each test prints one PASS/FAIL line; run with ``pytest tests/test_acceptance.py -s``
or read the lines from the normal output.
"""
import time

import numpy as np
import pytest

from _util import (RANDERS_CASES, RIEMANNIAN_CASES, ROSTER_CASES, build, levi_civita_conformal,
                   radial_fd_lambda1, random_states)
from finslerkit import comparison as cmp
from finslerkit.calculus import dual_norm, laplacian, laplacian_trace_route, legendre, legendre_inverse
from finslerkit.calculus import s_norm, scalar_field
from finslerkit.config import Lambda1Config
from finslerkit.curvature import flag_curvature_batch
from finslerkit.metrics import make_metric
from finslerkit.spectral import EigenBoundInput, eigen_bound, lambda1_estimate
from finslerkit.tensors import almost_compatibility_residual, bundle


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n[criterion {number:2d}] {'PASS' if ok else 'FAIL'}  {detail}")
        assert ok, detail
    return emit


def randers_hyperbolic():
    return make_metric("randers", b=[0.2, 0.0], base="hyperbolic-disk")


def test_01_tensors(verdict):
    t0 = time.perf_counter()
    err = 0.0
    for case in RIEMANNIAN_CASES:
        m = build(case)
        X, Y = random_states(m, 100, np.random.default_rng(1))
        tb = bundle(m, X, Y)
        lc = np.zeros_like(tb.Gamma) if m.kind == "minkowski" else levi_civita_conformal(m, X)
        err = max(err, np.abs(tb.g - m.riemannian_matrix(X)).max(), np.abs(tb.C).max(),
                  np.abs(tb.Gamma - lc).max())
    dt = time.perf_counter() - t0
    verdict(1, err < 1e-8 and dt < 10, f"max error {err:.2e}, {dt:.1f} s")


def test_02_structure_equation(verdict):
    worst = 0.0
    for case in ROSTER_CASES:
        m = build(case)
        X, Y = random_states(m, 100, np.random.default_rng(2))
        worst = max(worst, np.abs(almost_compatibility_residual(bundle(m, X, Y))).max())
    verdict(2, worst < 1e-9, f"max residual {worst:.2e} over {len(ROSTER_CASES)} metrics")


def test_03_legendre(verdict):
    trip = dual = 0.0
    for case in ROSTER_CASES:
        m = build(case)
        X, Y = random_states(m, 1000, np.random.default_rng(3))
        xi = legendre(m, X, Y)
        trip = max(trip, np.abs(legendre_inverse(m, X, xi) - Y).max())
        dual = max(dual, np.abs(m.norm(X, Y) - dual_norm(m, X, xi)).max())
    verdict(3, trip < 1e-8 and dual < 1e-8, f"roundtrip {trip:.2e}, |F - F*(l)| {dual:.2e}")


def test_04_laplacian_routes(verdict):
    t0 = time.perf_counter()
    worst = 0.0
    for case in RANDERS_CASES:
        m = build(case)
        rng = np.random.default_rng(4)
        X, _ = random_states(m, 100, rng, 0.4)
        f = scalar_field("euclidean-distance", m.base_point + 0.9 * np.eye(m.dim)[0], m.dim)
        worst = max(worst, np.abs(laplacian(m, f, X) - laplacian_trace_route(m, f, X)).max())
    dt = time.perf_counter() - t0
    verdict(4, worst < 1e-5 and dt < 60, f"max route difference {worst:.2e}, {dt:.1f} s")


def test_05_constant_curvature(verdict):
    errs = {}
    for kind, k in (("sphere", 1.0), ("hyperbolic-disk", -1.0), ("funk", -0.25)):
        m = make_metric(kind)
        rng = np.random.default_rng(5)
        X, Y = random_states(m, 50, rng)
        K = flag_curvature_batch(m, X, Y, rng.standard_normal(X.shape))
        errs[kind] = np.abs(K - k).max()
    funk = make_metric("funk")
    X, _ = random_states(funk, 20, np.random.default_rng(6))
    errs["funk S-norm"] = np.abs(s_norm(funk, X).value - 1.5).max()
    ok = max(errs.values()) < 1e-3
    verdict(5, ok, ", ".join(f"{k} {v:.1e}" for k, v in errs.items()))


def test_06_saturation(verdict):
    t0 = time.perf_counter()
    worst = {}
    for kind, c in (("euclidean", 0.0), ("hyperbolic-disk", -1.0)):
        m = make_metric(kind)
        reps = [cmp.verify_hessian(m, c=c, side="upper"), cmp.verify_hessian(m, c=c, side="lower"),
                cmp.verify_laplacian(m, theorem="5.1", c=c), cmp.verify_laplacian(m, theorem="5.3", c=c),
                cmp.verify_volume(m, theorem="6.1", c=c, lam=0.0),
                cmp.verify_volume(m, theorem="6.3", c=c, lam=0.0)]
        for tag, rep in zip(("4.1u", "4.1l", "5.1", "5.3", "6.1", "6.3"), reps):
            worst[f"{kind} {tag}"] = rep.max_abs_margin if rep.verdict else np.inf
    dt = time.perf_counter() - t0
    top = max(worst, key=worst.get)
    verdict(6, worst[top] <= 1e-3 and dt < 300, f"max |margin| {worst[top]:.1e} ({top}), {dt:.1f} s")


def criterion7_reports():
    funk = make_metric("funk")
    rh = randers_hyperbolic()
    radii = cmp.geometric_radii(0.1, 1.5, 1.1)
    return [
        cmp.verify_laplacian(funk, theorem="5.3", c=-0.25),
        cmp.verify_volume(funk, theorem="6.3", radii=radii, c=-0.25, lam=1.5),
        cmp.verify_hessian(rh, side="lower"),
        cmp.verify_hessian(rh, side="upper"),
        cmp.verify_volume(rh, theorem="6.1"),
    ]


def test_07_finsler_inequalities(verdict):
    reps = criterion7_reports()
    ok = all(r.verdict and r.min_margin >= -1e-3 for r in reps)
    certified = all(r.hypotheses["curvature"]["source"] == "certified" for r in reps[2:])
    detail = ", ".join(f"{r.metric['kind']} {r.theorem} min margin {r.min_margin:.2e}" for r in reps)
    verdict(7, ok and certified, detail)


def test_08_normalization(verdict):
    worst = 0.0
    for case in ROSTER_CASES:
        m = build(case)
        rep = cmp.verify_volume(m, theorem="6.1", radii=[0.05, 0.1])
        (rec,) = [s for s in rep.samples if s.kind == "normalization"]
        worst = max(worst, abs(rec.measured - 1.0))
    verdict(8, worst < 2e-2, f"max |vol/V - 1| at r = 0.05: {worst:.2e}")


def test_09_eigenvalues(verdict):
    b = eigen_bound(EigenBoundInput(n=2, a=1.0, snorm=0.0, reversibility=1.0), "7.4")
    oracle = radial_fd_lambda1()
    disk = lambda1_estimate(make_metric("euclidean"), R=1.0).value
    hyp = [lambda1_estimate(make_metric("hyperbolic-disk"), R=R, cfg=Lambda1Config(grid=150)).value
           for R in (2.0, 3.0)]
    rel = abs(disk - oracle) / oracle
    ok = b == 0.25 and rel < 0.02 and min(hyp) > 0.25 - 1e-2
    verdict(9, ok, f"7.4 bound {b}, disk {disk:.4f} vs {oracle:.4f} ({rel:.2%}), "
                   f"hyperbolic R=2,3: {hyp[0]:.3f}, {hyp[1]:.3f}")


def test_10_riccati(verdict):
    worst = 0.0
    for case in ROSTER_CASES:
        rep = cmp.riccati_check(build(case))
        assert len(rep.radii) == 20
        worst = max(worst, rep.residual)
    verdict(10, worst < 1e-3, f"max residual {worst:.2e} over {len(ROSTER_CASES)} metrics")


def test_11_lemmas(verdict):
    m71 = m21 = np.inf
    for case in ROSTER_CASES:
        m = build(case)
        m71 = min(m71, cmp.lemma71_check(m).min_margin)
        m21 = min(m21, cmp.lemma21_check(m).min_margin)
    verdict(11, min(m71, m21) >= -1e-4, f"lemma 7.1 min margin {m71:.2e}, lemma 2.1 min margin {m21:.2e}")


def test_12_determinism(verdict):
    first = [(r.to_json(), r.to_csv()) for r in criterion7_reports()]
    second = [(r.to_json(), r.to_csv()) for r in criterion7_reports()]
    verdict(12, first == second, f"{len(first)} reports byte-identical across runs")
