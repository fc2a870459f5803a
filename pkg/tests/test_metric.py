"""Metric tensors, fidelity and dephased purity from the momentum-space engine."""

import numpy as np
import pytest

from quenchmetric import engine
from quenchmetric.params import ModelParams, QuenchSpec

from conftest import random_quench


def test_metric_t0_symmetric_and_psd():
    g = engine.metric_t0(ModelParams(0.5, 0.3, 0.2, 100))
    np.testing.assert_array_equal(g.components, g.components.T)
    assert g.eigenvalues.min() >= -1e-10


def test_metric_t0_field_component_limit():
    # (1/N) sum_k sin^2(2k)/4 tends to 1/16 at the stabilizer point
    g = engine.metric_t0(ModelParams(0, 0, 0, 500))
    assert g.components[2, 2] == pytest.approx(1.0 / 16.0, abs=1e-3)


def test_metric_t0_converges_with_chain_length():
    # momentum sums are Riemann sums: doubling N at a gapped point must
    # shrink the change, and quickly
    gs = {n: engine.metric_t0(ModelParams(0.5, 0.3, 0.4, n)).components for n in (100, 200, 400)}
    d1 = np.linalg.norm(gs[200] - gs[100])
    d2 = np.linalg.norm(gs[400] - gs[200])
    assert d1 < 1e-2
    assert d2 <= 0.5 * d1 + 1e-14


def test_metric_delta_vanishes_at_t0():
    quench = QuenchSpec(ModelParams(0.5, 0.3, 0.0, 64), (0.1, -0.2, 0.2))
    assert np.max(np.abs(engine.metric_delta(quench, 0.0).components)) == 0.0


def test_metric_delta_vanishes_for_trivial_quench():
    quench = QuenchSpec(ModelParams(0.7, 0.2, 0.1, 64))
    for t in (0.5, 1.0, 3.7):
        assert np.max(np.abs(engine.metric_delta(quench, t).components)) <= 1e-12


def test_metric_delta_matches_fidelity_hessian_at_scan_point():
    # the quench protocol of the reference heatmap: h 0 -> 0.2 at N = 500
    quench = QuenchSpec(ModelParams(1.5, 0.5, 0.0, 500), (0.0, 0.0, 0.2))
    g = engine.metric_total(quench, 1.0).components
    g_fd = engine.metric_from_fidelity(quench, 1.0).components
    assert np.linalg.norm(g - g_fd) / np.linalg.norm(g_fd) < 1e-5


def test_metric_sum_matches_fidelity_hessian_at_random_quenches(rng):
    for _ in range(5):
        quench = random_quench(rng, 100)
        t = rng.uniform(0.0, 4.0)
        g = engine.metric_total(quench, t).components
        g_fd = engine.metric_from_fidelity(quench, t).components
        assert np.linalg.norm(g - g_fd) / np.linalg.norm(g_fd) < 1e-5


def test_metric_delta_bounded_approaching_quench_criticality():
    # quenched point drifts onto its critical line (h' -> 0.2 at these
    # couplings); the time-dependent part must not blow up
    base = ModelParams(0.5, 0.3, 0.0, 400)
    times = np.linspace(0.0, 5.0, 11)

    def sup_delta(dh):
        quench = QuenchSpec(base, (0.0, 0.0, dh))
        return max(np.max(np.abs(engine.metric_delta(quench, t).components)) for t in times)

    reference = sup_delta(0.1)  # quenched gap ~ 0.1
    for dh in (0.17, 0.19, 0.199, 0.19999):
        assert sup_delta(dh) <= 10.0 * reference


def test_fidelity_is_one_at_zero_displacement(rng):
    for _ in range(5):
        quench = random_quench(rng, 64)
        t = rng.uniform(0.0, 5.0)
        assert engine.fidelity_sq(quench, (0.0, 0.0, 0.0), t) == pytest.approx(1.0, rel=1e-12)


def test_fidelity_at_t0_reduces_to_ground_state_overlap():
    quench = QuenchSpec(ModelParams(0.5, 0.3, 0.2, 64), (0.0, 0.0, 0.2))
    dl = np.array([0.01, 0.0, 0.0])
    k = engine.build_k_grid(64).momenta
    overlap = np.prod(
        np.cos(
            engine.bogoliubov_angle(quench.base.displaced(dl), k)
            - engine.bogoliubov_angle(quench.base, k)
        )
        ** 2
    )
    assert engine.fidelity_sq(quench, dl, 0.0) == pytest.approx(float(overlap), rel=1e-12)


def test_fidelity_bounded_on_random_inputs(rng):
    for _ in range(1000):
        lam = rng.uniform(-2.0, 2.0, 3)
        off = rng.uniform(-0.5, 0.5, 3)
        dl = rng.uniform(-0.2, 0.2, 3)
        t = rng.uniform(0.0, 10.0)
        quench = QuenchSpec(ModelParams(*lam, 32), tuple(off))
        value = engine.fidelity_sq(quench, dl, t)
        assert 0.0 <= value <= 1.0 + 1e-12


def test_metric_from_fidelity_reduces_to_t0_for_trivial_quench():
    params = ModelParams(0.6, -0.3, 0.25, 128)
    quench = QuenchSpec(params)
    g0 = engine.metric_t0(params).components
    for t in (0.0, 2.0):
        g_fd = engine.metric_from_fidelity(quench, t).components
        assert np.max(np.abs(g_fd - g0)) < 1e-8 * max(1.0, np.max(np.abs(g0)))


def test_metric_from_fidelity_symmetric_by_construction(rng):
    quench = random_quench(rng, 64)
    g = engine.metric_from_fidelity(quench, 1.3).components
    np.testing.assert_array_equal(g, g.T)


def test_evolved_amplitudes_normalized(rng):
    k = engine.build_k_grid(64).momenta
    for _ in range(10):
        quench = random_quench(rng, 64)
        t = rng.uniform(0.0, 5.0)
        a, b = engine.evolved_amplitudes(quench, t, k)
        np.testing.assert_allclose(np.abs(a) ** 2 + np.abs(b) ** 2, 1.0, rtol=1e-12)


def test_evolved_amplitudes_trivial_quench():
    quench = QuenchSpec(ModelParams(0.5, 0.3, 0.2, 16))
    a, b = engine.evolved_amplitudes(quench, 2.0, np.pi / 4)
    assert a == pytest.approx(1.0)
    assert b == pytest.approx(0.0)


def test_evolved_amplitudes_at_t0():
    quench = QuenchSpec(ModelParams(0.5, 0.3, 0.0, 16), (0.0, 0.0, 0.3))
    k = engine.build_k_grid(16).momenta
    a, b = engine.evolved_amplitudes(quench, 0.0, k)
    chi = engine.bogoliubov_angle(quench.base, k) - engine.bogoliubov_angle(quench.quenched, k)
    np.testing.assert_allclose(a, np.cos(chi))
    np.testing.assert_allclose(b, 1j * np.sin(chi))


def test_dephased_purity_trivial_quench_is_one():
    assert engine.dephased_purity(QuenchSpec(ModelParams(0.4, 0.1, -0.3, 32))) == 1.0


def test_dephased_purity_from_uniform_angles():
    # chi = pi/4 for every block gives (1/2)^(N/2)
    for half in (4, 8, 16):
        value = engine.dephased_purity_from_angles(np.full(half, np.pi / 4))
        assert value == pytest.approx(0.5**half, rel=1e-12)


def test_dephased_purity_strictly_decreasing_in_chain_length():
    previous = None
    for n in range(8, 26, 2):
        quench = QuenchSpec(ModelParams(0.5, 0.3, 0.0, n), (0.0, 0.0, 0.2))
        value = engine.dephased_purity(quench)
        if previous is not None:
            assert value / previous < 1.0
        previous = value
