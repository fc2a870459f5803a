"""Momentum grid, dispersion, rotation angles and their analytic gradients."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quenchmetric import engine
from quenchmetric.params import ModelParams

from conftest import random_noncritical

COUPLING = st.floats(-3.0, 3.0, allow_nan=False)


def test_k_grid_n4():
    grid = engine.build_k_grid(4)
    np.testing.assert_allclose(grid.momenta, [np.pi / 4, 3 * np.pi / 4])


def test_k_grid_n8():
    grid = engine.build_k_grid(8)
    np.testing.assert_allclose(grid.momenta, np.pi * np.array([1, 3, 5, 7]) / 8)


def test_k_grid_n500():
    grid = engine.build_k_grid(500)
    assert grid.momenta.size == 250
    assert grid.momenta[-1] == pytest.approx(499 * np.pi / 500)


@pytest.mark.parametrize("bad", [5, 3, 2, 0, -4])
def test_k_grid_rejects_bad_sizes(bad):
    with pytest.raises(ValueError):
        engine.build_k_grid(bad)


@given(st.integers(2, 300))
@settings(max_examples=40, deadline=None)
def test_k_grid_momenta_interior_and_increasing(half):
    grid = engine.build_k_grid(2 * half)
    k = grid.momenta
    assert k.size == half
    assert np.all(k > 0) and np.all(k < np.pi)
    assert np.all(np.diff(k) > 0)


def test_dispersion_examples():
    d, e, g = engine.dispersion(ModelParams(0, 0, 0, 8), np.pi / 2)
    assert (d, e, g) == pytest.approx((0.0, -1.0, 1.0), abs=1e-15)
    d, e, g = engine.dispersion(ModelParams(1, 0, 0, 8), np.pi / 3)
    assert (d, e, g) == pytest.approx((0.0, -1.0, 1.0), abs=1e-15)
    d, e, g = engine.dispersion(ModelParams(1, 1, 0, 8), np.pi / 2)
    assert (d, e, g) == pytest.approx((0.0, -1.0, 1.0), abs=1e-15)


@given(COUPLING, COUPLING, COUPLING, st.floats(1e-3, np.pi - 1e-3))
@settings(max_examples=200, deadline=None)
def test_gap_identity(lx, ly, h, k):
    d, e, g = engine.dispersion(ModelParams(lx, ly, h, 8), k)
    assert g**2 == pytest.approx(d**2 + e**2, rel=1e-14)


def test_angle_at_symmetric_point():
    # delta = epsilon = sqrt(2)/2 at k = pi/8 and zero couplings
    assert engine.bogoliubov_angle(ModelParams(0, 0, 0, 16), np.pi / 8) == pytest.approx(
        -np.pi / 8
    )


def test_angle_zero_on_positive_epsilon_axis():
    # k = pi/2 with lambda_x = lambda_y kills delta; h = -2 makes epsilon = +1
    params = ModelParams(0.0, 0.0, -2.0, 8)
    d, e, _ = engine.dispersion(params, np.pi / 2)
    assert d == pytest.approx(0.0, abs=1e-15) and e > 0
    assert engine.bogoliubov_angle(params, np.pi / 2) == pytest.approx(0.0, abs=1e-15)


def test_angle_continuous_across_epsilon_sign_change():
    # at k = pi/2: delta = -(lambda_x - lambda_y) = 0.5, epsilon = -1 - h
    k = np.pi / 2
    eps = 1e-6
    plus = engine.bogoliubov_angle(ModelParams(0.0, 0.5, -1.0 - eps, 8), k)
    minus = engine.bogoliubov_angle(ModelParams(0.0, 0.5, -1.0 + eps, 8), k)
    d_plus, e_plus, _ = engine.dispersion(ModelParams(0.0, 0.5, -1.0 - eps, 8), k)
    assert d_plus == pytest.approx(0.5) and e_plus == pytest.approx(eps)
    assert abs(plus - minus) < 1e-5


def test_parameter_gradients_exact():
    k = np.array([0.3, 1.1, 2.9])
    gd, ge = engine.parameter_gradients(k)
    np.testing.assert_allclose(gd, [-np.sin(k), np.sin(k), np.zeros(3)])
    np.testing.assert_allclose(ge, [-np.cos(k), -np.cos(k), -np.ones(3)])


def test_field_gradient_of_angle_at_origin():
    # analytic value -sin(2k)/2, cross-checked by a central difference
    params = ModelParams(0, 0, 0, 32)
    for k in engine.build_k_grid(32).momenta:
        grad_theta, _ = engine.angle_and_gap_gradients(params, k)
        assert grad_theta[2] == pytest.approx(-0.5 * np.sin(2 * k), abs=1e-14)
        step = 1e-6
        fd = (
            engine.bogoliubov_angle(params.displaced((0, 0, step)), k)
            - engine.bogoliubov_angle(params.displaced((0, 0, -step)), k)
        ) / (2 * step)
        assert grad_theta[2] == pytest.approx(fd, abs=1e-8)


def test_gap_gradient_matches_central_difference():
    params = ModelParams(0.5, 0.3, 0.2, 10)
    k = np.pi / 5
    _, grad_gap = engine.angle_and_gap_gradients(params, k)
    step = 1e-6
    for mu in range(3):
        off = np.zeros(3)
        off[mu] = step
        _, _, up = engine.dispersion(params.displaced(off), k)
        _, _, dn = engine.dispersion(params.displaced(-off), k)
        assert grad_gap[mu] == pytest.approx((up - dn) / (2 * step), abs=1e-7)


def test_gradients_match_central_differences_at_random_points(rng):
    step = 1e-6
    for _ in range(100):
        params = random_noncritical(rng, 12)
        k = rng.uniform(0.05, np.pi - 0.05)
        grad_theta, grad_gap = engine.angle_and_gap_gradients(params, k)
        for mu in range(3):
            off = np.zeros(3)
            off[mu] = step
            up_t = engine.bogoliubov_angle(params.displaced(off), k)
            dn_t = engine.bogoliubov_angle(params.displaced(-off), k)
            _, _, up_g = engine.dispersion(params.displaced(off), k)
            _, _, dn_g = engine.dispersion(params.displaced(-off), k)
            assert grad_theta[mu] == pytest.approx((up_t - dn_t) / (2 * step), abs=1e-7)
            assert grad_gap[mu] == pytest.approx((up_g - dn_g) / (2 * step), abs=1e-7)


def test_gradient_bounds_keep_phase_diagram_rigid(rng):
    # |grad theta| * gap <= (|grad delta| + |grad epsilon|)/2 <= 3/2 and
    # |grad gap| <= 2 (couplings) or 1 (field): nothing diverges faster
    # than the inverse gap, so time evolution cannot move critical lines.
    for _ in range(200):
        params = random_noncritical(rng, 12, gap_floor=1e-3)
        table = engine.bogoliubov_table(params)
        f_mu = 0.5 * (np.abs(table.grad_delta) + np.abs(table.grad_epsilon))
        assert np.all(np.abs(table.grad_theta) * table.gap <= f_mu + 1e-12)
        assert np.all(f_mu <= 1.5 + 1e-12)
        assert np.all(np.abs(table.grad_gap) <= np.abs(table.grad_delta) + np.abs(table.grad_epsilon) + 1e-12)
        assert np.all(np.abs(table.grad_gap[:2]) <= 2.0 + 1e-12)
        assert np.all(np.abs(table.grad_gap[2]) <= 1.0 + 1e-12)


def test_table_stays_finite_on_a_critical_line():
    # lambda_x + lambda_y = 1 - h puts the k -> 0 edge at zero gap; the
    # nearest grid momentum still has a finite gap, so values stay finite
    # and no flag is raised at finite N
    params = ModelParams(0.5, 0.5, 0.0, 500)
    table = engine.bogoliubov_table(params)
    assert not table.near_critical
    assert 0.0 < np.min(table.gap) < 0.02
    assert np.all(np.isfinite(table.grad_theta))


def test_ground_energy_stabilizer_point():
    assert engine.ground_energy(ModelParams(0, 0, 0, 8)) == pytest.approx(-8.0)
