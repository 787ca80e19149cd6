import numpy as np
import pytest

from satjam import dynamics, oracles
from satjam.dynamics import OrbitParams
from satjam.errors import IntegrationDivergedError


def test_cw_matrices_zero_rate():
    A, B = dynamics.cw_matrices(OrbitParams(0.0, 1.0))
    expected = np.zeros((6, 6))
    expected[:3, 3:] = np.eye(3)
    np.testing.assert_array_equal(A, expected)
    np.testing.assert_array_equal(B[3:], np.eye(3))
    np.testing.assert_array_equal(B[:3], 0.0)


def test_cw_matrices_entries():
    A, B = dynamics.cw_matrices(OrbitParams(1e-3, 300.0))
    assert A[3, 0] == pytest.approx(3e-6, rel=1e-15)
    assert A[3, 4] == pytest.approx(2e-3, rel=1e-15)
    assert A[4, 3] == pytest.approx(-2e-3, rel=1e-15)
    assert A[5, 2] == pytest.approx(-1e-6, rel=1e-15)
    np.testing.assert_allclose(B[3:], np.eye(3) / 300.0)


def test_orbit_params_validation():
    with pytest.raises(ValueError):
        OrbitParams(1e-3, 0.0)
    with pytest.raises(ValueError):
        OrbitParams(-1e-3, 1.0)


def test_orbital_rate_550km():
    n = dynamics.orbital_rate(550e3)
    assert n == pytest.approx(np.sqrt(3.986004418e14 / (6928.137e3) ** 3), rel=1e-15)
    assert n == pytest.approx(1.0947e-3, rel=2e-4)


def test_derivative_equilibrium(orbit):
    np.testing.assert_array_equal(dynamics.cw_derivative(np.zeros(6), np.zeros(3), orbit), 0.0)


def test_derivative_radial_offset(orbit):
    d = dynamics.cw_derivative([100.0, 0, 0, 0, 0, 0], np.zeros(3), orbit)
    np.testing.assert_allclose(d, [0, 0, 0, 3 * orbit.n**2 * 100.0, 0, 0], rtol=0, atol=0)


def test_derivative_matches_linear_form(orbit, rng):
    A, B = dynamics.cw_matrices(orbit)
    for _ in range(50):
        w = rng.normal(scale=1e3, size=6)
        u = rng.normal(size=3)
        np.testing.assert_allclose(dynamics.cw_derivative(w, u, orbit), A @ w + B @ u, rtol=1e-14, atol=1e-18)


def test_stm_identity_at_zero(orbit):
    np.testing.assert_array_equal(dynamics.state_transition(0.0, orbit), np.eye(6))


def test_stm_semigroup_and_determinant(orbit):
    p1 = dynamics.state_transition(700.0, orbit)
    p2 = dynamics.state_transition(1900.0, orbit)
    p12 = dynamics.state_transition(2600.0, orbit)
    np.testing.assert_allclose(p1 @ p2, p12, rtol=1e-10, atol=1e-10 * np.abs(p12).max())
    assert np.linalg.det(p12) == pytest.approx(1.0, abs=1e-10)


def test_stm_matches_expm(orbit):
    A, _ = dynamics.cw_matrices(orbit)
    for t in (1.0, 500.0, 5000.0):
        ref = dynamics.matrix_exponential(A * t)
        np.testing.assert_allclose(dynamics.state_transition(t, orbit), ref, rtol=1e-9, atol=1e-9)


def test_stm_zero_rate_limit():
    phi = dynamics.state_transition(10.0, OrbitParams(0.0, 1.0))
    np.testing.assert_array_equal(phi[:3, 3:], 10.0 * np.eye(3))


def test_stm_one_period_vs_rk4(orbit):
    # periodic modes return, the along-track drift column does not
    period = 2 * np.pi / orbit.n
    phi = dynamics.state_transition(period, orbit)
    for i in range(6):
        ref = oracles.rk4_free_drift(np.eye(6)[i], period, orbit, step=1.0)
        np.testing.assert_allclose(phi[:, i], ref, rtol=1e-6, atol=1e-6 * np.abs(ref).max())
    np.testing.assert_allclose(phi[[0, 2, 3, 5]][:, [0, 2, 3, 5]], np.eye(4), atol=1e-9)
    assert abs(phi[1, 4]) > 1.0  # secular along-track drift


def test_gramian_zero_horizon(orbit):
    np.testing.assert_array_equal(dynamics.weighted_gramian(0.0, np.eye(3), orbit), 0.0)


def test_gramian_vs_quadrature(orbit):
    R = np.eye(3) * 1000.0 / 3000.0
    W = dynamics.weighted_gramian(3000.0, R, orbit)
    Wq = oracles.quadrature_gramian(3000.0, R, orbit)
    assert np.linalg.norm(W - Wq) / np.linalg.norm(Wq) < 1e-8


def test_gramian_psd_and_monotone(orbit):
    R = np.diag([1.0, 2.0, 0.5])
    W1 = dynamics.weighted_gramian(800.0, R, orbit)
    W2 = dynamics.weighted_gramian(2500.0, R, orbit)
    for W in (W1, W2):
        norm = np.linalg.norm(W)
        assert np.linalg.norm(W - W.T) / norm < 1e-12
        assert np.linalg.eigvalsh(W).min() >= -1e-12 * norm
    assert np.linalg.eigvalsh(W2 - W1).min() >= -1e-12 * np.linalg.norm(W2)


def test_gramian_rejects_non_spd(orbit):
    with pytest.raises(ValueError):
        dynamics.weighted_gramian(10.0, -np.eye(3), orbit)
    with pytest.raises(ValueError):
        dynamics.weighted_gramian(10.0, np.array([[1.0, 2.0, 0], [0, 1.0, 0], [0, 0, 1.0]]), orbit)


def test_propagate_zero_is_zero(orbit):
    traj = dynamics.propagate(np.zeros(6), None, 0.0, 100.0, 1.0, orbit)
    np.testing.assert_array_equal(traj.states, 0.0)
    assert traj.times[0] == 0.0 and traj.times[-1] == 100.0 and len(traj.times) == 101


def test_propagate_free_drift_one_orbit(orbit):
    w0 = np.array([2000.0, -15000.0, 300.0, 0.1, -4.0, 0.2])
    period = 2 * np.pi / orbit.n
    traj = dynamics.propagate(w0, None, 0.0, period, 1.0, orbit)
    exact = dynamics.state_transition(period, orbit) @ w0
    assert np.linalg.norm(traj.states[-1] - exact) / np.linalg.norm(exact) < 1e-6
    assert traj.times[-1] == period


def test_propagate_constant_thrust(orbit):
    w0 = np.array([100.0, 50.0, -20.0, 0.1, 0.0, 0.05])
    u = np.array([0.3, -0.2, 0.1])
    traj = dynamics.propagate(w0, lambda t: u, 0.0, 120.0, 1.0, orbit)
    exact = dynamics.forced_response(w0, u, 120.0, orbit)
    assert np.linalg.norm(traj.states[-1] - exact) / np.linalg.norm(exact) < 1e-6


def test_propagate_partial_last_step(orbit):
    traj = dynamics.propagate(np.ones(6), None, 0.0, 10.5, 1.0, orbit)
    assert traj.times[-2] == 10.0 and traj.times[-1] == 10.5


def test_propagate_divergence(orbit):
    with pytest.raises(IntegrationDivergedError):
        dynamics.propagate(np.ones(6), lambda t: np.array([np.inf, 0, 0]), 0.0, 5.0, 1.0, orbit)


def test_relative_state_roundtrip():
    w = np.arange(6.0)
    s = dynamics.RelativeState.from_vector(w)
    np.testing.assert_array_equal(s.as_vector(), w)
    with pytest.raises(ValueError):
        dynamics.RelativeState([np.nan, 0, 0], [0, 0, 0])
