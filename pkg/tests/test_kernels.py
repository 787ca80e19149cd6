import numpy as np
import pytest

from satjam import _kernels_py, comms, dynamics, kernels

compiled = pytest.importorskip("satjam._kernels", reason="compiled kernels not built")


def _flow_args(orbit, link, weight=0.2):
    A, B = dynamics.cw_matrices(orbit)
    times = np.arange(0.0, 301.0)
    nn = np.full(times.shape, link.P)
    nm = np.full(times.shape[0] - 1, link.P)
    pat = link.pattern
    return (A, B, np.eye(3) * 0.6, np.array([-1500.0, -16000.0, 30.0, -0.1, 3.4, 0.0]),
            np.array([0.1, -0.02, 0.0, 30.0, 9.0, 0.1]), times, weight, nn, nm,
            link.P_a * link.G_a, link.sigma2, link.fspl_coef, pat.peak_gain, pat.exponent, 10.0)


def test_backend_reported():
    assert kernels.BACKEND in ("compiled", "python")


def test_rk4_backends_agree(orbit, rng):
    A, B = dynamics.cw_matrices(orbit)
    times = dynamics.time_grid(0.0, 250.5, 1.0)
    un = rng.normal(size=(len(times), 3))
    um = rng.normal(size=(len(times) - 1, 3))
    w0 = rng.normal(scale=1e3, size=6)
    a, bad_a = compiled.rk4_forced(A, B, w0, times, un, um)
    b, bad_b = _kernels_py.rk4_forced(A, B, w0, times, un, um)
    assert bad_a == bad_b == -1
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-9)


def test_costate_flow_backends_agree(orbit, link):
    args = _flow_args(orbit, link)
    sa, ca, status_a, _ = compiled.costate_flow(*args)
    sb, cb, status_b, _ = _kernels_py.costate_flow(*args)
    assert status_a == status_b == kernels.OK
    np.testing.assert_allclose(sa, sb, rtol=1e-11, atol=1e-8)
    np.testing.assert_allclose(cb, ca, rtol=1e-10, atol=1e-14)


def test_costate_flow_matches_generic_gradient(orbit, link):
    args = _flow_args(orbit, link)
    s_fast, c_fast, _, _ = compiled.costate_flow(*args)

    def grad(k, p):
        return comms.sinr_gradient(p, link)

    A, B, Rinv, w0, lam0, times, weight = args[:7]
    s_gen, c_gen, status, _ = kernels.costate_flow_callable(A, B, Rinv, w0, lam0, times, weight, grad, grad, 10.0)
    assert status == kernels.OK
    np.testing.assert_allclose(s_fast, s_gen, rtol=1e-11, atol=1e-8)
    np.testing.assert_allclose(c_fast, c_gen, rtol=1e-10, atol=1e-14)


@pytest.mark.parametrize("impl", [compiled, _kernels_py])
def test_costate_flow_proximity(orbit, link, impl):
    args = list(_flow_args(orbit, link))
    args[3] = np.array([5.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    _, _, status, index = impl.costate_flow(*args)
    assert status == kernels.PROXIMITY and index == 0


@pytest.mark.parametrize("impl", [compiled, _kernels_py])
def test_rk4_divergence_flag(orbit, impl):
    A, B = dynamics.cw_matrices(orbit)
    times = np.arange(0.0, 5.0)
    un = np.zeros((5, 3))
    un[2, 0] = np.inf
    states, bad = impl.rk4_forced(A, B, np.ones(6), times, un, np.zeros((4, 3)))
    assert bad == 2 and len(states) == 3
