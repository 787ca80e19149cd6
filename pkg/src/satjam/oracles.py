"""Independent reference computations used by the validation suite and tests.

Nothing here touches costates: the Gramian is integrated by quadrature, the
gradient by finite differences, and optimality is probed by direct
transcription with piecewise-constant thrust.
"""

from dataclasses import dataclass

import numpy as np
import scipy.optimize

from . import comms
from .dynamics import cw_matrices, matrix_exponential, state_transition


def quadrature_gramian(T, R, params, panels=400, order=8):
    """Composite Gauss-Legendre integral of ``exp(A s) B R^-1 B^T exp(A^T s)``."""
    _, B = cw_matrices(params)
    Q = B @ np.linalg.solve(R, B.T)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(0.0, T, panels + 1)
    W = np.zeros((6, 6))
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        for x, wt in zip(nodes, weights):
            phi = state_transition(mid + half * x, params)
            W += wt * half * (phi @ Q @ phi.T)
    return W


def rk4_free_drift(w0, t, params, step=1.0):
    """Plain RK4 on ``w' = A w``, written independently of the kernels."""
    A, _ = cw_matrices(params)
    w = np.array(w0, dtype=float)
    n = int(round(t / step))
    h = t / n
    for _ in range(n):
        k1 = A @ w
        k2 = A @ (w + 0.5 * h * k1)
        k3 = A @ (w + 0.5 * h * k2)
        k4 = A @ (w + h * k3)
        w = w + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return w


def fd_sinr_gradient(p, params, rel_step=1e-6):
    """Central differences of the SINR bound with step ``|p| * rel_step``."""
    p = np.asarray(p, dtype=float)
    h = np.linalg.norm(p) * rel_step
    g = np.empty(3)
    for i in range(3):
        e = np.zeros(3)
        e[i] = h
        g[i] = (comms.sinr_upper_bound(p + e, params) - comms.sinr_upper_bound(p - e, params)) / (2 * h)
    return g


@dataclass
class TranscriptionResult:
    controls: np.ndarray  # (intervals, 3)
    cost: float
    fuel: float
    sinr_term: float
    history: list


def _zoh_input(params, dt):
    A, B = cw_matrices(params)
    M = np.zeros((9, 9))
    M[:6, :6] = A
    M[:6, 6:] = B
    E = matrix_exponential(M * dt)
    return E[:6, :6], E[:6, 6:]


def direct_transcription(
    w0, t0, t1, R, params, comms_params, running_weight=0.0, terminal_weight=0.0,
    intervals=30, sample_step=1.0, starts=None, maxiter=2000,
):
    """Minimize fuel plus SINR over piecewise-constant thrust profiles.

    The state on a uniform sample grid is an exact linear function of the
    interval thrusts (zero-order-hold discretization), so the cost and its
    gradient are evaluated in closed form and handed to L-BFGS. The running
    SINR integral uses trapezoidal weights on the sample grid. Each start in
    ``starts`` (default: zero thrust) is optimized and the best kept;
    ``history`` records every objective value seen.
    """
    R = np.asarray(R, dtype=float)
    span = t1 - t0
    per = int(round(span / intervals / sample_step))
    if per < 1 or abs(per * intervals * sample_step - span) > 1e-9 * span:
        raise ValueError("interval length must be a multiple of the sample step")
    h = span / (intervals * per)
    nsamp = intervals * per + 1
    phi_h, gam_h = _zoh_input(params, h)

    base = np.empty((nsamp, 6))
    sens = np.zeros((nsamp, 6, 3 * intervals))
    base[0] = w0
    for j in range(nsamp - 1):
        k = j // per
        base[j + 1] = phi_h @ base[j]
        sens[j + 1] = phi_h @ sens[j]
        sens[j + 1][:, 3 * k : 3 * k + 3] += gam_h
    pos_sens = sens[:, :3, :]
    trap = np.full(nsamp, h)
    trap[0] = trap[-1] = 0.5 * h
    dt = h * per
    history = []

    def parts(z):
        u = z.reshape(intervals, 3)
        p = base[:, :3] + np.einsum("jik,k->ji", pos_sens, z)
        fuel = 0.5 * dt * float(np.einsum("ki,ij,kj->", u, R, u))
        run = 0.0
        term = 0.0
        grad = dt * (u @ R.T).reshape(-1)
        if running_weight:
            s = comms.sinr_upper_bound(p, comms_params)
            g = comms.sinr_gradient(p, comms_params)
            run = running_weight * float(trap @ s)
            grad = grad + running_weight * np.einsum("j,jik,ji->k", trap, pos_sens, g)
        if terminal_weight:
            term = terminal_weight * float(comms.sinr_upper_bound(p[-1], comms_params))
            g = comms.sinr_gradient(p[-1], comms_params)
            grad = grad + terminal_weight * pos_sens[-1].T @ g
        return fuel, run + term, grad

    def objective(z):
        fuel, s, grad = parts(z)
        history.append(fuel + s)
        return fuel + s, grad

    if starts is None:
        starts = [np.zeros(3 * intervals)]
    best = None
    for z0 in starts:
        res = scipy.optimize.minimize(
            objective, np.asarray(z0, dtype=float), jac=True, method="L-BFGS-B",
            options={"maxiter": maxiter, "ftol": 1e-15, "gtol": 1e-12},
        )
        if best is None or res.fun < best.fun:
            best = res
    fuel, s, _ = parts(best.x)
    return TranscriptionResult(best.x.reshape(intervals, 3), fuel + s, fuel, s, history)
