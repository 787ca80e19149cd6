"""Pure-Python implementations of the integration kernels.

These mirror ``_kernels.pyx`` argument for argument and are used when the
compiled extension is unavailable or disabled with ``SATJAM_PURE_PYTHON=1``.

Status codes returned by the costate flow:

0  success
1  non-finite state or costate at ``index``
2  distance below ``min_dist`` at node ``index``
"""

import math

import numpy as np

OK = 0
NONFINITE = 1
PROXIMITY = 2


@np.errstate(invalid="ignore", over="ignore")  # non-finite states are reported via bad_index
def rk4_forced(A, B, w0, times, u_nodes, u_mid):
    """Classical RK4 for ``w' = A w + B u(t)`` with tabulated control.

    ``u_nodes[k]`` is the control at ``times[k]`` and ``u_mid[k]`` the control at
    the midpoint of step ``k``. Returns ``(states, bad_index)`` where
    ``bad_index`` is -1 unless a non-finite state was produced.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    times = np.asarray(times, dtype=float)
    n = times.shape[0]
    out = np.empty((n, A.shape[0]))
    w = np.array(w0, dtype=float)
    out[0] = w
    for k in range(n - 1):
        h = times[k + 1] - times[k]
        bu0 = B @ u_nodes[k]
        bum = B @ u_mid[k]
        bu1 = B @ u_nodes[k + 1]
        k1 = A @ w + bu0
        k2 = A @ (w + 0.5 * h * k1) + bum
        k3 = A @ (w + 0.5 * h * k2) + bum
        k4 = A @ (w + h * k3) + bu1
        w = w + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = w
        if not np.all(np.isfinite(w)):
            return out[: k + 2], k + 1
    return out, -1


def cosine_power_gradient(p, numer, pa_ga, sigma2, fspl_coef, peak, exponent):
    """Gradient of the SINR upper bound for ``G(c) = peak * c**exponent`` on c > 0."""
    x, y, z = p[0], p[1], p[2]
    r2 = x * x + y * y + z * z
    r = math.sqrt(r2)
    c = -x / r
    if c > 0.0:
        gain = peak * c**exponent
        comb = -exponent * peak * c ** (exponent - 1.0)
    else:
        gain = 0.0
        comb = 0.0
    loss = fspl_coef / r2
    denom = pa_ga * gain * loss + sigma2
    coef = numer * pa_ga / (denom * denom)
    r3 = r2 * r
    a = 2.0 * fspl_coef * gain / (r2 * r2)
    b = loss * comb
    return np.array(
        [
            coef * (a * x + b * (-1.0 / r + x * x / r3)),
            coef * (a * y + b * (x * y / r3)),
            coef * (a * z + b * (x * z / r3)),
        ]
    )


def costate_flow_callable(A, B, Rinv, w0, lam0, times, weight, grad_nodes, grad_mid, min_dist):
    """RK4 on the coupled state/costate system with a Python gradient callback.

    ``grad_nodes(k, p)`` and ``grad_mid(k, p)`` return the unweighted SINR
    gradient at node ``k`` or at the midpoint of step ``k``.
    Returns ``(states, costates, status, index)``.
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    Rinv = np.asarray(Rinv, dtype=float)
    times = np.asarray(times, dtype=float)
    At = A.T
    BRB = B @ Rinv @ B.T
    n = times.shape[0]
    states = np.empty((n, 6))
    costates = np.empty((n, 6))
    w = np.array(w0, dtype=float)
    lam = np.array(lam0, dtype=float)
    states[0] = w
    costates[0] = lam

    def rhs(w, lam, grad):
        dw = A @ w - BRB @ lam
        dl = -(At @ lam)
        dl[:3] -= weight * grad
        return dw, dl

    def check(w, lam, k):
        if not (np.all(np.isfinite(w)) and np.all(np.isfinite(lam))):
            return NONFINITE
        if math.sqrt(w[0] ** 2 + w[1] ** 2 + w[2] ** 2) < min_dist:
            return PROXIMITY
        return OK

    status = check(w, lam, 0)
    if status:
        return states[:1], costates[:1], status, 0
    for k in range(n - 1):
        h = times[k + 1] - times[k]
        dw1, dl1 = rhs(w, lam, grad_nodes(k, w[:3]))
        w2 = w + 0.5 * h * dw1
        l2 = lam + 0.5 * h * dl1
        dw2, dl2 = rhs(w2, l2, grad_mid(k, w2[:3]))
        w3 = w + 0.5 * h * dw2
        l3 = lam + 0.5 * h * dl2
        dw3, dl3 = rhs(w3, l3, grad_mid(k, w3[:3]))
        w4 = w + h * dw3
        l4 = lam + h * dl3
        dw4, dl4 = rhs(w4, l4, grad_nodes(k + 1, w4[:3]))
        w = w + (h / 6.0) * (dw1 + 2.0 * dw2 + 2.0 * dw3 + dw4)
        lam = lam + (h / 6.0) * (dl1 + 2.0 * dl2 + 2.0 * dl3 + dl4)
        states[k + 1] = w
        costates[k + 1] = lam
        status = check(w, lam, k + 1)
        if status:
            return states[: k + 2], costates[: k + 2], status, k + 1
    return states, costates, OK, -1


def costate_flow(
    A, B, Rinv, w0, lam0, times, weight, numer_nodes, numer_mid,
    pa_ga, sigma2, fspl_coef, peak, exponent, min_dist,
):
    """Coupled state/costate RK4 for the cosine-power antenna pattern.

    The SINR numerator is tabulated at nodes and step midpoints so a
    time-varying bound costs nothing extra. Returns
    ``(states, costates, status, index)``.
    """

    def grad_nodes(k, p):
        return cosine_power_gradient(p, numer_nodes[k], pa_ga, sigma2, fspl_coef, peak, exponent)

    def grad_mid(k, p):
        return cosine_power_gradient(p, numer_mid[k], pa_ga, sigma2, fspl_coef, peak, exponent)

    return costate_flow_callable(A, B, Rinv, w0, lam0, times, weight, grad_nodes, grad_mid, min_dist)
