"""Clohessy-Wiltshire relative motion of the jammer about the defender.

State vectors are ordered ``[x, y, z, vx, vy, vz]`` in the Hill frame of the
defender (x radial, y along-track, z orbit normal), SI units throughout.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import kernels
from .errors import IntegrationDivergedError

MU_EARTH = 3.986004418e14  # m^3/s^2
R_EARTH = 6378.137e3  # m


def orbital_rate(altitude, mu=MU_EARTH, radius=R_EARTH):
    """Mean motion (rad/s) of a circular orbit at ``altitude`` metres."""
    a = radius + altitude
    return float(np.sqrt(mu / a**3))


@dataclass(frozen=True)
class OrbitParams:
    """Orbital rate ``n`` (rad/s) of the defender and jammer mass ``m`` (kg)."""

    n: float
    m: float

    def __post_init__(self):
        if not (np.isfinite(self.n) and self.n >= 0.0):
            raise ValueError(f"orbital rate must be non-negative, got {self.n}")
        if not (np.isfinite(self.m) and self.m > 0.0):
            raise ValueError(f"mass must be positive, got {self.m}")

    @classmethod
    def from_altitude(cls, altitude, m):
        return cls(n=orbital_rate(altitude), m=m)


@dataclass(frozen=True)
class RelativeState:
    p: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float).reshape(3)
        v = np.asarray(self.v, dtype=float).reshape(3)
        if not (np.all(np.isfinite(p)) and np.all(np.isfinite(v))):
            raise ValueError("relative state must be finite")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "v", v)

    @classmethod
    def from_vector(cls, w):
        w = np.asarray(w, dtype=float).reshape(6)
        return cls(w[:3], w[3:])

    def as_vector(self):
        return np.concatenate([self.p, self.v])


@dataclass
class Trajectory:
    """Sampled trajectory; ``controls[k]`` is the thrust applied at ``times[k]``."""

    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray


def cw_matrices(params):
    """Return ``(A, B)`` of the linear form ``w' = A w + B u``."""
    n, m = params.n, params.m
    A = np.zeros((6, 6))
    A[0:3, 3:6] = np.eye(3)
    A[3, 0] = 3.0 * n * n
    A[3, 4] = 2.0 * n
    A[4, 3] = -2.0 * n
    A[5, 2] = -n * n
    B = np.zeros((6, 3))
    B[3:6, :] = np.eye(3) / m
    return A, B


def cw_derivative(w, u, params):
    """Time derivative of the relative state, written out component-wise."""
    n, m = params.n, params.m
    x, y, z, vx, vy, vz = np.asarray(w, dtype=float)
    ux, uy, uz = np.asarray(u, dtype=float)
    return np.array(
        [
            vx,
            vy,
            vz,
            3.0 * n * n * x + 2.0 * n * vy + ux / m,
            -2.0 * n * vx + uy / m,
            -n * n * z + uz / m,
        ]
    )


def state_transition(t, params):
    """Closed-form CW state-transition matrix ``exp(A t)``.

    Valid for any real ``t``; negative durations are used for backward costate
    maps. For ``n = 0`` the double-integrator limit is returned.
    """
    n = params.n
    if n == 0.0:
        phi = np.eye(6)
        phi[0:3, 3:6] = t * np.eye(3)
        return phi
    nt = n * t
    s = np.sin(nt)
    c = np.cos(nt)
    return np.array(
        [
            [4.0 - 3.0 * c, 0.0, 0.0, s / n, 2.0 * (1.0 - c) / n, 0.0],
            [6.0 * (s - nt), 1.0, 0.0, 2.0 * (c - 1.0) / n, (4.0 * s - 3.0 * nt) / n, 0.0],
            [0.0, 0.0, c, 0.0, 0.0, s / n],
            [3.0 * n * s, 0.0, 0.0, c, 2.0 * s, 0.0],
            [6.0 * n * (c - 1.0), 0.0, 0.0, -2.0 * s, 4.0 * c - 3.0, 0.0],
            [0.0, 0.0, -n * s, 0.0, 0.0, c],
        ]
    )


def matrix_exponential(M):
    """Scaling-and-squaring Pade matrix exponential (used for augmented blocks)."""
    return scipy.linalg.expm(np.asarray(M, dtype=float))


def check_spd(R, name="R"):
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3) or not np.all(np.isfinite(R)):
        raise ValueError(f"{name} must be a finite 3x3 matrix")
    if not np.allclose(R, R.T, rtol=1e-12, atol=0.0):
        raise ValueError(f"{name} must be symmetric")
    try:
        np.linalg.cholesky(R)
    except np.linalg.LinAlgError:
        raise ValueError(f"{name} must be positive definite") from None
    return R


def weighted_gramian(T, R, params):
    """Weighted controllability Gramian over ``[0, T]`` via the Van Loan block exponential.

    Computes ``int_0^T exp(A s) B R^-1 B^T exp(A^T s) ds`` from a single 12x12
    exponential. The result is symmetrized to remove round-off asymmetry.
    """
    if T < 0:
        raise ValueError("horizon must be non-negative")
    R = check_spd(R)
    A, B = cw_matrices(params)
    Q = B @ np.linalg.solve(R, B.T)
    M = np.zeros((12, 12))
    M[:6, :6] = -A
    M[:6, 6:] = Q
    M[6:, 6:] = A.T
    E = matrix_exponential(M * T)
    W = E[6:, 6:].T @ E[:6, 6:]
    return 0.5 * (W + W.T)


def forced_response(w0, u, t, params):
    """Exact state after ``t`` seconds of constant thrust ``u`` (augmented exponential)."""
    A, B = cw_matrices(params)
    M = np.zeros((9, 9))
    M[:6, :6] = A
    M[:6, 6:] = B
    E = matrix_exponential(M * t)
    return E[:6, :6] @ np.asarray(w0, dtype=float) + E[:6, 6:] @ np.asarray(u, dtype=float)


def time_grid(t0, t1, step):
    """Nodes ``t0, t0+step, ...`` closed with ``t1``; a sliver shorter than 1e-9 step is merged."""
    if not step > 0:
        raise ValueError("step must be positive")
    if t1 < t0:
        raise ValueError("t1 must not precede t0")
    span = t1 - t0
    nfull = int(np.floor(span / step + 1e-9))
    times = t0 + step * np.arange(nfull + 1, dtype=float)
    if span - nfull * step > 1e-9 * step:
        times = np.append(times, t1)
    else:
        times[-1] = t1
    return times


def _control_table(control, times, vectorized):
    n = times.shape[0]
    mids = 0.5 * (times[:-1] + times[1:])
    if control is None:
        return np.zeros((n, 3)), np.zeros((max(n - 1, 0), 3))
    if vectorized:
        return (np.asarray(control(times), dtype=float).reshape(n, 3),
                np.asarray(control(mids), dtype=float).reshape(n - 1, 3))
    u_nodes = np.array([control(t) for t in times], dtype=float).reshape(n, 3)
    u_mid = np.array([control(t) for t in mids], dtype=float).reshape(n - 1, 3)
    return u_nodes, u_mid


def propagate(w0, control, t0, t1, step, params, vectorized=False):
    """Integrate ``w' = A w + B u(t)`` with fixed-step classical RK4.

    Parameters
    ----------
    w0 : array_like, shape (6,)
        State at ``t0``.
    control : callable or None
        ``control(t)`` returns the thrust (N). ``None`` means coasting. With
        ``vectorized=True`` it is called once with an array of times and must
        return shape ``(len(t), 3)``.
    t0, t1 : float
        Integration interval (s).
    step : float
        Nominal step (s); the final step is shortened to land on ``t1``.

    Returns
    -------
    Trajectory
        Samples at every step, both endpoints included.

    Raises
    ------
    IntegrationDivergedError
        If a non-finite state is produced.
    """
    times = time_grid(t0, t1, step)
    u_nodes, u_mid = _control_table(control, times, vectorized)
    A, B = cw_matrices(params)
    states, bad = kernels.rk4_forced(A, B, np.asarray(w0, dtype=float), times, u_nodes, u_mid)
    if bad >= 0:
        raise IntegrationDivergedError(f"state became non-finite at t={times[bad]:.6g} s", time=times[bad])
    return Trajectory(times=times, states=np.asarray(states), controls=u_nodes)
