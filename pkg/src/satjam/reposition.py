"""Stage 1: fuel-weighted repositioning that minimizes the SINR bound at time T.

The minimum principle reduces the problem to a three-dimensional root find
for the terminal position costate ``mu``. Given ``mu`` the terminal state is
affine (free drift minus the weighted Gramian applied to ``[mu; 0]``), and
``mu`` must equal the weighted SINR gradient at the resulting position.
"""

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import comms
from .dynamics import (
    Trajectory,
    check_spd,
    cw_matrices,
    propagate,
    state_transition,
    weighted_gramian,
)
from .errors import NoConvergenceError, SatjamError
from .newton import damped_newton

RESIDUAL_RTOL = 1e-8


@dataclass(eq=False)
class RepositionProblem:
    """Terminal-SINR repositioning over ``[0, T]``.

    ``numerator`` optionally replaces the constant SINR bound by a callable of
    time; it is evaluated once, at ``T``.
    """

    w0: np.ndarray
    T: float
    R: np.ndarray
    a: float
    comms: comms.CommsParams
    orbit: object
    step: float = 1.0
    numerator: object = None

    def __post_init__(self):
        self.w0 = np.asarray(self.w0, dtype=float).reshape(6)
        if not np.all(np.isfinite(self.w0)):
            raise ValueError("initial state must be finite")
        if not self.T > 0:
            raise ValueError("horizon T must be positive")
        if self.a < 0:
            raise ValueError("terminal weight must be non-negative")
        self.R = check_spd(self.R, "R_r")

    @cached_property
    def matrices(self):
        return cw_matrices(self.orbit)

    @cached_property
    def phi_T(self):
        return state_transition(self.T, self.orbit)

    @cached_property
    def gramian(self):
        return weighted_gramian(self.T, self.R, self.orbit)

    @cached_property
    def drift(self):
        """Terminal state under zero thrust."""
        return self.phi_T @ self.w0

    @cached_property
    def numer(self):
        return self.comms.P if self.numerator is None else float(self.numerator(self.T))

    def terminal_state(self, mu):
        lam_T = np.concatenate([mu, np.zeros(3)])
        return self.drift - self.gramian @ lam_T

    def terminal_sinr(self, p):
        return float(comms.sinr_upper_bound(p, self.comms, numer=self.numer))

    def sinr_gradient(self, p):
        return comms.sinr_gradient(p, self.comms, scale=self.a, numer=self.numer)


@dataclass
class Root:
    mu: np.ndarray
    total_cost: float
    residual_norm: float
    start_index: int


@dataclass
class RepositionSolution:
    mu: np.ndarray
    p_f: np.ndarray
    v_f: np.ndarray
    trajectory: Trajectory
    costates: np.ndarray
    total_cost: float
    fuel_cost: float
    terminal_sinr: float
    residual_norm: float
    delta_v: float
    roots: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    @property
    def lam_T(self):
        return np.concatenate([self.mu, np.zeros(3)])


def terminal_costate_residual(mu, prob):
    """``mu`` minus the weighted SINR gradient at the terminal position it induces."""
    mu = np.asarray(mu, dtype=float)
    p_f = prob.terminal_state(mu)[:3]
    return mu - prob.sinr_gradient(p_f)


def costate_at(t, lam_T, prob):
    """``lambda(t) = exp(A^T (T - t)) lambda(T)``."""
    return state_transition(prob.T - t, prob.orbit).T @ lam_T


def reposition_control(t, mu, prob):
    """Open-loop optimal thrust at time ``t`` in ``[0, T]`` for costate root ``mu``."""
    if isinstance(mu, RepositionSolution):
        mu = mu.mu
    t = float(t)
    if t < 0.0 or t > prob.T:
        raise ValueError(f"t={t} outside [0, {prob.T}]")
    _, B = prob.matrices
    lam = costate_at(t, np.concatenate([np.asarray(mu, dtype=float), np.zeros(3)]), prob)
    return -np.linalg.solve(prob.R, B.T @ lam)


def _control_law(mu, prob):
    _, B = prob.matrices
    lam_T = np.concatenate([mu, np.zeros(3)])
    gain = -np.linalg.solve(prob.R, B.T)

    def control(times):
        times = np.atleast_1d(times)
        lam = np.array([costate_at(t, lam_T, prob) for t in times])
        return lam @ gain.T

    return control


def delta_v(controls, times, mass):
    """Trapezoidal ``(1/m) int |u| dt``."""
    mags = np.linalg.norm(np.asarray(controls, dtype=float), axis=1)
    return float(np.trapezoid(mags, np.asarray(times, dtype=float)) / mass)


def evaluate(mu, prob):
    """Propagate the control induced by ``mu`` and score it.

    Returns ``(trajectory, costates, fuel_cost, terminal_sinr)`` where the
    fuel term is trapezoidal quadrature of ``u^T R u / 2`` on the samples and
    the SINR is taken at the propagated endpoint.
    """
    mu = np.asarray(mu, dtype=float)
    control = _control_law(mu, prob)
    traj = propagate(prob.w0, control, 0.0, prob.T, prob.step, prob.orbit, vectorized=True)
    lam_T = np.concatenate([mu, np.zeros(3)])
    costates = np.array([costate_at(t, lam_T, prob) for t in traj.times])
    u = traj.controls
    fuel = 0.5 * float(np.trapezoid(np.einsum("ki,ij,kj->k", u, prob.R, u), traj.times))
    sinr = prob.terminal_sinr(traj.states[-1, :3])
    return traj, costates, fuel, sinr


def start_grid(prob, count=7):
    """Deterministic multi-start costates: zero, then three directions times ``count`` magnitudes.

    Magnitudes are log-spaced over six decades centred on the weighted SINR
    gradient at the drift endpoint (or, if that lies in the dead zone, at
    probe points of the same range in the visible hemisphere).
    """
    p_drift = prob.drift[:3]
    r = float(np.linalg.norm(p_drift))
    grad = prob.sinr_gradient(p_drift)
    scale = float(np.linalg.norm(grad))
    if scale == 0.0:
        probes = np.array([[-r * c, r * np.sqrt(1 - c * c), 0.0] for c in (0.1, 0.5, 0.9)])
        scale = float(np.max(np.linalg.norm(prob.sinr_gradient(probes), axis=1)))
    if scale == 0.0:
        return [np.zeros(3)]

    W_pp = prob.gramian[:3, :3]
    boresight = np.array([-r, 0.0, 0.0])
    # displacements of the terminal point that the costate should produce
    shifts = [np.array([-1.0, 0.0, 0.0]), boresight - p_drift]
    directions = []
    if np.any(grad):
        directions.append(grad / np.linalg.norm(grad))
    for shift in shifts:
        if np.linalg.norm(shift) == 0.0:
            continue
        d = -np.linalg.solve(W_pp, shift)
        directions.append(d / np.linalg.norm(d))
    magnitudes = scale * np.logspace(-3.0, 3.0, count)
    starts = [np.zeros(3)]
    for mag in magnitudes:
        for d in directions:
            starts.append(mag * d)
    return starts


def solve_reposition(prob, multistart=7):
    """Solve the terminal-costate equations and return the lowest-cost root.

    Every start runs a damped Newton iteration; distinct converged roots are
    scored by propagating their control law. Flags record multiple roots and
    the coasting case where only ``mu = 0`` is found.
    """
    def converged(mu, f):
        return np.linalg.norm(f) < RESIDUAL_RTOL * (1.0 + np.linalg.norm(mu))

    def fun(mu):
        return terminal_costate_residual(mu, prob)

    roots = []
    best_failure = np.inf
    for k, start in enumerate(start_grid(prob, multistart)):
        try:
            res = damped_newton(fun, start, converged)
        except NoConvergenceError as exc:
            if exc.best_residual is not None:
                best_failure = min(best_failure, exc.best_residual)
            continue
        except SatjamError:
            continue
        mu = res.x
        if any(np.linalg.norm(mu - r.mu) <= 1e-6 * (1.0 + np.linalg.norm(r.mu)) for r in roots):
            continue
        _, _, fuel, sinr = evaluate(mu, prob)
        roots.append(Root(mu, fuel + prob.a * sinr, res.residual_norm, k))

    if not roots:
        raise NoConvergenceError("no multi-start seed converged", best_residual=best_failure)

    roots.sort(key=lambda r: (r.total_cost, float(np.linalg.norm(r.mu))))
    best = roots[0]
    traj, costates, fuel, sinr = evaluate(best.mu, prob)
    w_f = prob.terminal_state(best.mu)
    flags = []
    if len(roots) > 1:
        flags.append("multiple_roots")
    if not np.any(best.mu):
        flags.append("coast")
        if comms.reception_angle_cos(w_f[:3]) <= 0.0:
            flags.append("dead_zone_coast")
    return RepositionSolution(
        mu=best.mu,
        p_f=w_f[:3],
        v_f=w_f[3:],
        trajectory=traj,
        costates=costates,
        total_cost=fuel + prob.a * sinr,
        fuel_cost=fuel,
        terminal_sinr=sinr,
        residual_norm=best.residual_norm,
        delta_v=delta_v(traj.controls, traj.times, prob.orbit.m),
        roots=roots,
        flags=flags,
    )
