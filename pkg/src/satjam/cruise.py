"""Stage 2: hold an efficient jamming geometry over the window ``[T, T']``.

The running-SINR problem leads to a two-point boundary value problem: the
state starts from the stage-1 handoff and the costate must vanish at ``T'``.
It is solved by single shooting on the initial costate, with a
multiple-shooting fallback.
"""

from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from . import comms, kernels
from .dynamics import check_spd, cw_matrices, time_grid
from .errors import IntegrationDivergedError, NoConvergenceError, ProximityError, SatjamError
from .newton import damped_newton, fd_jacobian
from .reposition import delta_v

BOUNDARY_RTOL = 1e-6
MIN_DISTANCE = 10.0  # m


@dataclass(eq=False)
class CruiseProblem:
    """Running-SINR station keeping from ``wT`` at ``T`` until ``T_end``.

    ``numerator`` optionally replaces the constant SINR bound by a callable
    of time (vectorized over an array of times).
    """

    wT: np.ndarray
    T: float
    T_end: float
    R: np.ndarray
    a: float
    comms: comms.CommsParams
    orbit: object
    step: float = 1.0
    numerator: object = None
    min_distance: float = MIN_DISTANCE

    def __post_init__(self):
        self.wT = np.asarray(self.wT, dtype=float).reshape(6)
        if not np.all(np.isfinite(self.wT)):
            raise ValueError("initial state must be finite")
        if not self.T_end > self.T:
            raise ValueError("window end must follow window start")
        if self.a < 0:
            raise ValueError("running weight must be non-negative")
        self.R = check_spd(self.R, "R_c")

    @cached_property
    def matrices(self):
        return cw_matrices(self.orbit)

    @cached_property
    def times(self):
        return time_grid(self.T, self.T_end, self.step)

    @cached_property
    def numer_tables(self):
        t = self.times
        mids = 0.5 * (t[:-1] + t[1:])
        if self.numerator is None:
            return np.full(t.shape, self.comms.P), np.full(mids.shape, self.comms.P)
        return (np.asarray(self.numerator(t), dtype=float) * np.ones(t.shape),
                np.asarray(self.numerator(mids), dtype=float) * np.ones(mids.shape))

    @cached_property
    def control_gain(self):
        """``K`` with ``u = K lambda``."""
        _, B = self.matrices
        return -np.linalg.solve(self.R, B.T)


@dataclass
class CruiseTrajectory:
    times: np.ndarray
    states: np.ndarray
    costates: np.ndarray
    controls: np.ndarray


@dataclass
class CruiseSolution:
    lambda0: np.ndarray
    trajectory: CruiseTrajectory
    terminal_costate_norm: float
    total_cost: float
    fuel_cost: float
    delta_v: float
    hamiltonian_series: np.ndarray
    method: str
    iterations: int
    dead_zone_samples: int
    flags: list = field(default_factory=list)


def costate_derivative(w, lam, prob, t=None):
    """``-A^T lambda - [a * dSINR/dp; 0]`` at state ``w``."""
    A, _ = prob.matrices
    numer = None
    if prob.numerator is not None and t is not None:
        numer = float(prob.numerator(t))
    w = np.asarray(w, dtype=float)
    out = -A.T @ np.asarray(lam, dtype=float)
    out[:3] -= comms.sinr_gradient(w[:3], prob.comms, scale=prob.a, numer=numer)
    return out


def _flow(w0, lam0, times, numer_nodes, numer_mid, prob):
    A, B = prob.matrices
    Rinv = np.linalg.inv(prob.R)
    cp = prob.comms
    pattern = cp.pattern
    if isinstance(pattern, comms.CosinePowerPattern):
        return kernels.costate_flow(
            A, B, Rinv, w0, lam0, times, prob.a, numer_nodes, numer_mid,
            cp.P_a * cp.G_a, cp.sigma2, cp.fspl_coef, pattern.peak_gain, pattern.exponent,
            prob.min_distance,
        )

    def grad_nodes(k, p):
        return comms.sinr_gradient(p, cp, numer=numer_nodes[k])

    def grad_mid(k, p):
        return comms.sinr_gradient(p, cp, numer=numer_mid[k])

    return kernels.costate_flow_callable(
        A, B, Rinv, w0, lam0, times, prob.a, grad_nodes, grad_mid, prob.min_distance
    )


def _raise_status(status, index, times, states):
    t = times[index]
    if status == kernels.PROXIMITY:
        d = float(np.linalg.norm(states[index, :3]))
        raise ProximityError(f"separation {d:.3f} m below guard at t={t:.6g} s", time=t, distance=d)
    raise IntegrationDivergedError(f"non-finite state/costate at t={t:.6g} s", time=t)


def _segment(w0, lam0, lo, hi, prob):
    times = prob.times[lo : hi + 1]
    nn, nm = prob.numer_tables
    states, costates, status, index = _flow(w0, lam0, times, nn[lo : hi + 1], nm[lo:hi], prob)
    if status != kernels.OK:
        _raise_status(status, index, times, states)
    return states, costates


def shoot(lambda0, prob):
    """Integrate state and costate from ``T`` to ``T'`` with ``u = -R^-1 B^T lambda``.

    Returns ``(terminal_costate, trajectory)``.
    """
    lambda0 = np.asarray(lambda0, dtype=float)
    states, costates = _segment(prob.wT, lambda0, 0, len(prob.times) - 1, prob)
    controls = costates @ prob.control_gain.T
    traj = CruiseTrajectory(prob.times, states, costates, controls)
    return costates[-1].copy(), traj


def hamiltonian(traj, prob):
    A, B = prob.matrices
    nn, _ = prob.numer_tables
    u = traj.controls
    sinr = comms.sinr_upper_bound(traj.states[:, :3], prob.comms, numer=nn)
    dyn = traj.states @ A.T + u @ B.T
    return (0.5 * np.einsum("ki,ij,kj->k", u, prob.R, u) + prob.a * sinr
            + np.einsum("ki,ki->k", traj.costates, dyn))


def running_cost(traj, prob):
    """Trapezoidal fuel and SINR integrals ``(fuel, sinr)``."""
    nn, _ = prob.numer_tables
    u = traj.controls
    fuel = 0.5 * float(np.trapezoid(np.einsum("ki,ij,kj->k", u, prob.R, u), traj.times))
    sinr = comms.sinr_upper_bound(traj.states[:, :3], prob.comms, numer=nn)
    return fuel, float(np.trapezoid(sinr, traj.times))


def _boundary_converged(lam0, f):
    return np.linalg.norm(f) < BOUNDARY_RTOL * max(1.0, float(np.linalg.norm(lam0)))


def _single_shooting(prob, guess):
    return damped_newton(lambda lam0: shoot(lam0, prob)[0], guess, _boundary_converged)


def _knots(prob, segments):
    n = len(prob.times) - 1
    segments = max(1, min(segments, n))
    return [round(i * n / segments) for i in range(segments + 1)]


def _multiple_shooting(prob, segments, guess):
    knots = _knots(prob, segments)
    nseg = len(knots) - 1
    # initial knot values from a coasting pass, or from however far the guess got
    try:
        _, traj = shoot(guess, prob)
        init_w, init_l = traj.states, traj.costates
    except SatjamError:
        _, traj = shoot(np.zeros(6), replace(prob, a=0.0))
        init_w, init_l = traj.states, np.zeros_like(traj.costates)
    x0 = [guess]
    for k in knots[1:-1]:
        x0.append(np.concatenate([init_w[k], init_l[k]]))
    x0 = np.concatenate(x0)

    def unpack(x):
        starts = [(prob.wT, x[:6])]
        for i in range(nseg - 1):
            z = x[6 + 12 * i : 18 + 12 * i]
            starts.append((z[:6], z[6:]))
        return starts

    def seg_end(i, w, lam):
        states, costates = _segment(w, lam, knots[i], knots[i + 1], prob)
        return np.concatenate([states[-1], costates[-1]])

    def residual_from_ends(x, ends):
        starts = unpack(x)
        res = []
        for i in range(nseg - 1):
            w, lam = starts[i + 1]
            res.append(ends[i] - np.concatenate([w, lam]))
        res.append(ends[-1][6:])
        return np.concatenate(res)

    def fun(x):
        ends = [seg_end(i, w, lam) for i, (w, lam) in enumerate(unpack(x))]
        return residual_from_ends(x, ends)

    def jacobian(x, fx):
        # each segment end depends only on its own start variables
        m = x.shape[0]
        J = np.zeros((m, m))
        for i, (w, lam) in enumerate(unpack(x)):
            if i == 0:
                z = lam.copy()
                cols = slice(0, 6)

                def end(z, w=w):
                    return seg_end(0, w, z)
            else:
                z = np.concatenate([w, lam])
                cols = slice(6 + 12 * (i - 1), 18 + 12 * (i - 1))

                def end(z, i=i):
                    return seg_end(i, z[:6], z[6:])
            block = fd_jacobian(end, z, end(z))
            if i < nseg - 1:
                J[12 * i : 12 * i + 12, cols] = block
            else:
                J[12 * i : 12 * i + 6, cols] = block[6:]
            if i > 0:
                # the previous matching residual subtracts this segment's start
                J[12 * (i - 1) : 12 * i, cols] -= np.eye(12)
        return J

    def converged(x, f):
        lam0 = x[:6]
        return np.linalg.norm(f) < BOUNDARY_RTOL * max(1.0, float(np.linalg.norm(lam0)))

    return damped_newton(fun, x0, converged, jacobian=jacobian)


def solve_cruise(prob, method="auto", segments=10):
    """Solve the stage-2 boundary value problem.

    Parameters
    ----------
    method : {"auto", "single", "multiple"}
        ``auto`` tries single shooting from the coasting costate and falls
        back to multiple shooting over ``segments`` uniform segments.
    """
    guess = np.zeros(6)
    errors = []
    result = None
    used = None
    if method in ("auto", "single"):
        try:
            result = _single_shooting(prob, guess)
            used = "single"
        except SatjamError as exc:
            errors.append(exc)
            if method == "single":
                raise
    if result is None and method in ("auto", "multiple"):
        try:
            result = _multiple_shooting(prob, segments, guess)
            used = "multiple"
        except SatjamError as exc:
            errors.append(exc)
            best = min((e.best_residual for e in errors
                        if getattr(e, "best_residual", None) is not None), default=None)
            raise NoConvergenceError(
                "single and multiple shooting both failed: " + "; ".join(str(e) for e in errors),
                best_residual=best,
            ) from exc
    if result is None:
        raise ValueError(f"unknown method {method!r}")

    lambda0 = result.x[:6]
    lam_end, traj = shoot(lambda0, prob)
    fuel, sinr_int = running_cost(traj, prob)
    cos_theta = comms.reception_angle_cos(traj.states[:, :3])
    dead = int(np.count_nonzero(cos_theta <= 0.0))
    flags = []
    if dead:
        flags.append("dead_zone_samples")
    if used == "multiple":
        flags.append("multiple_shooting")
    return CruiseSolution(
        lambda0=lambda0,
        trajectory=traj,
        terminal_costate_norm=float(np.linalg.norm(lam_end)),
        total_cost=fuel + prob.a * sinr_int,
        fuel_cost=fuel,
        delta_v=delta_v(traj.controls, traj.times, prob.orbit.m),
        hamiltonian_series=hamiltonian(traj, prob),
        method=used,
        iterations=result.iterations,
        dead_zone_samples=dead,
        flags=flags,
    )
