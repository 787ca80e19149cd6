"""Built-in oracle suite behind ``satjam validate``."""

import time

import numpy as np

from . import comms, cruise, dynamics, oracles, reposition, scenario


def check_gradient(points=200, seed=0):
    link = scenario.comms_params(scenario.reference_config())
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        r = rng.uniform(1e3, 1e5)
        c = rng.uniform(0.05, 0.95)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        s = np.sqrt(1.0 - c * c)
        p = r * np.array([-c, s * np.cos(phi), s * np.sin(phi)])
        g = comms.sinr_gradient(p, link)
        ref = oracles.fd_sinr_gradient(p, link)
        worst = max(worst, np.linalg.norm(g - ref) / np.linalg.norm(ref))
    return worst < 1e-6, f"max rel err {worst:.2e} over {points} points"


def check_boresight():
    link = scenario.comms_params(scenario.reference_config())
    g0 = comms.sinr_gradient(np.array([-15e3, 0.0, 0.0]), link)
    g1 = comms.sinr_gradient(np.array([-15e3, 1e-4, 0.0]), link)
    ok = np.all(np.isfinite(g0)) and np.linalg.norm(g0 - g1) <= 1e-6 * np.linalg.norm(g0)
    return ok, f"|g0 - g(1e-4 m off axis)| / |g0| = {np.linalg.norm(g0 - g1) / np.linalg.norm(g0):.1e}"


def check_gramian():
    cfg = scenario.reference_config()
    orbit = scenario.orbit_params(cfg)
    R = np.eye(3) * 1000.0 / cfg.T_s
    W = dynamics.weighted_gramian(cfg.T_s, R, orbit)
    Wq = oracles.quadrature_gramian(cfg.T_s, R, orbit)
    err = np.linalg.norm(W - Wq) / np.linalg.norm(Wq)
    return err < 1e-8, f"Van Loan vs quadrature rel Frobenius err {err:.2e}"


def check_stm():
    cfg = scenario.reference_config()
    orbit = scenario.orbit_params(cfg)
    period = 2.0 * np.pi / orbit.n
    worst = 0.0
    for i in range(6):
        w0 = np.eye(6)[i] * (1000.0 if i < 3 else 1.0)
        exact = dynamics.state_transition(period, orbit) @ w0
        traj = dynamics.propagate(w0, None, 0.0, period, 1.0, orbit)
        worst = max(worst, np.linalg.norm(traj.states[-1] - exact) / np.linalg.norm(exact))
    return worst < 1e-6, f"STM vs RK4 over one orbit, max rel err {worst:.2e}"


def check_reposition():
    cfg = scenario.reference_config()
    prob, _ = scenario.build_problems(cfg)
    sol = reposition.solve_reposition(prob, multistart=cfg.multistart)
    res = np.linalg.norm(reposition.terminal_costate_residual(sol.mu, prob))
    end = sol.trajectory.states[-1]
    w_f = np.concatenate([sol.p_f, sol.v_f])
    end_err = np.linalg.norm(end - w_f) / np.linalg.norm(w_f)
    ok = res < 1e-8 * (1.0 + np.linalg.norm(sol.mu)) and end_err < 1e-5
    return ok, f"residual {res:.1e}, endpoint rel err {end_err:.1e}"


def check_cruise():
    cfg = scenario.reference_config()
    prob1, make = scenario.build_problems(cfg)
    sol1 = reposition.solve_reposition(prob1, multistart=cfg.multistart)
    sol = cruise.solve_cruise(make(sol1.trajectory.states[-1]))
    bnd = sol.terminal_costate_norm / max(1.0, np.linalg.norm(sol.lambda0))
    H = sol.hamiltonian_series
    drift = np.max(np.abs(H - H[0])) / abs(H[0])
    return bnd < 1e-6 and drift < 1e-5, f"|lambda(T')| rel {bnd:.1e}, Hamiltonian drift {drift:.1e}"


CHECKS = [
    ("sinr gradient vs finite differences", check_gradient),
    ("boresight gradient regularity", check_boresight),
    ("Gramian vs quadrature", check_gramian),
    ("CW STM vs RK4 free drift", check_stm),
    ("repositioning costate residual", check_reposition),
    ("cruise boundary + Hamiltonian", check_cruise),
]


def run_checks(out=print):
    """Run every check, print a table and return ``True`` when all pass."""
    all_ok = True
    for name, fn in CHECKS:
        start = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failing check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        all_ok &= bool(ok)
        out(f"{'PASS' if ok else 'FAIL'}  {name:<38} {elapsed:6.2f}s  {detail}")
    return all_ok
