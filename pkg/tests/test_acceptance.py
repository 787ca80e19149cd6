"""Acceptance gate for the reference scenario and the numerical oracles.

Each test records a PASS/FAIL line shown in the "acceptance criteria"
section of the pytest summary. Run with ``pytest tests/test_acceptance.py``.
"""

import time
from dataclasses import replace

import numpy as np
import pytest

from satjam import cli, comms, dynamics, oracles, reposition, scenario


@pytest.mark.criterion(1, "window SINR bound below 0 dB, runtime < 60 s")
def test_jamming_effectiveness(cfg, criterion):
    start = time.perf_counter()
    report = scenario.run_mission(cfg)
    elapsed = time.perf_counter() - start
    window = report.sinr_db_series[report.window]
    t = report.times[report.window]
    above = t[window >= 0.0]
    detail = (f"max {window.max():+.4f} dB at t={t[np.argmax(window)]:.0f} s, "
              f"{above.size} of {t.size} samples >= 0 dB"
              + (f" (t in [{above.min():.0f}, {above.max():.0f}] s)" if above.size else "")
              + f", runtime {elapsed:.2f} s")
    ok = criterion(window.max() < 0.0 and elapsed < 60.0, detail)
    assert ok, detail


@pytest.mark.criterion(2, "stage-1 end in front of antenna, final distance within factor 2")
def test_geometry(report, criterion):
    p_T = report.stage1.p_f
    cos_T = float(comms.reception_angle_cos(p_T))
    d0 = np.linalg.norm(report.states[0, :3])
    d_end = np.linalg.norm(report.states[-1, :3])
    ratio = d_end / d0
    detail = f"cos(theta(T)) = {cos_T:.4f}, |p(T')|/|p(0)| = {ratio:.4f}"
    ok = criterion(cos_T > 0 and 0.5 <= ratio <= 2.0, detail)
    assert ok, detail


@pytest.mark.criterion(3, "gain factor dominates path loss in the jamming-channel change")
def test_jamming_mechanism(report, link, criterion):
    gain_db, loss_db = scenario.jamming_decomposition(report)
    k = int(np.argmax(report.stage == 2))
    h0, hT = (comms.jammer_channel(report.states[i, :3], link) for i in (0, k))
    detail = f"gain change {gain_db:+.4f} dB, path-loss change {loss_db:+.4f} dB, H_a {h0:.3e} -> {hT:.3e}"
    ok = criterion(hT > h0 and gain_db > loss_db, detail)
    assert ok, detail


@pytest.mark.criterion(4, "SINR gradient vs central differences at 1000 points")
def test_gradient_oracle(link, criterion):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(1000):
        r = rng.uniform(1e3, 1e5)
        c = rng.uniform(0.05, 0.95)
        phi = rng.uniform(0.0, 2.0 * np.pi)
        s = np.sqrt(1.0 - c * c)
        p = r * np.array([-c, s * np.cos(phi), s * np.sin(phi)])
        g = comms.sinr_gradient(p, link)
        ref = oracles.fd_sinr_gradient(p, link)
        worst = max(worst, np.linalg.norm(g - ref) / np.linalg.norm(ref))
    detail = f"max relative error {worst:.2e}"
    ok = criterion(worst < 1e-6, detail)
    assert ok, detail


@pytest.mark.criterion(5, "stage-1 root residual and endpoint consistency")
def test_reposition_root(report, problems, criterion):
    prob, _ = problems
    sol = report.stage1
    res = np.linalg.norm(reposition.terminal_costate_residual(sol.mu, prob))
    bound = 1e-8 * (1.0 + np.linalg.norm(sol.mu))
    w_f = np.concatenate([sol.p_f, sol.v_f])
    end_err = np.linalg.norm(sol.trajectory.states[-1] - w_f) / np.linalg.norm(w_f)
    detail = f"residual {res:.2e} (bound {bound:.2e}), endpoint rel err {end_err:.2e}"
    ok = criterion(res < bound and end_err < 1e-5, detail)
    assert ok, detail


@pytest.mark.criterion(6, "stage-2 boundary residual and Hamiltonian drift")
def test_cruise_bvp(report, criterion):
    sol = report.stage2
    lam_T = sol.trajectory.costates[0]
    bnd = sol.terminal_costate_norm
    bound = 1e-6 * max(1.0, np.linalg.norm(lam_T))
    H = sol.hamiltonian_series
    drift = np.max(np.abs(H - H[0])) / abs(H[0])
    detail = f"|lambda(T')| {bnd:.2e} (bound {bound:.2e}), Hamiltonian drift {drift:.2e}"
    ok = criterion(bnd < bound and drift < 1e-5, detail)
    assert ok, detail


@pytest.mark.criterion(7, "direct transcription (30 intervals) not cheaper than indirect solution")
def test_optimality_cross_check(report, problems, criterion):
    prob1, factory = problems
    prob2 = factory(report.stage1.trajectory.states[-1])
    dt1 = oracles.direct_transcription(prob1.w0, 0.0, prob1.T, prob1.R, prob1.orbit, prob1.comms,
                                       terminal_weight=prob1.a, intervals=30)
    dt2 = oracles.direct_transcription(prob2.wT, prob2.T, prob2.T_end, prob2.R, prob2.orbit, prob2.comms,
                                       running_weight=prob2.a, intervals=30)
    j1, j2 = report.stage1.total_cost, report.stage2.total_cost
    passed = dt1.cost >= 0.99 * j1 and dt2.cost >= 0.99 * j2
    detail = (f"stage 1 DT {dt1.cost:.6f} vs {j1:.6f}; "
              f"stage 2 DT {dt2.cost:.6f} vs {j2:.6f}")
    ok = criterion(passed, detail)
    assert ok, detail


@pytest.mark.criterion(8, "Gramian vs quadrature, CW STM vs RK4 over one orbit")
def test_dynamics_oracles(cfg, orbit, criterion):
    R = np.eye(3) * 1000.0 / cfg.T_s
    W = dynamics.weighted_gramian(cfg.T_s, R, orbit)
    Wq = oracles.quadrature_gramian(cfg.T_s, R, orbit)
    gram_err = np.linalg.norm(W - Wq) / np.linalg.norm(Wq)
    period = 2.0 * np.pi / orbit.n
    phi = dynamics.state_transition(period, orbit)
    stm_err = 0.0
    for w0 in (np.eye(6)[i] for i in range(6)):
        ref = oracles.rk4_free_drift(w0, period, orbit, step=1.0)
        stm_err = max(stm_err, np.linalg.norm(phi @ w0 - ref) / np.linalg.norm(ref))
    w0 = cfg.initial_state
    ref = oracles.rk4_free_drift(w0, period, orbit, step=1.0)
    stm_err = max(stm_err, np.linalg.norm(phi @ w0 - ref) / np.linalg.norm(ref))
    detail = f"Gramian rel err {gram_err:.2e}, STM rel err {stm_err:.2e}"
    ok = criterion(gram_err < 1e-8 and stm_err < 1e-6, detail)
    assert ok, detail


@pytest.mark.criterion(9, "zero SINR weights give zero control and zero delta-v")
def test_trivial_reductions(cfg, criterion):
    no_r = scenario.run_mission(replace(cfg, a_r=0.0))
    no_c = scenario.run_mission(replace(cfg, a_c=0.0))
    u1 = no_r.stage1.trajectory.controls
    u2 = no_c.stage2.trajectory.controls
    passed = (not np.any(u1) and no_r.stage1.delta_v == 0.0
              and not np.any(u2) and no_c.stage2.delta_v == 0.0)
    detail = (f"a_r=0: max|u| {np.abs(u1).max():.1e}, dv {no_r.stage1.delta_v:.1e}; "
              f"a_c=0: max|u| {np.abs(u2).max():.1e}, dv {no_c.stage2.delta_v:.1e}")
    ok = criterion(passed, detail)
    assert ok, detail


@pytest.mark.criterion(10, "two runs give byte-identical CSV outputs")
def test_determinism(tmp_path, criterion):
    dirs = [tmp_path / "a", tmp_path / "b"]
    codes = [cli.main(["mission", "--out", str(d), "--quiet"]) for d in dirs]
    same = {name: (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes()
            for name in ("trajectory.csv", "comms.csv")}
    detail = f"exit codes {codes}, identical {same}"
    ok = criterion(codes == [0, 0] and all(same.values()), detail)
    assert ok, detail
