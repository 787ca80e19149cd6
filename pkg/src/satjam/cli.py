"""Command-line interface.

Exit codes: 0 success, 1 validation failure, 2 bad configuration,
3 solver failure, 4 output I/O failure. Command-line flags override the
matching config fields (``--step`` -> ``step_s``, ``--multistart`` ->
``multistart``).
"""

import argparse
import json
import sys
from dataclasses import replace

import numpy as np

from . import comms, output, scenario, validate
from .cruise import solve_cruise
from .errors import ConfigError, SatjamError
from .reposition import solve_reposition

EXIT_OK, EXIT_VALIDATE, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 1, 2, 3, 4


class _Fail(Exception):
    def __init__(self, code, record):
        super().__init__(record.get("message"))
        self.code = code
        self.record = record


def _load_config(args):
    try:
        if args.config is None:
            cfg = scenario.reference_config()
        else:
            cfg = scenario.ScenarioConfig.load(args.config)
        overrides = {}
        if args.step is not None:
            overrides["step_s"] = args.step
        if args.multistart is not None:
            overrides["multistart"] = args.multistart
        return replace(cfg, **overrides) if overrides else cfg
    except ConfigError as exc:
        raise _Fail(EXIT_CONFIG, {"error": "config", "message": str(exc), "field": exc.field})
    except (OSError, TypeError) as exc:
        raise _Fail(EXIT_CONFIG, {"error": "config", "message": str(exc), "field": None})


def _solver_fail(exc, stage=None):
    record = {"error": "solver", "type": type(exc).__name__, "message": str(exc),
              "stage": getattr(exc, "stage", stage)}
    best = getattr(exc, "best_residual", None)
    if best is not None:
        record["best_residual"] = float(best)
    return _Fail(EXIT_SOLVER, record)


def _derived(link, orbit):
    return {"orbital_rate_rad_s": orbit.n, "wavelength_m": link.wavelength,
            "noise_power_w": link.sigma2, "sinr_numerator_w": link.P}


def _stage1_summary(sol):
    return {
        "mu": sol.mu, "p_f_m": sol.p_f, "v_f_m_s": sol.v_f,
        "total_cost": sol.total_cost, "fuel_cost": sol.fuel_cost,
        "terminal_sinr_db": float(comms.to_db(sol.terminal_sinr)),
        "residual_norm": sol.residual_norm, "delta_v_m_s": sol.delta_v,
        "roots": [{"mu": r.mu, "total_cost": r.total_cost} for r in sol.roots],
        "flags": sol.flags,
    }


def _stage2_summary(sol):
    H = sol.hamiltonian_series
    scale = abs(H[0]) if H[0] != 0 else 1.0
    return {
        "lambda0": sol.lambda0, "terminal_costate_norm": sol.terminal_costate_norm,
        "total_cost": sol.total_cost, "fuel_cost": sol.fuel_cost, "delta_v_m_s": sol.delta_v,
        "method": sol.method, "iterations": sol.iterations,
        "hamiltonian_rel_drift": float(np.max(np.abs(H - H[0])) / scale),
        "dead_zone_samples": sol.dead_zone_samples, "flags": sol.flags,
    }


def _write(out_dir, times, states, controls, stage, link, summary):
    try:
        output.write_bundle(out_dir, times, states, controls, stage,
                            scenario.link_series(states, link), summary)
    except OSError as exc:
        raise _Fail(EXIT_IO, {"error": "io", "message": str(exc), "path": out_dir})


def cmd_mission(args):
    cfg = _load_config(args)
    try:
        report = scenario.run_mission(cfg)
    except SatjamError as exc:
        raise _solver_fail(exc)
    prob, _ = scenario.build_problems(cfg)
    window = report.sinr_db_series[report.window]
    gain_change, loss_change = scenario.jamming_decomposition(report)
    summary = {
        "command": "mission",
        "config": cfg.to_dict(),
        "derived": _derived(prob.comms, prob.orbit),
        "stage1": _stage1_summary(report.stage1),
        "stage2": _stage2_summary(report.stage2),
        "total_delta_v_m_s": report.total_delta_v,
        "min_sinr_db_window": float(window.min()),
        "max_sinr_db_window": float(window.max()),
        "jamming_gain_change_db": gain_change,
        "jamming_path_loss_change_db": loss_change,
        "flags": report.flags,
    }
    _write(args.out, report.times, report.states, report.controls, report.stage, prob.comms, summary)
    if not args.quiet:
        print(f"delta-v {report.total_delta_v:.6g} m/s; window SINR bound "
              f"{window.min():.3f} .. {window.max():.3f} dB; outputs in {args.out}")
    return EXIT_OK


def cmd_stage(args):
    cfg = _load_config(args)
    prob1, make_cruise = scenario.build_problems(cfg)
    if args.stage == "reposition":
        try:
            sol = solve_reposition(prob1, multistart=cfg.multistart)
        except SatjamError as exc:
            raise _solver_fail(exc, "reposition")
        traj = sol.trajectory
        stage = np.ones(len(traj.times), dtype=int)
        details = {"stage1": _stage1_summary(sol)}
    else:
        try:
            sol = solve_cruise(make_cruise(cfg.initial_state))
        except SatjamError as exc:
            raise _solver_fail(exc, "cruise")
        traj = sol.trajectory
        stage = np.full(len(traj.times), 2)
        details = {"stage2": _stage2_summary(sol)}
    summary = {"command": f"stage {args.stage}", "config": cfg.to_dict(),
               "derived": _derived(prob1.comms, prob1.orbit), **details,
               "total_delta_v_m_s": sol.delta_v}
    _write(args.out, traj.times, traj.states, traj.controls, stage, prob1.comms, summary)
    if not args.quiet:
        print(f"{args.stage}: delta-v {sol.delta_v:.6g} m/s; outputs in {args.out}")
    return EXIT_OK


def cmd_validate(args):
    ok = validate.run_checks(out=(lambda *a: None) if args.quiet else print)
    return EXIT_OK if ok else EXIT_VALIDATE


def build_parser():
    parser = argparse.ArgumentParser(prog="satjam", description="Fuel-optimal jamming maneuvers on CW dynamics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="scenario JSON (default: bundled reference scenario)")
        p.add_argument("--out", default="satjam-out", help="output directory")
        p.add_argument("--step", type=float, help="integrator step in seconds (overrides step_s)")
        p.add_argument("--multistart", type=int, help="multi-start magnitudes (overrides multistart)")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("mission", help="run both stages")
    common(p)
    p.set_defaults(func=cmd_mission)
    p = sub.add_parser("stage", help="run one stage; cruise starts from the config's initial state at T_s")
    p.add_argument("stage", choices=["reposition", "cruise"])
    common(p)
    p.set_defaults(func=cmd_stage)
    p = sub.add_parser("validate", help="run the built-in oracle checks")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Fail as fail:
        print(json.dumps(fail.record, default=str), file=sys.stderr)
        return fail.code


if __name__ == "__main__":
    sys.exit(main())
