"""Compare the compiled and pure-Python kernels.

Usage::

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times the forced RK4 propagation, the coupled state/costate flow over the
reference window, and a full cruise solve with each backend swapped in.
"""

import argparse
import timeit

import numpy as np

from satjam import _kernels_py, cruise, dynamics, kernels, scenario

try:
    from satjam import _kernels as _compiled
except ImportError:
    _compiled = None


def _setup():
    cfg = scenario.reference_config()
    prob1, factory = scenario.build_problems(cfg)
    report = scenario.run_mission(cfg)
    prob2 = factory(report.stage1.trajectory.states[-1])
    return prob1, prob2, report.stage2.lambda0


def _cases(impl, prob1, prob2, lambda0):
    A, B = prob1.matrices
    times = dynamics.time_grid(0.0, prob1.T, prob1.step)
    rng = np.random.default_rng(0)
    un = rng.normal(size=(len(times), 3)) * 1e-3
    um = rng.normal(size=(len(times) - 1, 3)) * 1e-3
    link = prob2.comms
    nn, nm = prob2.numer_tables
    flow_args = (A, B, np.linalg.inv(prob2.R), prob2.wT, lambda0, prob2.times, prob2.a, nn, nm,
                 link.P_a * link.G_a, link.sigma2, link.fspl_coef, link.pattern.peak_gain,
                 link.pattern.exponent, prob2.min_distance)

    def solve():
        saved = kernels.costate_flow
        kernels.costate_flow = impl.costate_flow
        try:
            cruise.solve_cruise(prob2)
        finally:
            kernels.costate_flow = saved

    return {
        "rk4_forced (3000 steps)": lambda: impl.rk4_forced(A, B, prob1.w0, times, un, um),
        "costate_flow (600 steps)": lambda: impl.costate_flow(*flow_args),
        "solve_cruise": solve,
    }


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    prob1, prob2, lambda0 = _setup()
    backends = {"python": _kernels_py}
    if _compiled is not None:
        backends["compiled"] = _compiled
    results = {}
    for name, impl in backends.items():
        for case, fn in _cases(impl, prob1, prob2, lambda0).items():
            number = 1 if name == "python" else 10
            best = min(timeit.repeat(fn, number=number, repeat=args.repeat)) / number
            results[(case, name)] = best

    print(f"{'case':<28}{'python [ms]':>14}{'compiled [ms]':>16}{'speedup':>10}")
    for case in _cases(_kernels_py, prob1, prob2, lambda0):
        py = results[(case, "python")]
        comp = results.get((case, "compiled"))
        if comp is None:
            print(f"{case:<28}{py * 1e3:>14.3f}{'n/a':>16}{'':>10}")
        else:
            print(f"{case:<28}{py * 1e3:>14.3f}{comp * 1e3:>16.3f}{py / comp:>9.1f}x")


if __name__ == "__main__":
    main()
