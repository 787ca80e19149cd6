"""CSV and JSON output bundle.

Column mapping to the usual plots: ``trajectory.csv`` x/y/z give the
relative path, all state and thrust columns give the state and control
histories; ``comms.csv`` sinr_db gives the uplink SINR bound, gain_db and
path_loss_db give the channel factors.
"""

import csv
import json
import math
import os

import numpy as np

from . import kernels

SCHEMA_VERSION = 1
TRAJECTORY_HEADER = ["t", "x", "y", "z", "vx", "vy", "vz", "ux", "uy", "uz", "stage"]
COMMS_HEADER = ["t", "sinr_db", "gain_db", "path_loss_db", "distance_m", "angle_deg"]
STAGE_NAMES = {1: "reposition", 2: "cruise"}


def fmt(x):
    return "%.17g" % x


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_trajectory(path, times, states, controls, stage_names):
    rows = (
        [fmt(t), *map(fmt, w), *map(fmt, u), name]
        for t, w, u, name in zip(times, states, controls, stage_names)
    )
    _write_csv(path, TRAJECTORY_HEADER, rows)


def write_comms(path, times, sinr_db, gain_db, loss_db, dist, angle):
    rows = ([fmt(v) for v in row] for row in zip(times, sinr_db, gain_db, loss_db, dist, angle))
    _write_csv(path, COMMS_HEADER, rows)


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        return x if math.isfinite(x) else str(x)
    if isinstance(x, np.integer):
        return int(x)
    return x


def write_summary(path, summary):
    with open(path, "w") as fh:
        json.dump(_jsonable(summary), fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_bundle(out_dir, times, states, controls, stage, link_series, summary):
    """Write ``trajectory.csv``, ``comms.csv`` and ``summary.json`` into ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    sinr_db, gain_db, loss_db, dist, angle = link_series
    names = [STAGE_NAMES[int(s)] for s in stage]
    write_trajectory(os.path.join(out_dir, "trajectory.csv"), times, states, controls, names)
    write_comms(os.path.join(out_dir, "comms.csv"), times, sinr_db, gain_db, loss_db, dist, angle)
    summary = {"schema_version": SCHEMA_VERSION, "kernel_backend": kernels.BACKEND, **summary}
    write_summary(os.path.join(out_dir, "summary.json"), summary)
