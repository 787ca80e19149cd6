"""Two-stage jamming mission: configuration, problem construction and reporting."""

import json
import math
from dataclasses import asdict, dataclass, field, fields
from importlib import resources

import numpy as np

from . import comms
from .cruise import CruiseProblem, solve_cruise
from .dynamics import OrbitParams, orbital_rate
from .errors import ConfigError, SatjamError
from .reposition import RepositionProblem, delta_v, solve_reposition

# name -> (unit, description); defaults live on ScenarioConfig
SCHEMA = {
    "altitude_km": ("km", "Defender circular-orbit altitude; sets the orbital rate and the numerator bound range."),
    "orbital_rate_rad_s": ("rad/s", "Explicit orbital rate; null derives it from altitude."),
    "mass_kg": ("kg", "Jammer mass, constant."),
    "initial_position_km": ("km", "Jammer position [x, y, z] in the Hill frame at t = 0."),
    "initial_position_m": ("m", "Alternative to initial_position_km; give exactly one."),
    "initial_velocity_m_s": ("m/s", "Jammer velocity [vx, vy, vz] in the Hill frame at t = 0."),
    "frequency_hz": ("Hz", "Carrier frequency; wavelength = c / f."),
    "bandwidth_hz": ("Hz", "Receiver bandwidth for thermal noise."),
    "noise_temperature_k": ("K", "Receiver noise temperature."),
    "jammer_power_w": ("W", "Jammer transmit power."),
    "jammer_gain": ("-", "Jammer transmit antenna gain (linear)."),
    "sender_power_w": ("W", "Ground-station transmit power."),
    "sender_gain": ("-", "Ground-station transmit antenna gain (linear)."),
    "antenna_peak_gain": ("-", "Defender antenna boresight gain (linear)."),
    "antenna_exponent": ("-", "Defender pattern exponent k in peak * cos(theta)^k."),
    "T_s": ("s", "Start of the communication window (end of repositioning)."),
    "Tprime_s": ("s", "End of the communication window."),
    "r_r": ("-", "Repositioning fuel weight, R_r = r_r * I3; null means 1000 / T."),
    "a_r": ("-", "Terminal SINR weight."),
    "r_c": ("-", "Cruise fuel weight, R_c = r_c * I3; null means 1000 / (T' - T)."),
    "a_c": ("-", "Running SINR weight; null means 100 / (T' - T)."),
    "step_s": ("s", "Integrator step and report time grid."),
    "multistart": ("-", "Magnitudes per direction in the repositioning multi-start grid."),
    "min_distance_m": ("m", "Collision guard on the jammer-defender separation."),
}


@dataclass
class ScenarioConfig:
    altitude_km: float = 550.0
    orbital_rate_rad_s: float = None
    mass_kg: float = 300.0
    initial_position_km: list = None
    initial_position_m: list = None
    initial_velocity_m_s: list = field(default_factory=lambda: [0.0, -4.0, 0.0])
    frequency_hz: float = 14.0e9
    bandwidth_hz: float = 500.0e6
    noise_temperature_k: float = 250.0
    jammer_power_w: float = 1.0
    jammer_gain: float = 1.0e3
    sender_power_w: float = 10.0
    sender_gain: float = 1.0e3
    antenna_peak_gain: float = 1.0e4
    antenna_exponent: float = 2.0
    T_s: float = 3000.0
    Tprime_s: float = 3600.0
    r_r: float = None
    a_r: float = 1.0
    r_c: float = None
    a_c: float = None
    step_s: float = 1.0
    multistart: int = 7
    min_distance_m: float = 10.0

    def __post_init__(self):
        if self.initial_position_km is None and self.initial_position_m is None:
            self.initial_position_km = [2.0, -15.0, 0.0]
        self.validate()

    @classmethod
    def from_dict(cls, data):
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(f"unknown field {key!r}", field=key)
        return cls(**data)

    @classmethod
    def load(cls, path):
        try:
            with open(path) as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from exc
        return cls.from_dict(data)

    def to_dict(self):
        return asdict(self)

    def _positive(self, name, allow_none=False):
        value = getattr(self, name)
        if value is None and allow_none:
            return
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name} must be a number", field=name)
        if not (math.isfinite(value) and value > 0):
            raise ConfigError(f"{name} must be positive, got {value}", field=name)

    def _vector(self, name):
        value = getattr(self, name)
        if (not isinstance(value, (list, tuple)) or len(value) != 3
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool)
                           and math.isfinite(v) for v in value)):
            raise ConfigError(f"{name} must be a list of three finite numbers", field=name)
        return np.array(value, dtype=float)

    def validate(self):
        for name in ("altitude_km", "mass_kg", "frequency_hz", "bandwidth_hz", "noise_temperature_k",
                     "jammer_power_w", "jammer_gain", "sender_power_w", "sender_gain",
                     "antenna_peak_gain", "T_s", "Tprime_s", "step_s", "min_distance_m"):
            self._positive(name)
        for name in ("orbital_rate_rad_s", "r_r", "r_c"):
            self._positive(name, allow_none=True)
        for name in ("a_r", "a_c"):
            value = getattr(self, name)
            if value is None and name == "a_c":
                continue
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value >= 0:
                raise ConfigError(f"{name} must be a non-negative number", field=name)
        if not (isinstance(self.antenna_exponent, (int, float)) and self.antenna_exponent >= 1):
            raise ConfigError("antenna_exponent must be at least 1", field="antenna_exponent")
        if isinstance(self.multistart, bool) or not isinstance(self.multistart, int) or self.multistart < 1:
            raise ConfigError("multistart must be a positive integer", field="multistart")
        if not self.Tprime_s > self.T_s:
            raise ConfigError(f"Tprime_s ({self.Tprime_s}) must exceed T_s ({self.T_s})", field="Tprime_s")
        if (self.initial_position_km is None) == (self.initial_position_m is None):
            raise ConfigError("give exactly one of initial_position_km and initial_position_m",
                              field="initial_position_km")
        self._vector("initial_velocity_m_s")
        if np.linalg.norm(self.initial_state[:3]) <= self.min_distance_m:
            raise ConfigError("initial separation inside the collision guard",
                              field="initial_position_km" if self.initial_position_m is None
                              else "initial_position_m")

    @property
    def initial_state(self):
        if self.initial_position_m is not None:
            p = self._vector("initial_position_m")
        else:
            p = self._vector("initial_position_km") * 1000.0
        return np.concatenate([p, self._vector("initial_velocity_m_s")])

    @property
    def weights(self):
        """Resolved ``(r_r, a_r, r_c, a_c)``."""
        window = self.Tprime_s - self.T_s
        r_r = 1000.0 / self.T_s if self.r_r is None else self.r_r
        r_c = 1000.0 / window if self.r_c is None else self.r_c
        a_c = 100.0 / window if self.a_c is None else self.a_c
        return r_r, self.a_r, r_c, a_c


def reference_config_path():
    return resources.files("satjam") / "data" / "reference.json"


def reference_config():
    with resources.as_file(reference_config_path()) as path:
        return ScenarioConfig.load(path)


def orbit_params(cfg):
    n = orbital_rate(cfg.altitude_km * 1000.0) if cfg.orbital_rate_rad_s is None else cfg.orbital_rate_rad_s
    return OrbitParams(n=n, m=cfg.mass_kg)


def comms_params(cfg):
    """Link parameters with the best-case numerator ``P_s G_s G_d(0) L(altitude)``."""
    lam = comms.wavelength(cfg.frequency_hz)
    pattern = comms.CosinePowerPattern(cfg.antenna_peak_gain, cfg.antenna_exponent)
    numer = (cfg.sender_power_w * cfg.sender_gain * float(pattern.gain(1.0))
             * float(comms.free_space_path_loss(cfg.altitude_km * 1000.0, lam)))
    return comms.CommsParams(
        P_a=cfg.jammer_power_w,
        G_a=cfg.jammer_gain,
        P=numer,
        sigma2=comms.noise_power(cfg.noise_temperature_k, cfg.bandwidth_hz),
        wavelength=lam,
        pattern=pattern,
    )


def build_problems(cfg):
    """Return the repositioning problem and a factory ``cruise(wT) -> CruiseProblem``."""
    orbit = orbit_params(cfg)
    link = comms_params(cfg)
    r_r, a_r, r_c, a_c = cfg.weights
    stage1 = RepositionProblem(
        w0=cfg.initial_state, T=cfg.T_s, R=r_r * np.eye(3), a=a_r,
        comms=link, orbit=orbit, step=cfg.step_s,
    )

    def cruise(wT):
        return CruiseProblem(
            wT=wT, T=cfg.T_s, T_end=cfg.Tprime_s, R=r_c * np.eye(3), a=a_c,
            comms=link, orbit=orbit, step=cfg.step_s, min_distance=cfg.min_distance_m,
        )

    return stage1, cruise


@dataclass
class MissionReport:
    """Both stage solutions plus link series on the common time grid.

    ``gain_series`` is the linear reception gain, ``path_loss_series`` is in dB.

    ``stage`` is 1 on ``[0, T)`` and 2 on ``[T, T']``; the sample at ``T`` is
    the handoff state and carries the stage-2 thrust.
    """

    stage1: object
    stage2: object
    times: np.ndarray
    states: np.ndarray
    controls: np.ndarray
    stage: np.ndarray
    sinr_db_series: np.ndarray
    gain_series: np.ndarray
    path_loss_series: np.ndarray
    distance_series: np.ndarray
    angle_series: np.ndarray
    total_delta_v: float
    flags: list

    @property
    def window(self):
        return self.stage == 2

    @property
    def gain_db_series(self):
        return comms.to_db(self.gain_series)


def link_series(states, link):
    """SINR, reception gain and path loss (all dB), distance (m) and angle (deg) per sample."""
    c, gain, loss, dist = comms.link_components(states[:, :3], link)
    sinr = comms.sinr_upper_bound(states[:, :3], link)
    angle = np.degrees(np.arccos(np.clip(c, -1.0, 1.0)))
    return comms.to_db(sinr), comms.to_db(gain), comms.to_db(loss), dist, angle


def assemble(stage1, stage2, link, mass):
    t1, w1, u1 = stage1.trajectory.times, stage1.trajectory.states, stage1.trajectory.controls
    t2, w2, u2 = stage2.trajectory.times, stage2.trajectory.states, stage2.trajectory.controls
    times = np.concatenate([t1[:-1], t2])
    states = np.concatenate([w1[:-1], w2])
    controls = np.concatenate([u1[:-1], u2])
    stage = np.concatenate([np.ones(len(t1) - 1, dtype=int), np.full(len(t2), 2)])
    sinr_db, _, loss_db, dist, angle = link_series(states, link)
    _, gain, _, _ = comms.link_components(states[:, :3], link)
    flags = [f"stage1:{f}" for f in stage1.flags] + [f"stage2:{f}" for f in stage2.flags]
    return MissionReport(
        stage1=stage1, stage2=stage2, times=times, states=states, controls=controls, stage=stage,
        sinr_db_series=sinr_db, gain_series=gain, path_loss_series=loss_db,
        distance_series=dist, angle_series=angle,
        total_delta_v=stage1.delta_v + stage2.delta_v, flags=flags,
    )


def _annotate(exc, stage):
    exc.stage = stage
    return exc


def run_mission(cfg):
    """Reposition over ``[0, T]``, hand off the propagated state, cruise over ``[T, T']``."""
    stage1_problem, cruise = build_problems(cfg)
    try:
        stage1 = solve_reposition(stage1_problem, multistart=cfg.multistart)
    except SatjamError as exc:
        raise _annotate(exc, "reposition")
    try:
        stage2 = solve_cruise(cruise(stage1.trajectory.states[-1]))
    except SatjamError as exc:
        raise _annotate(exc, "cruise")
    return assemble(stage1, stage2, stage1_problem.comms, cfg.mass_kg)


def jamming_decomposition(report):
    """Change (dB) in the reception-gain and path-loss factors of the jamming channel from 0 to T."""
    k = int(np.argmax(report.stage == 2))
    gain_db = report.gain_db_series
    loss_db = report.path_loss_series
    return float(gain_db[k] - gain_db[0]), float(loss_db[k] - loss_db[0])


__all__ = [
    "SCHEMA", "ScenarioConfig", "MissionReport", "build_problems", "run_mission", "delta_v",
    "reference_config", "reference_config_path", "jamming_decomposition", "link_series",
]
