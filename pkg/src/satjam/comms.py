"""Uplink SINR upper bound seen by the defender as a function of jammer position.

All functions accept a single position of shape ``(3,)`` or a stack of shape
``(..., 3)`` and broadcast over the leading axes.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularGeometryError

SPEED_OF_LIGHT = 299792458.0  # m/s
BOLTZMANN = 1.380649e-23  # J/K


class AntennaPattern:
    """Defender reception gain as a function of ``cos(theta)``.

    Subclasses provide ``gain(c)`` and ``combined_derivative(c)``, the latter
    being ``G'(theta) / sin(theta)`` written so it stays finite at
    ``c = +-1``. Both must accept arrays.
    """

    peak_gain = 1.0

    def gain(self, c):
        raise NotImplementedError

    def combined_derivative(self, c):
        raise NotImplementedError


class CosinePowerPattern(AntennaPattern):
    """``G = peak * cos(theta)**exponent`` in the front hemisphere, zero behind.

    With ``exponent=2`` and ``peak=1e4`` this is the nadir antenna of the
    reference scenario.
    """

    def __init__(self, peak_gain=1.0e4, exponent=2.0):
        if peak_gain <= 0:
            raise ValueError("peak_gain must be positive")
        if exponent < 1:
            raise ValueError("exponent below 1 makes the gradient unbounded at the rim")
        self.peak_gain = float(peak_gain)
        self.exponent = float(exponent)

    def __repr__(self):
        return f"CosinePowerPattern(peak_gain={self.peak_gain!r}, exponent={self.exponent!r})"

    def gain(self, c):
        c = np.asarray(c, dtype=float)
        front = np.where(c > 0.0, c, 0.0)
        return np.where(c > 0.0, self.peak_gain * front**self.exponent, 0.0)

    def combined_derivative(self, c):
        # d/dtheta of peak*cos^k divided by sin(theta): -k*peak*cos^(k-1)
        c = np.asarray(c, dtype=float)
        front = np.where(c > 0.0, c, 0.0)
        return np.where(c > 0.0, -self.exponent * self.peak_gain * front ** (self.exponent - 1.0), 0.0)


@dataclass(frozen=True)
class CommsParams:
    """Link parameters of the jamming geometry.

    Attributes
    ----------
    P_a : float
        Jammer transmit power (W).
    G_a : float
        Jammer transmit gain.
    P : float
        Upper bound on the friendly received-power numerator (W).
    sigma2 : float
        Receiver noise power (W).
    wavelength : float
        Carrier wavelength (m).
    pattern : AntennaPattern
        Defender reception pattern.
    """

    P_a: float
    G_a: float
    P: float
    sigma2: float
    wavelength: float
    pattern: AntennaPattern = field(default_factory=CosinePowerPattern)

    def __post_init__(self):
        for name in ("P_a", "G_a", "P", "sigma2", "wavelength"):
            value = getattr(self, name)
            if not (np.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive, got {value}")

    @property
    def fspl_coef(self):
        """``(wavelength / 4 pi)**2``."""
        return (self.wavelength / (4.0 * np.pi)) ** 2


def wavelength(frequency):
    if frequency <= 0:
        raise ValueError("frequency must be positive")
    return SPEED_OF_LIGHT / frequency


def noise_power(temperature, bandwidth):
    """Thermal noise power ``k_B T B`` in watts."""
    if not temperature > 0:
        raise ValueError("noise temperature must be positive")
    if not bandwidth > 0:
        raise ValueError("bandwidth must be positive")
    return BOLTZMANN * temperature * bandwidth


def to_db(x):
    """``10 log10(x)``; zero maps to ``-inf`` without a warning."""
    with np.errstate(divide="ignore"):
        return 10.0 * np.log10(x)


def _norm(p):
    p = np.asarray(p, dtype=float)
    r = np.linalg.norm(p, axis=-1)
    if np.any(r == 0.0):
        raise SingularGeometryError("reception angle undefined at zero separation")
    return p, r


def reception_angle_cos(p):
    """Cosine of the angle between the nadir boresight (-x) and the jammer direction."""
    p, r = _norm(p)
    return -p[..., 0] / r


def free_space_path_loss(distance, wavelength):
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise ValueError("distance must be positive")
    return (wavelength / (4.0 * np.pi * distance)) ** 2


def jammer_channel(p, params):
    """Jamming channel gain: jammer gain times reception gain times path loss."""
    p, r = _norm(p)
    c = -p[..., 0] / r
    return params.G_a * params.pattern.gain(c) * free_space_path_loss(r, params.wavelength)


def sinr_upper_bound(p, params, numer=None):
    """``numer / (P_a H_a(p) + sigma2)``; ``numer`` defaults to ``params.P``."""
    numer = params.P if numer is None else numer
    return numer / (params.P_a * jammer_channel(p, params) + params.sigma2)


def sinr_gradient(p, params, scale=1.0, numer=None):
    """Gradient of :func:`sinr_upper_bound` with respect to position, times ``scale``.

    Built from closed-form pieces: the path-loss gradient, the pattern's
    combined derivative and the gradient of ``cos(theta)``. The ``1/sin``
    factor never appears, so boresight is regular.
    """
    numer = params.P if numer is None else numer
    p, r = _norm(p)
    x = p[..., 0]
    c = -x / r
    gain = params.pattern.gain(c)
    comb = params.pattern.combined_derivative(c)
    fc = params.fspl_coef
    loss = fc / r**2
    pa_ga = params.P_a * params.G_a
    denom = pa_ga * gain * loss + params.sigma2
    coef = scale * numer * pa_ga / denom**2

    r3 = r**3
    dcos = p * (x / r3)[..., None]
    dcos[..., 0] -= 1.0 / r
    path_term = (2.0 * fc * gain / r**4)[..., None] * p
    return np.asarray(coef)[..., None] * (path_term + np.asarray(loss * comb)[..., None] * dcos)


def link_components(p, params):
    """Per-position ``(cos_theta, reception gain, path loss, distance)``."""
    p, r = _norm(p)
    c = -p[..., 0] / r
    return c, params.pattern.gain(c), free_space_path_loss(r, params.wavelength), r
