"""Exception hierarchy used across the package."""


class SatjamError(Exception):
    """Base class for all package errors."""


class SingularGeometryError(SatjamError):
    """Relative position has zero norm, so the reception angle is undefined."""


class IntegrationDivergedError(SatjamError):
    """A propagated state or costate became non-finite."""

    def __init__(self, message, time=None):
        super().__init__(message)
        self.time = time


class ProximityError(SatjamError):
    """The jammer came closer to the defender than the collision guard allows."""

    def __init__(self, message, time=None, distance=None):
        super().__init__(message)
        self.time = time
        self.distance = distance


class NoConvergenceError(SatjamError):
    """An iterative solver failed to meet its tolerance."""

    def __init__(self, message, best_residual=None, iterate=None):
        super().__init__(message)
        self.best_residual = best_residual
        self.iterate = iterate


class SingularJacobianError(SatjamError):
    """The Newton Jacobian could not be factorized."""

    def __init__(self, message, iterate=None):
        super().__init__(message)
        self.iterate = iterate


class ConfigError(SatjamError):
    """Invalid scenario configuration. ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
