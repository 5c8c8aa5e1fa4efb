"""Exception types shared across the library."""


class RadReactError(Exception):
    """Base class for all library errors."""


class ConfigError(RadReactError):
    """Malformed or incomplete scenario configuration."""


class PhysicsError(RadReactError):
    """A physical precondition was violated (guards, domains, singularities)."""


class VelocityGuardError(PhysicsError):
    """|v| reached the sub-luminal guard band; refusing to continue."""


class InstabilityBoundaryError(PhysicsError):
    """Trap parameters below the stable regime; carries the critical field."""

    def __init__(self, message, critical_field):
        super().__init__(message)
        self.critical_field = critical_field


class RetardedSolveError(PhysicsError):
    """Retarded-time solver failed (observer on the world line, etc.)."""


class StepSizeUnderflowError(PhysicsError):
    """Adaptive integrator could not meet tolerance at the minimum step."""
