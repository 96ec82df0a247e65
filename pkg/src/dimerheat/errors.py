"""Exception types shared across the package."""


class DimerHeatError(Exception):
    """Base class for package errors."""


class BasisMismatchError(DimerHeatError, ValueError):
    """Operands are expressed in different Fock bases."""


class ToleranceError(DimerHeatError, RuntimeError):
    """A numerical invariant was violated beyond its tolerance.

    ``time`` is set when the failure is tied to a point of a trajectory.
    """

    def __init__(self, message, *, time=None, value=None):
        if time is not None:
            message = f"{message} at t = {time:.6g}"
        super().__init__(message)
        self.time = time
        self.value = value


class ConfigError(DimerHeatError, ValueError):
    """Invalid scenario configuration; ``field`` names the offending key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
