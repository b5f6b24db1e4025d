"""Exception types shared across the package."""


class PathSensError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(PathSensError, ValueError):
    """Raised for coincident atoms or non-positive distances."""


class SingularAngleError(InvalidGeometryError):
    """Raised when a bond angle is colinear (0 or pi)."""


class ConfigurationError(PathSensError, ValueError):
    """Invalid configuration; ``field`` names the offending key path when known."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None:
            message = f"{field}: {message}"
        super().__init__(message)


class DivergenceError(PathSensError, FloatingPointError):
    """Non-finite state produced by the integrator."""

    def __init__(self, step, message="non-finite state", diagnostics=None):
        self.step = step
        self.diagnostics = dict(diagnostics or {})
        extra = ", ".join(f"{k}={v:.4g}" for k, v in self.diagnostics.items())
        super().__init__(f"step {step}: {message}" + (f" ({extra})" if extra else ""))


class ContractError(PathSensError, ValueError):
    """Mismatched shapes or violated preconditions between components."""


class DomainError(PathSensError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class EstimationError(PathSensError, ValueError):
    """Not enough data for a requested estimate."""
