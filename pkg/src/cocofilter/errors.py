"""Exception hierarchy shared across the package."""


class CocoError(Exception):
    """Base class for all package-specific errors."""


class DomainError(CocoError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(CocoError, ValueError):
    """Invalid or unknown configuration input (CLI exit code 2)."""


class MeasureMismatchError(CocoError, ValueError):
    """A posterior built under one measure was combined with another."""


class DegenerateKernelError(CocoError, ValueError):
    """The observation kernel is a point mass (|rho| = 1) and has no density."""


class ConversionTriggeredError(CocoError, ValueError):
    """The fundamental value is at or below the conversion barrier."""


class PosteriorCollapseError(CocoError, ArithmeticError):
    """Observations are numerically incompatible with survival (exit code 3)."""


class OracleStarvationError(CocoError, ArithmeticError):
    """Conditional Monte Carlo acceptance rate too low (exit code 3)."""


class InvariantViolationError(CocoError, AssertionError):
    """A model invariant failed on computed output (CLI exit code 4)."""
