"""Exception types shared across the package."""


class PsyslabError(Exception):
    """Base class for package-specific errors."""


class DomainError(PsyslabError, ValueError):
    """Argument lies outside the mathematical domain of an operation."""


class BlowUpError(PsyslabError, ArithmeticError):
    """Riccati denominator reached zero: gradient catastrophe at or
    before the accumulated integral."""


class LengthMismatch(PsyslabError, ValueError):
    """Sample array length does not match the grid size."""


class NonFiniteState(PsyslabError, FloatingPointError):
    """A time step produced NaN or Inf entries."""


class EllipticStart(PsyslabError, ValueError):
    """Characteristic tracing was started where u >= 0."""


class WindowTooShort(PsyslabError, ValueError):
    """Trajectory has too few snapshots for tracing."""


class ConfigError(PsyslabError, ValueError):
    """Invalid configuration file, key, or value."""
