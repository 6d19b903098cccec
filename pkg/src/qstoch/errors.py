"""Exception types shared across the package."""


class QstochError(Exception):
    """Base class for all package-specific errors."""


class DomainError(QstochError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class DegenerateDistributionError(QstochError, ValueError):
    """A distribution collapsed to all-zero weights."""


class GridMismatchError(QstochError, ValueError):
    """Curves or paths do not share a common time grid."""


class StepSizeError(QstochError, ValueError):
    """The time step is too coarse for the requested integration."""


class FactorizationError(QstochError, RuntimeError):
    """Covariance factorization failed even after regularization."""


class QuadratureError(QstochError, RuntimeError):
    """A quadrature did not converge to the requested tolerance."""


class SolverError(QstochError, RuntimeError):
    """A deterministic solver failed (singular step, divergence)."""


class InversionError(QstochError, RuntimeError):
    """Numerical Laplace inversion did not converge across contour sizes."""


class ConfigError(QstochError, ValueError):
    """An experiment configuration is malformed."""
