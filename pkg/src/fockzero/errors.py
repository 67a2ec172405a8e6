"""Exception types shared across the package."""


class FockzeroError(Exception):
    """Base class for all package-specific errors."""


class TruncationNotConverged(FockzeroError):
    """Adaptive truncation exhausted its doubling budget above tolerance."""

    def __init__(self, message, last_change=None, tol=None, m_final=None):
        super().__init__(message)
        self.last_change = last_change
        self.tol = tol
        self.m_final = m_final


class DomainPole(FockzeroError):
    """Evaluation point sits on (or numerically on) a pole of the product."""


class QuadratureUnderResolved(UserWarning):
    """Advisory: a 2x-refined quadrature moved an annulus mass by > 5%."""


class InsufficientAnnuli(FockzeroError):
    """Growth-exponent fit needs at least three annuli beyond the fit radius."""


class InsufficientRadii(FockzeroError):
    """Density extrapolation needs at least three radii."""


class ConfigError(FockzeroError):
    """Invalid run configuration (CLI exit code 2)."""
