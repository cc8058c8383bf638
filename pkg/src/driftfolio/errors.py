"""Exception types used across the package."""


class DriftfolioError(Exception):
    """Base class for all package errors."""


class ValidationError(DriftfolioError, ValueError):
    """An input violates a documented precondition."""


class SpecError(ValidationError):
    """A problem-spec file failed validation. Carries the offending field path."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class SingularGeometryError(DriftfolioError):
    """The reduced covariance D sigma sigma^T D^T is not invertible."""


class NotPositiveDefiniteError(DriftfolioError):
    """A matrix required to be symmetric positive definite is not."""


class DegenerateSpectrumError(DriftfolioError):
    """More than one eigenvalue of tau^T A tau is numerically zero."""


class KernelMismatchError(DriftfolioError):
    """The smallest eigenvalue of tau^T A tau is not numerically zero."""


class ConvergenceError(DriftfolioError):
    """An iterative routine failed to converge within its iteration budget."""


class DegenerateDirectionError(ValidationError):
    """Worst-case drift requested for the zero strategy direction."""


class UtilityRangeError(ValidationError):
    """A value lies outside the range of the utility function being inverted."""


class InternalConsistencyError(DriftfolioError):
    """Two closed-form representations of the same quantity disagree."""
