"""Exception types shared across the package."""


class QMeasureError(Exception):
    """Base class for all package-specific errors."""


class ZeroMatrix(QMeasureError):
    """Matrix has (numerically) zero norm and cannot be projected."""


class ZeroSum(QMeasureError):
    """Nonnegative values sum to zero and cannot be rescaled."""


class DimensionMismatch(QMeasureError):
    """Input has the wrong dimension for the requested operation."""


class NonConvergence(QMeasureError):
    """An iterative solver failed or left an unacceptable residual."""


class EfficiencyFailure(QMeasureError):
    """Rejection sampler acceptance rate dropped below the viability floor."""


class DomainError(QMeasureError):
    """Argument lies outside the mathematical domain of the function."""


class QuadratureFailure(QMeasureError):
    """Numerical integration did not reach the requested accuracy."""


class InsufficientData(QMeasureError):
    """Too few samples (or expected counts) for a meaningful statistic."""
