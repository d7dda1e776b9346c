"""Exception hierarchy.

Errors are grouped so the command line can map them onto exit codes:
configuration problems, bad input data, and numerical failures.
"""


class QGaussError(Exception):
    """Base class for all package errors."""


class ConfigError(QGaussError, ValueError):
    pass


class DataError(QGaussError, ValueError):
    """Unparseable or invalid input data (prices, CPI, samples)."""


class DomainError(QGaussError, ValueError):
    """Argument outside the domain where a formula is defined."""


class NumericalError(QGaussError, ArithmeticError):
    pass


class DivergenceError(NumericalError):
    """A moment that does not exist for the requested parameters."""


class NoRootError(NumericalError):
    pass


class SingularMatrixError(NumericalError):
    pass


class OptimizationError(NumericalError):
    pass


class DegenerateSampleError(DataError):
    """Zero-variance sample or price series."""


class InsufficientSamplesError(DataError):
    pass
