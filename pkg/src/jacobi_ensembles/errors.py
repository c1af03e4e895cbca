"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A distribution or model parameter is outside its admissible range."""


class DomainError(ValueError):
    """An argument lies outside the domain of a function (e.g. a real z for an m-function)."""


class NumericalError(ArithmeticError):
    """The tridiagonal eigensolver failed to converge.

    Carries the matrix ``size`` and the 1-based ``index`` of the eigenvalue
    that exceeded the iteration cap.
    """

    def __init__(self, message, size=None, index=None):
        super().__init__(message)
        self.size = size
        self.index = index


class UnsupportedEnsembleError(ValueError):
    """An experiment was requested for an ensemble it does not support."""


class ExperimentError(RuntimeError):
    """A Monte Carlo experiment lost too many trials to be trusted."""
