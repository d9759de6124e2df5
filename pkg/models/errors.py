# ============================================
# FILE: models/errors.py
# ============================================


class HelicalError(Exception):
    """Base class for every error raised by the solver and its checks."""


class DomainError(HelicalError, ValueError):
    """Input outside the domain of an operation (negative rho, off-sphere point, ...)."""


class ShapeMismatchError(HelicalError, ValueError):
    pass


class GridResolutionError(HelicalError):
    """Requested grid cannot satisfy the resolution invariants."""


class ConjugateSymmetryError(HelicalError):
    pass


class IncompatibleDataError(HelicalError):
    """Source and boundary data violate the integral compatibility condition."""

    def __init__(self, message, residual=None, threshold=None, report=None):
        super().__init__(message)
        self.residual = residual
        self.threshold = threshold
        self.report = report


class SingularSystemError(HelicalError):
    def __init__(self, message, condition_estimate=None, report=None):
        super().__init__(message)
        self.condition_estimate = condition_estimate
        self.report = report


class ConvergenceError(HelicalError):
    """An iterative method stopped before reaching its tolerance."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class UnknownSuiteError(HelicalError, ValueError):
    pass


class ConfigError(HelicalError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
