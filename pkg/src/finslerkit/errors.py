"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: hypothesis problems exit with 2,
numerical failures with 3.
"""


class FinslerError(Exception):
    """Base class for all library errors."""


class UsageError(FinslerError):
    """Bad configuration or arguments."""


class UnsupportedOrderError(FinslerError, ValueError):
    pass


class DomainError(FinslerError, ValueError):
    pass


class StrongConvexityError(FinslerError):
    def __init__(self, message, x=None, y=None):
        super().__init__(message)
        self.x = x
        self.y = y


class NumericalError(FinslerError):
    """Base for failures of an iterative or integrating routine."""


class NonConvergenceError(NumericalError):
    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ChartExitError(NumericalError):
    def __init__(self, message, exit_time=None):
        super().__init__(message)
        self.exit_time = exit_time


class ConjugatePointError(NumericalError):
    def __init__(self, message, radius=None):
        super().__init__(message)
        self.radius = radius


class DegenerateGradientError(FinslerError):
    pass


class DegenerateFlagError(FinslerError, ValueError):
    pass


class HypothesisError(FinslerError):
    """A theorem hypothesis is not certified for the metric at hand."""
