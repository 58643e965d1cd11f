"""Exception hierarchy shared across the package."""


class HeuristicsError(Exception):
    """Base class for all package errors."""


class DomainError(HeuristicsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class DegeneratePriorError(DomainError):
    """A Bayes estimate was requested from a posterior with zero precision."""


class DegenerateEvidenceError(DomainError):
    """Every state in the grid has zero likelihood."""


class PreconditionError(HeuristicsError, ValueError):
    """A structural precondition (e.g. strong connectivity) does not hold."""


class NumericalError(HeuristicsError, ArithmeticError):
    """An iterative method failed to converge or produced non-finite output."""


class ValidationError(HeuristicsError, ValueError):
    """A scenario file is malformed or violates an invariant.

    ``field`` names the offending location, e.g. ``agents[2].sigma``.
    """

    def __init__(self, message, field=None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
