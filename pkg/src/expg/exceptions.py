"""Exception types raised by the package."""


class ExpGError(Exception):
    """Base class for package errors."""


class ParameterError(ExpGError, ValueError):
    """A distribution parameter lies outside its domain."""


class DomainError(ExpGError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class DataError(ExpGError, ValueError):
    """Observed data are invalid for the requested family."""

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class UnsupportedOperationError(ExpGError, TypeError):
    """The operation does not apply to this kind of distribution."""


class NonexistentMomentError(ExpGError, ValueError):
    """The requested moment diverges."""


class TruncationError(ExpGError, ArithmeticError):
    """A series did not converge within its term budget.

    ``partial`` holds the value accumulated before giving up.
    """

    def __init__(self, message, partial=None, terms=None):
        super().__init__(message)
        self.partial = partial
        self.terms = terms


class FitError(ExpGError, RuntimeError):
    """Raised when a fit required by another computation failed."""


class QuadratureError(ExpGError, ArithmeticError):
    """A numerical integral failed to converge.

    ``entries`` names the quantities whose integrals failed.
    """

    def __init__(self, message, entries=()):
        super().__init__(message)
        self.entries = tuple(entries)
