"""Exception hierarchy shared by all modules."""


class SCLaguerreError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SCLaguerreError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class PrecisionExhaustedError(SCLaguerreError, ArithmeticError):
    """Working precision was insufficient; the caller must raise digits.

    ``required_digits`` is a suggested precision for a retry, when known.
    """

    def __init__(self, message, required_digits=None):
        super().__init__(message)
        self.required_digits = required_digits


class CrossCheckError(SCLaguerreError, RuntimeError):
    """Two independent routes to the same quantity disagree."""


class ConvergenceError(SCLaguerreError, RuntimeError):
    """An iterative procedure (root bracket, series, quadrature) failed."""
