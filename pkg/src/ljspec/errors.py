"""Exception types shared across the package."""


class LJSpecError(Exception):
    """Base class for all errors raised by ljspec."""


class DomainError(LJSpecError, ValueError):
    """A point outside the domain of the operator was requested (x <= 0)."""


class ParameterError(LJSpecError, ValueError):
    """An input violates the documented preconditions of an operation."""


class NumericalError(LJSpecError, RuntimeError):
    """A numerical procedure failed to converge or broke down.

    ``bracket`` carries the offending energy interval or x-interval when
    one is known.
    """

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket
