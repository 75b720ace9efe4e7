"""Exception hierarchy.

Validation problems (bad parameters) and numeric problems (valid parameters
that land outside a formula's domain) are kept apart so the CLI can map them
to distinct exit codes.
"""


class RcisecError(Exception):
    """Base class for all package errors."""


class ValidationError(RcisecError, ValueError):
    """A parameter violates its documented precondition."""


class NumericError(RcisecError, ArithmeticError):
    """Valid inputs for which the requested quantity does not exist."""


class DomainError(NumericError):
    """A closed form is evaluated outside its real domain."""


class SingularMatrixError(NumericError):
    """The regularized Gram matrix cannot be inverted."""


class DegenerateChannelError(NumericError):
    """The CSIT estimate is identically zero, so the precoder is undefined."""


class NoRootError(NumericError):
    """A training cubic has no admissible real root.

    The ``roots`` attribute holds every root found, for diagnosis.
    """

    def __init__(self, message, roots=()):
        super().__init__(message)
        self.roots = tuple(roots)
