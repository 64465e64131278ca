"""Exception types shared across the package."""


class MarginalError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MarginalError, ValueError):
    """A distribution, table or state fails normalization/negativity checks."""


class ConsistencyError(MarginalError, ValueError):
    """Pair tables disagree on a single-spin marginal."""


class DomainError(MarginalError, ValueError):
    """An argument lies outside its mathematical domain."""


class InfeasibleError(MarginalError):
    """No joint distribution exists for the requested marginals.

    ``violation`` is a non-negative number measuring how far the input sits
    outside the feasible region (its units depend on the raising routine).
    """

    def __init__(self, message, violation=float("nan")):
        super().__init__(message)
        self.violation = violation


class UnsupportedError(MarginalError):
    """The input is legal but outside what the chosen method handles."""


class NumericError(MarginalError, ArithmeticError):
    """An iterative routine failed where it is guaranteed to succeed."""
