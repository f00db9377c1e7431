"""Exception types shared across the package."""


class RankRangeError(Exception):
    """Base class for all package errors."""


class DimensionError(RankRangeError, ValueError):
    """Shapes disagree, or a requested subspace does not fit."""


class PreconditionError(RankRangeError, ValueError):
    """An input violates a numerical precondition (e.g. a non-isometric U)."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class NumericalFailure(RankRangeError, ArithmeticError):
    """An iterative routine did not converge or a tolerance could not be met."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegeneracyError(NumericalFailure):
    """A subspace intersection came out smaller than the dimension count promises."""

    def __init__(self, message, achieved=None, required=None):
        super().__init__(message)
        self.achieved = achieved
        self.required = required


class BoundError(RankRangeError, ValueError):
    """The dimension bound of the constructive existence theorem is not met."""


class ComplexityError(RankRangeError, ValueError):
    """The partition enumeration would exceed the supported size."""


class DomainError(RankRangeError, ValueError):
    """An argument lies outside the domain of a closed-form map."""
