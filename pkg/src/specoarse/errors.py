"""Exception hierarchy shared by all modules."""


class SpecoarseError(Exception):
    """Base class for every error raised by this package."""


class InvalidMatrix(SpecoarseError, ValueError):
    """Raised by ``SparseMatrix.validate`` when a CSR invariant is broken."""


class IndexOutOfRange(SpecoarseError, IndexError):
    pass


class DimensionMismatch(SpecoarseError, ValueError):
    pass


class NotSquare(DimensionMismatch):
    pass


class NotSymmetric(SpecoarseError, ValueError):
    pass


class ParseError(SpecoarseError, ValueError):
    pass


class UnsupportedFormat(SpecoarseError, ValueError):
    pass


class InvalidAggregateCount(SpecoarseError, ValueError):
    pass


class RequiresNormalized(SpecoarseError, ValueError):
    """Raised when an interlacing-based routine gets an operator with PᵀP ≠ I."""


class NoConvergence(SpecoarseError, RuntimeError):
    """Raised when an iteration hits its cap.

    ``result`` carries the best iterate reached, when there is one.
    """

    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class EmptyEstimate(SpecoarseError, RuntimeError):
    """Raised when no refinement in any sample converged."""
