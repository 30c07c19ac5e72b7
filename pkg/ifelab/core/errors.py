"""
Error types raised across ifelab.
Each class also derives from the builtin a caller would expect for the same
failure, so plain ``except ValueError`` keeps working.
"""


class IfeLabError(Exception):
    """Base class for every error raised by ifelab"""


class InvalidInputError(IfeLabError, ValueError):
    """Input fails validation (non-Hermitian, non-normalized, bad argument)"""


class ShapeError(InvalidInputError):
    """Operand dimensions do not fit together"""


class CapacityError(IfeLabError, RuntimeError):
    """Dimension or enumeration budget exceeded"""


class InconsistencyError(IfeLabError, ValueError):
    """Power sums that do not belong to any density-matrix spectrum"""


class UsageError(IfeLabError, ValueError):
    """Operation called on the wrong kind of family instance"""


class ReconstructionError(IfeLabError, RuntimeError):
    """Effective local factorization does not reproduce the evolution"""
