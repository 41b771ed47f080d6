"""
Exception types shared by the uncertainty toolkit.
Every failure the library reports derives from UncertaintyError; each subclass
carries the short label the CLI prints in front of its message.
"""


class UncertaintyError(Exception):
    """Base class for all library errors."""

    label = "Error"


class DomainError(UncertaintyError, ValueError):
    """A scalar argument (p, eps, delta, trials...) is outside its domain."""

    label = "Domain error"


class IndexRangeError(UncertaintyError, IndexError):
    """An index set refers to coordinates outside {1, ..., n}."""

    label = "Index out of range"


class ZeroVectorError(UncertaintyError, ValueError):
    """An operation needs a nonzero vector."""

    label = "Zero vector"


class DimensionMismatchError(UncertaintyError, ValueError):
    """Vector, matrix or support sizes disagree."""

    label = "Dimension mismatch"


class InvalidPermutationError(UncertaintyError, ValueError):
    """A permutation of {1, ..., n} was expected."""

    label = "Invalid permutation"


class PhaseError(UncertaintyError, ValueError):
    """A phase that must be unimodular is not."""

    label = "Non-unimodular phase"


class MatrixParseError(UncertaintyError, ValueError):
    """A matrix or permutation file does not follow the documented format."""

    label = "Parse error"


class SingularMatrixError(UncertaintyError, ValueError):
    """A transition matrix is singular or too ill-conditioned to invert."""

    label = "Singular matrix"


class ExponentError(UncertaintyError, ValueError):
    """An operation that only makes sense for one exponent got another."""

    label = "Wrong exponent"
