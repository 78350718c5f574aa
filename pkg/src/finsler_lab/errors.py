"""Exception types raised by the library."""


class FinslerLabError(ValueError):
    """Base class for invalid input to a finsler_lab operation."""


class DimensionMismatchError(FinslerLabError):
    """A point or vector does not match the dimension of its domain."""


class NotInteriorError(FinslerLabError):
    """A point lies on the boundary of, or outside, the domain."""


class DegenerateInputError(FinslerLabError):
    """Zero vectors, coincident points, invalid triangles and the like."""


class InvalidWeightError(FinslerLabError):
    """A symmetrisation weight outside [0, 1]."""


class BodyFormatError(FinslerLabError):
    """A body file that cannot be parsed."""


class EmptySampleError(FinslerLabError):
    """A probe was asked to run on zero samples."""
