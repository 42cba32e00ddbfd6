"""Exception hierarchy shared across the package.

Three broad classes matter to callers (and to the CLI exit-code mapping):
validation problems with inputs, I/O problems with files, and numeric
degeneracies that a statistic cannot recover from.
"""


class VoxevalError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(VoxevalError, ValueError):
    """Inputs violate a documented precondition."""


class IOFormatError(VoxevalError, OSError):
    """A file is missing, truncated, or not in a supported format."""


class NumericError(VoxevalError, ArithmeticError):
    """A computation is undefined for the given data."""


# -- volume grid / geometry ------------------------------------------------

class GridMismatchError(ValidationError):
    """Two grids that must share dims/spacing do not."""


class TargetTooSmallError(ValidationError):
    """Requested pad/crop target is smaller than the source grid."""


class OddDimensionError(ValidationError):
    """Single-level wavelet needs every dimension to be even."""


class EmptyLabelError(ValidationError):
    """A label map has no voxels with the requested label."""


class VolumeTooSmallError(ValidationError):
    """Volume too small for the requested multi-scale analysis."""


class UnsupportedDatatypeError(IOFormatError):
    """File stores voxels in a datatype this package does not read."""


# -- numerics --------------------------------------------------------------

class DegenerateRangeError(NumericError):
    """An intensity range collapsed to a single point."""


class DegenerateSampleError(NumericError):
    """A statistical test is undefined for the given samples."""


class InsufficientDataError(NumericError):
    """Not enough rows/columns to fit the requested model."""


class OutOfRangeError(ValidationError):
    """A score or parameter lies outside its documented range."""
