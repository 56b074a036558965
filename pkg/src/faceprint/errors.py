"""Domain error types shared across the pipeline.

Everything raised here (plus ValueError for bad arguments) is treated as a
data/domain failure by the CLI, which reports it with exit code 1. Anything
else propagating out of the library is a bug.
"""


class FaceprintError(Exception):
    """Base class for recoverable pipeline errors."""


class PgmFormatError(FaceprintError):
    """Malformed PGM header or pixel syntax."""


class PgmTruncationError(PgmFormatError):
    """PGM raster ends before width*height pixels."""


class PgmDepthError(PgmFormatError):
    """PGM maxval above 255; only 8-bit images are supported."""


class NoFaceError(FaceprintError):
    """Binary image has no foreground component to treat as a face."""


class ErodedToEmptyError(FaceprintError):
    """Erosion removed every foreground pixel of the mask."""


class InsufficientDataError(FaceprintError):
    """A class has too few samples to split into train and test."""


class DivergenceError(FaceprintError):
    """Training produced a non-finite loss."""


class GeometryError(FaceprintError):
    """Synthetic sample parameters do not fit on the requested canvas."""
