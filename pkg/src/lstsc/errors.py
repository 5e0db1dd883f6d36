"""Exception hierarchy.

Every error raised on purpose by this package derives from LstscError, so
callers (and the CLI) can tell contract violations apart from bugs.
"""


class LstscError(Exception):
    """Base class for all package errors."""


class ConfigError(LstscError, ValueError):
    """Invalid configuration value or combination of values."""


class ShapeError(LstscError, ValueError):
    """Array dimensions do not match what the operation expects."""


class AudioIOError(LstscError, OSError):
    """A WAV or feature file could not be read or written."""


class SampleRateError(LstscError, ValueError):
    """Audio sample rate differs from the configured rate (no resampling)."""


class GeometryError(LstscError, ValueError):
    """Source/mic placement is invalid (coincident points, outside room...)."""


class LabelError(LstscError, ValueError):
    """Label set is unusable for scoring (missing stems, missing class)."""


class NumericError(LstscError, ArithmeticError):
    """A numeric contract was violated (e.g. coherence outside [-1, 1])."""
