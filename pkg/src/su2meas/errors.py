"""Exception types raised across the package."""


class SU2MeasError(ValueError):
    """Base class for every domain error raised by su2meas."""


class ZeroVector(SU2MeasError):
    """The origin of C^2 was passed where a nonzero point is required."""


class DivergentMoment(SU2MeasError):
    """A third moment could not be resolved to a finite value."""


class ZeroMass(SU2MeasError):
    """A radial profile has vanishing third moment and cannot be normalized."""


class BothZero(SU2MeasError):
    """Both amplitude magnitudes of a Born-rule query are zero."""


class ProfileFormatError(SU2MeasError):
    """A tabulated profile file could not be parsed.

    ``line`` is the 1-based line number of the offending row, or ``None``
    when the problem concerns the file as a whole.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
