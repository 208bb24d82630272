"""Exception hierarchy.

Every error raised on purpose by the package derives from
:class:`KrylovSVDError`; the value-like ones also derive from
``ValueError`` so generic callers can catch them the usual way.
"""


class KrylovSVDError(Exception):
    pass


class NonFiniteError(KrylovSVDError, ValueError):
    """A matrix contained NaN or Inf."""


class DimensionError(KrylovSVDError, ValueError):
    pass


class RankDeficientError(KrylovSVDError):
    """A QR diagonal fell below the relative rank tolerance."""


class NoConvergenceError(KrylovSVDError):
    pass


class NotOrthonormalError(KrylovSVDError, ValueError):
    pass


class InvalidAlphaError(KrylovSVDError, ValueError):
    """``sqrt(p) - sqrt(k) - alpha`` must be positive."""


class NoGapError(KrylovSVDError, ValueError):
    pass


class EmptyBasisError(KrylovSVDError):
    pass


class FilterOverflowError(KrylovSVDError, OverflowError):
    """An intermediate of the Chebyshev recurrence left the float range."""


class ParseError(KrylovSVDError, ValueError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class UnsupportedFormatError(KrylovSVDError, ValueError):
    pass


class ConfigError(KrylovSVDError, ValueError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class ReportIOError(KrylovSVDError, OSError):
    pass
