"""Exception hierarchy shared by every engine."""


class RankforgeError(Exception):
    """Base class for all library errors."""


class DimensionError(RankforgeError, ValueError):
    """Two objects that must share a size do not."""


class CapabilityError(RankforgeError):
    """The requested method cannot handle this input (size ceiling, wrong weight kind, ...)."""


class NonConvergenceError(RankforgeError):
    """An iterative solver stopped before meeting its tolerance.

    The last iterate and its residual are kept so callers can decide what to do.
    """

    def __init__(self, message, last=None, residual=None):
        super().__init__(message)
        self.last = last
        self.residual = residual


class ParseError(RankforgeError, ValueError):
    """Malformed input text. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
