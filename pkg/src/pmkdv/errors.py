"""Exception types raised by the package."""


class PmkdvError(Exception):
    """Base class for all package errors."""


class MeanNotZero(PmkdvError, ValueError):
    """Field passed to the periodic antiderivative has a nonzero mean."""


class NonFinite(PmkdvError, FloatingPointError):
    """Non-finite values appeared during time stepping (blow-up).

    ``t`` is the time of detection and ``history`` holds ``(t, max|u|)``
    pairs recorded up to that point.
    """

    def __init__(self, message, t=None, history=None):
        super().__init__(message)
        self.t = t
        self.history = list(history or [])


class ScaleCollapse(PmkdvError, ValueError):
    """Soliton scale dropped below the configured floor."""

    def __init__(self, message, t=None, c=None):
        super().__init__(message)
        self.t = t
        self.c = c


class NoConvergence(PmkdvError, RuntimeError):
    """An iterative solve failed to converge."""

    def __init__(self, message, history=None, t=None, partial=None):
        super().__init__(message)
        self.history = list(history or [])
        self.t = t
        self.partial = partial


class ZeroField(PmkdvError, ValueError):
    """Field has zero L2 norm where a nonzero field is required."""


class InsufficientPoints(PmkdvError, ValueError):
    """Too few samples or sweep points for the requested analysis."""


class ConfigError(PmkdvError, ValueError):
    """Invalid run configuration."""


class TailTruncationWarning(UserWarning):
    """Soliton tails are not negligible at the domain seam (``c * l < 20``)."""


class StabilityWarning(UserWarning):
    """Time step exceeds the suggested stability bound."""
