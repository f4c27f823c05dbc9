"""Exception types raised by the library."""


class QuadratureError(RuntimeError):
    """An integral could not be certified to the requested tolerance."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class BracketError(ValueError):
    """No bracketing interval exists for a root-finding request."""


class ScheduleError(RuntimeError):
    """A schedule could not be constructed.

    ``reason`` is one of ``"infeasible-beta"``, ``"curve-not-shrinking"``,
    ``"tail-cap-underflow"``.
    """

    def __init__(self, reason, k, message):
        super().__init__(f"{reason} at k={k}: {message}")
        self.reason = reason
        self.k = k
