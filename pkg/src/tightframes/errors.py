"""Exception hierarchy shared by every module."""


class FrameError(Exception):
    """Base class for all errors raised by tightframes."""


class InvalidInput(FrameError, ValueError):
    pass


class NotInvertible(FrameError):
    pass


class NotPSD(FrameError):
    pass


class NotDecomposable(FrameError):
    """The operator has no rank-one projection decomposition of the requested length.

    ``reason`` is ``"trace"`` (trace not an integer, or below the rank),
    ``"norm"`` (norm at most one without being a projection) or ``"psd"``.
    """

    def __init__(self, reason, message=""):
        self.reason = reason
        super().__init__(message or reason)


class InvalidCase2State(FrameError):
    pass


class InfeasiblePrefix(FrameError):
    def __init__(self, max_prefix, message=""):
        self.max_prefix = max_prefix
        super().__init__(message or f"only the first {max_prefix} entries can be scheduled")


class EndOfStream(FrameError):
    def __init__(self, remaining, needed, message=""):
        self.remaining = remaining
        self.needed = needed
        super().__init__(
            message or f"next block needs {needed} unconsumed entries, {remaining} left"
        )
