"""Exception hierarchy shared by all modules."""


class TimeScaleError(Exception):
    """Base class for every error raised by this package."""


class AtRightEndpoint(TimeScaleError):
    pass


class AtLeftEndpoint(TimeScaleError):
    pass


class EmptyIntersection(TimeScaleError):
    pass


class BelowWindow(TimeScaleError):
    pass


class OutOfWindow(TimeScaleError):
    pass


class NotAPoint(OutOfWindow):
    """A real value that does not belong to the time scale."""


class WindowTooShort(TimeScaleError):
    pass


class NegativeOrder(TimeScaleError, ValueError):
    pass


class BadOrder(TimeScaleError, ValueError):
    pass


class NotRegressive(TimeScaleError):
    pass


class HypothesisViolated(TimeScaleError):
    pass


class PatternNotFound(TimeScaleError):
    pass


class TailVanishes(TimeScaleError):
    pass


class NotFoundInWindow(TimeScaleError):
    pass


class AllLambdaNonRegressive(TimeScaleError):
    pass


class BadGamma(TimeScaleError, ValueError):
    pass


class UnknownExample(TimeScaleError, ValueError):
    pass


class HistoryGap(TimeScaleError):
    pass


class NonDiscreteScale(TimeScaleError):
    pass


class ValidationError(TimeScaleError, ValueError):
    pass


class ParseError(TimeScaleError, ValueError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
