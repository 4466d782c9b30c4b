class CurveflowError(Exception):
    """Base class for every error raised by the curve flow engine."""


class DomainError(CurveflowError, ValueError):
    pass


class PoleHit(DomainError):
    """A K=+1 radius reached the pole margin below pi/2."""


class NotConvexError(CurveflowError):
    def __init__(self, message, margin=None):
        super().__init__(message)
        self.margin = margin


class StepUnderflow(CurveflowError):
    pass


class FitWindowError(CurveflowError):
    pass


class DegenerateArgmax(CurveflowError):
    pass


class SamplerRejection(CurveflowError):
    pass


class ConfigError(CurveflowError):
    pass
