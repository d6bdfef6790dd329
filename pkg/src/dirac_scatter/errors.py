"""Exception hierarchy for dirac_scatter."""


class DiracScatterError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(DiracScatterError, ValueError):
    pass


class DegenerateParameterError(DiracScatterError, ValueError):
    pass


class NonConvergenceError(DiracScatterError, RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class InsufficientDecayError(DiracScatterError, ValueError):
    pass


class InvalidParametersError(DiracScatterError, ValueError):
    pass


class SpectralGapError(DiracScatterError, ValueError):
    pass


class DegenerateScaleError(DiracScatterError, ValueError):
    pass


class TailTruncationError(DiracScatterError, ValueError):
    pass


class FitError(DiracScatterError, RuntimeError):
    pass


class ConjugacyViolation(DiracScatterError, RuntimeError):
    pass


class ZeroCoefficientError(DiracScatterError, ZeroDivisionError):
    pass


class QuadratureError(DiracScatterError, RuntimeError):
    pass


class TruncationError(DiracScatterError, RuntimeError):
    def __init__(self, message, tail_estimate=None):
        super().__init__(message)
        self.tail_estimate = tail_estimate


class OscillationResolutionError(DiracScatterError, RuntimeError):
    pass


class ConfigError(DiracScatterError, ValueError):
    """Invalid run configuration; ``path`` names the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
