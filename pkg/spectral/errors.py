"""Exception hierarchy. Each category carries the CLI exit code it maps to."""


class SpectralLabError(Exception):
    """Base error for every failure raised by the laboratory."""

    exit_code = 2

    def __init__(self, message, **details):
        super().__init__(message)
        self.details = details


class ConfigError(SpectralLabError):
    """Invalid or unknown configuration; `key_path` names the offending key."""

    exit_code = 1

    def __init__(self, message, key_path=None, **details):
        if key_path:
            message = f"{key_path}: {message}"
        super().__init__(message, key_path=key_path, **details)
        self.key_path = key_path


class NumericalError(SpectralLabError):
    exit_code = 2


class EigenSolverError(NumericalError):
    def __init__(self, message, index=None, **details):
        super().__init__(message, index=index, **details)
        self.index = index


class SingularMatrixError(NumericalError):
    def __init__(self, message, condition=None, **details):
        super().__init__(message, condition=condition, **details)
        self.condition = condition


class HermitianCheckError(NumericalError):
    pass


class TruncationError(NumericalError):
    pass


class DimensionError(NumericalError):
    pass


class GridMismatchError(NumericalError):
    pass


class GaugeError(NumericalError):
    pass


class VolumeCutoffError(NumericalError):
    pass


class RefinementLimitError(NumericalError):
    pass


class ZeroNearContourError(NumericalError):
    pass


class HypothesisViolation(SpectralLabError):
    """A mathematical hypothesis of the construction does not hold."""

    exit_code = 3


class OutOfRangeError(HypothesisViolation):
    pass


class DomainError(NumericalError, ValueError):
    """Argument outside the domain of a numerical routine (non-positive h, step, radius...)."""
