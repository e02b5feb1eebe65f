"""Exception types shared across the package."""


class PhotonFilterError(Exception):
    """Base class for all errors raised by this package."""


class InvariantViolation(PhotonFilterError, ValueError):
    """A state object failed one of its defining checks (norm, Hermiticity, ...)."""


class DimensionMismatch(PhotonFilterError, ValueError):
    """Operands live on incompatible truncated spaces."""


class ClickProbabilityUnderflow(PhotonFilterError, ArithmeticError):
    """The ON outcome is (numerically) impossible, so no conditional state exists.

    Carries the computed probability in ``p_on`` so callers can distinguish an
    exact zero (e.g. zero detector efficiency) from an underflowed comb miss.
    """

    def __init__(self, message: str, p_on: float = 0.0):
        super().__init__(message)
        self.p_on = p_on


class TruncationError(PhotonFilterError, ValueError):
    """A truncated expansion lost too much norm to be trusted."""


class CombAliasingError(PhotonFilterError, ValueError):
    """Scan settings would let more than one transmission peak into the support."""


class ConfigError(PhotonFilterError, ValueError):
    """A run configuration is missing fields or holds inconsistent values."""
