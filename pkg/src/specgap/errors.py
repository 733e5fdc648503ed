"""Exception types shared across the package."""


class SpecgapError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(SpecgapError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateRatioError(InvalidArgumentError):
    """The subsampling ratio selects zero sources (floor(n_s * ratio) == 0)."""


class DegenerateInputError(SpecgapError, ValueError):
    """Numerical input is degenerate (e.g. an all-zero matrix)."""


class ConvergenceError(SpecgapError, RuntimeError):
    """Power iteration hit the iteration cap.

    Carries the last iterate so callers can inspect how far it got.
    """

    def __init__(self, message, sigma1=None, sigma2=None, iterations=None):
        super().__init__(message)
        self.sigma1 = sigma1
        self.sigma2 = sigma2
        self.iterations = iterations


class NumericalError(SpecgapError, RuntimeError):
    """A linear solve or related numerical step failed."""
