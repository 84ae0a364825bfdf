"""Exception types raised by the library."""


class CatenoidEndsError(Exception):
    """Base class for all library errors."""


class SupportedRangeError(CatenoidEndsError, ValueError):
    """An integer parameter lies outside the supported range."""


class DomainError(CatenoidEndsError, ValueError):
    """Evaluation requested at a point where the quantity is undefined."""


class PoleError(DomainError):
    """Evaluation requested at (or numerically on top of) a pole."""


class ConfigurationError(CatenoidEndsError, ValueError):
    """A configuration violates its structural invariants.

    ``indices`` names the offending points (0-based).
    """

    def __init__(self, message, indices=()):
        super().__init__(message)
        self.indices = tuple(indices)


class IterationError(CatenoidEndsError, RuntimeError):
    """An iterative method failed to converge.

    Carries the best iterate found and its residual (or the residual
    history, for the balance solver) so callers can inspect or save it.
    """

    def __init__(self, message, best=None, residual=None, history=None):
        super().__init__(message)
        self.best = best
        self.residual = residual
        self.history = list(history) if history is not None else []


class RankError(CatenoidEndsError, ArithmeticError):
    """A linear system needed by a solver is rank deficient."""


class GeometryError(CatenoidEndsError, ValueError):
    """A contour or path comes too close to a singularity."""


class QuadratureError(CatenoidEndsError, RuntimeError):
    """Numerical quadrature did not reach the requested accuracy."""

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
