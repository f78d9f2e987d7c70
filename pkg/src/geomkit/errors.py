"""Exception hierarchy shared by all geomkit modules."""


class GeometryError(ValueError):
    """Base class for every error raised by geomkit."""


class DomainError(GeometryError):
    """A point or curve left the chart domain."""


class SignatureError(GeometryError):
    """The metric has the wrong signature for the requested operation."""


class SingularMetricError(GeometryError):
    """The metric matrix is singular (or not symmetric) at the queried point."""


class DegenerateError(GeometryError):
    """Degenerate input: zero vectors, collinear points, cusps, coincident points."""


class ConvergenceError(GeometryError):
    """An iterative solver or adaptive quadrature exhausted its budget.

    Attributes
    ----------
    best : object
        Best estimate available when the budget ran out (may be None).
    residual : float
        Residual of that estimate.
    """

    def __init__(self, message, best=None, residual=float("nan")):
        super().__init__(message)
        self.best = best
        self.residual = residual
