"""Exception types raised by curveflow."""


class CurveflowError(Exception):
    """Base class for all library errors."""


class SingularSurfacePointError(CurveflowError):
    """The level-set gradient vanishes where a normal is required."""


class ProjectionError(CurveflowError):
    """Newton projection onto a surface did not converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class DegenerateCurveError(CurveflowError):
    """A parametric curve or nodal tangent has (nearly) zero length."""


class StepSolveError(CurveflowError):
    """A saddle-point solve failed or produced an unacceptable residual."""


class InvalidInitialStateError(CurveflowError):
    """A flow was started from a curve outside the discrete admissible set."""
