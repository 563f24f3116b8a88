"""Exception types shared across the package."""


class MinsurfError(Exception):
    """Base class for all package errors."""


class ExpressionError(MinsurfError):
    """Malformed or unsupported closed-form expression."""


class NonConvergent(MinsurfError):
    """Adaptive quadrature exhausted its subdivision budget before reaching tol."""


class EvaluationOutsideDomain(MinsurfError):
    """A quadrature node or path point left the host domain."""


class PathNotFound(MinsurfError):
    """No mesh path connects the requested endpoints."""


class TooCloseToBoundary(MinsurfError):
    """Numeric differentiation requested too close to the domain boundary."""


class DegenerateDomain(MinsurfError):
    """Domain too thin for the requested mesh resolution, or meshing produced a disconnected graph."""


class PoleMismatch(MinsurfError):
    """A zero or pole of the Gauss map is not cancelled by the third spinor coefficient."""


class RealPeriodsNonzero(MinsurfError):
    """Real parts of closed-loop periods exceed tolerance; the form does not integrate to a single-valued map."""

    def __init__(self, message, cycle_index=None, residual=None):
        super().__init__(message)
        self.cycle_index = cycle_index
        self.residual = residual


class MetricDegenerate(MinsurfError):
    """Conformal factor vanishes at the evaluation point."""


class UnreachableBoundary(MinsurfError):
    """No ideal-boundary vertex is reachable from the source vertex."""


class NoConvergence(MinsurfError):
    """Newton iteration exhausted its budget without meeting the residual tolerance."""


class SingularJacobian(MinsurfError):
    """Period Jacobian is numerically rank-zero or produced a non-finite step."""


class ConstructionFailed(MinsurfError):
    """Spray construction is rank-deficient; enlarge the generator family."""


class OrderMismatch(MinsurfError):
    """Divisors have different total orders."""


class PointOutsideNeighborhood(MinsurfError):
    """A target divisor point lies outside every chart disc of the base divisor."""


class ProximityTooLarge(MinsurfError):
    """Zero counts of the reference components differ; the inputs are not close enough to align."""


class ReferenceComponentDegenerate(MinsurfError):
    """No component of the reference tuple is bounded away from zero on the boundary."""


class ZeroOnContour(MinsurfError):
    """The function is too small somewhere on the integration contour."""


class NonIntegerResult(MinsurfError):
    """Winding-number quadrature did not land near an integer."""


class ScheduleInvalid(MinsurfError):
    """Labyrinth schedule violates the arc/width/disjointness conditions."""


class ConfigInvalid(MinsurfError):
    """Scenario configuration is malformed."""


class SymmetryViolated(MinsurfError):
    """Generator function is not even under reflection through the origin."""


class InvariantViolation(MinsurfError):
    """A constructed object failed one of its declared invariants."""
