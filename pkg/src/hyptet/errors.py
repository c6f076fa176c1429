"""Exception types raised across the package."""


class HyptetError(Exception):
    """Base class for all package-specific errors."""


class SingularArgument(HyptetError):
    """Derivative requested at a point where it diverges (argument in pi*Z)."""


class AmbiguousClassification(HyptetError):
    """Region tests straddle the tolerance bands inconsistently."""


class NotInteriorAngle(HyptetError):
    """Angle vector is not a strictly interior dihedral-angle vector."""


class InvalidAngles(HyptetError):
    """Angle vector violates the linear relations beyond tolerance."""


class BoundaryGradient(HyptetError):
    """Volume gradient requested where a log-derivative term diverges."""


class NotInterior(HyptetError):
    """Length vector does not classify as a realizable (interior) tetrahedron."""


class OutOfFace(HyptetError):
    """Arguments leave the two-parameter boundary face."""


class NotHyperbolic(HyptetError):
    """Triangle angle sum is >= pi, so no hyperbolic triangle exists."""


class InvalidDocument(HyptetError):
    """Structurally malformed triangulation/metric/cone document."""


class GluingError(InvalidDocument):
    """A specific face gluing is invalid; the message names it."""


class UnpairedFace(GluingError):
    """A face slot is glued twice or never."""


class TypeViolation(GluingError):
    """A gluing map mixes truncated and cusped vertices."""


class BadPermutation(GluingError):
    """vertex_map is not a permutation compatible with the glued faces."""


class IndexOutOfRange(GluingError):
    """A tetrahedron or face index is out of range."""


class InadmissibleTarget(HyptetError):
    """Cone-angle target violates the per-vertex counting identity."""


class LpFailure(HyptetError):
    """LP solver failed or its certificate could not be verified."""


class NoInteriorStart(HyptetError):
    """No strictly interior starting point is available for the maximizer."""


class MaxIterations(HyptetError):
    """Iteration cap reached before the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual
