"""Geometry of one decorated tetrahedron with a truncated apex and three cusps.

Vertex 1 is the truncated (hyperideal) vertex, vertices 2, 3, 4 are cusped
(ideal) and carry horosphere decorations.  All six-vectors use the fixed
slot order (12, 13, 14, 23, 24, 34): dihedral angles ``a12..a34`` in
radians, signed decorated lengths ``l12..l34`` in curvature -1 units.

The central objects:

* ``phi`` -- closed-form extension of ``cos(angle)`` to every real length
  vector, invariant under the horosphere rescaling (decoration) action;
* ``classify`` -- partition of length space into the realizable region,
  three degenerate regions where the vertex-triangle inequality fails,
  and their separating walls;
* ``extended_angles`` -- clamped-arccos extension of the dihedral angles,
  constant on each degenerate region;
* ``volume_from_angles`` / ``covolume`` -- the concave volume and its
  convex Legendre-type partner ``2*vol + <angles, lengths>``, which is C^1
  on all of R^6 with gradient equal to the extended angles.
"""

import math
from enum import Enum
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import (
    AmbiguousClassification,
    BoundaryGradient,
    InvalidAngles,
    NotHyperbolic,
    NotInterior,
    NotInteriorAngle,
    OutOfFace,
)

PI = math.pi

SLOTS = ("12", "13", "14", "23", "24", "34")

#: gauge directions of the decoration action on the six length slots,
#: one per cusped vertex (2, 3, 4)
GAUGE_VECTORS = np.array(
    [
        [1.0, 0.0, 0.0, 1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 1.0, 0.0, 1.0],
        [0.0, 0.0, 1.0, 0.0, 1.0, 1.0],
    ]
)

#: the three flat-collapse angle patterns (closure corner points)
FLAT_PATTERNS = np.array(
    [
        [PI, 0.0, 0.0, 0.0, 0.0, PI],
        [0.0, PI, 0.0, 0.0, PI, 0.0],
        [0.0, 0.0, PI, PI, 0.0, 0.0],
    ]
)


class DihedralAngles(NamedTuple):
    a12: float
    a13: float
    a14: float
    a23: float
    a24: float
    a34: float

    @classmethod
    def from_array(cls, arr):
        return cls(*(float(x) for x in np.asarray(arr, dtype=np.float64)))


class DecoratedLengths(NamedTuple):
    l12: float
    l13: float
    l14: float
    l23: float
    l24: float
    l34: float

    @classmethod
    def from_array(cls, arr):
        return cls(*(float(x) for x in np.asarray(arr, dtype=np.float64)))


class Decoration(NamedTuple):
    """Horosphere rescaling shifts at the three cusped vertices."""

    w2: float
    w3: float
    w4: float


class ThetaTable(NamedTuple):
    """Derived two-dimensional section lengths, all strictly positive.

    ``t1_jk``: hyperbolic side lengths of the vertex triangle at the
    truncated vertex.  ``ti_1j``/``ti_jk``: Euclidean side lengths of the
    horosphere-section triangle at cusped vertex i.
    """

    t1_23: float
    t1_24: float
    t1_34: float
    t2_13: float
    t2_14: float
    t3_12: float
    t3_14: float
    t4_12: float
    t4_13: float
    t2_34: float
    t3_24: float
    t4_23: float


class RegionLabel(Enum):
    INTERIOR = "InteriorL"
    OMEGA1 = "Omega1"
    OMEGA2 = "Omega2"
    OMEGA3 = "Omega3"
    X1 = "X1"
    X2 = "X2"
    X3 = "X3"


class AngleRegionLabel(Enum):
    B = "B"
    B_I_BOUNDARY = "B_I_boundary"
    B_II = "B_II"
    B_III = "B_III"
    OUTSIDE = "Outside"


def _as6(x, name):
    arr = np.asarray(x, dtype=np.float64).reshape(-1)
    if arr.shape != (6,):
        raise ValueError(f"{name} must have six entries, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


def phi(lengths):
    """Cosine-extension values for all six slots, as a (6,) array."""
    arr = _as6(lengths, "lengths")
    return _kernels.phi_batch(arr.reshape(1, 6))[0]


def theta_table(lengths):
    """Vertex-triangle and horosphere-section lengths for any length vector."""
    arr = _as6(lengths, "lengths")
    row = _kernels.theta_batch(arr.reshape(1, 6))[0]
    return ThetaTable(*(float(v) for v in row))


def classify(lengths, tol=1e-9):
    """Locate a length vector in the realizable-region decomposition.

    Interior, one of the three degenerate regions (vertex-triangle
    inequality failed), or one of the separating walls, decided from the
    three apex-slot cosine extensions with tolerance band ``tol``.
    """
    if not (0.0 < tol <= 1e-6):
        raise ValueError("tol must lie in (0, 1e-6]")
    p = phi(lengths)
    apex = p[:3]

    omega = [i for i in range(3) if apex[i] <= -1.0 - tol]
    wall = [i for i in range(3) if abs(apex[i] + 1.0) <= tol and i not in omega]
    if len(omega) > 1 or len(wall) > 1 or (omega and wall):
        raise AmbiguousClassification(
            f"inconsistent region pattern {p.tolist()} at tol={tol}"
        )
    if omega:
        return (RegionLabel.OMEGA1, RegionLabel.OMEGA2, RegionLabel.OMEGA3)[omega[0]]
    if wall:
        return (RegionLabel.X1, RegionLabel.X2, RegionLabel.X3)[wall[0]]
    if np.all(p > -1.0 + tol) and np.all(p < 1.0 - tol):
        return RegionLabel.INTERIOR
    raise AmbiguousClassification(
        f"inconsistent region pattern {p.tolist()} at tol={tol}"
    )


def extended_angles(lengths):
    """Dihedral angles extended to all of length space by clamping.

    arccos of the cosine extension clipped to [-1, 1]; on each degenerate
    region the result is exactly the corresponding flat pattern.
    """
    arr = _as6(lengths, "lengths")
    row = _kernels.extended_angles_batch(arr.reshape(1, 6))[0]
    return DihedralAngles(*(float(v) for v in row))


def apply_decoration(lengths, w):
    """Shift the horosphere at each cusped vertex; angles are unchanged."""
    arr = _as6(lengths, "lengths")
    shift = np.asarray(w, dtype=np.float64).reshape(-1)
    if shift.shape != (3,):
        raise ValueError("decoration must have three entries (w2, w3, w4)")
    if not np.all(np.isfinite(shift)):
        raise ValueError("decoration must be finite")
    out = arr + shift @ GAUGE_VECTORS
    return DecoratedLengths(*(float(v) for v in out))


def _ideal_sums(a):
    return np.array(
        [a[0] + a[3] + a[4], a[1] + a[3] + a[5], a[2] + a[4] + a[5]]
    )


def _check_closure_membership(a, tol):
    """Return None if ``a`` lies in the closed angle polytope, else a reason."""
    if np.any(a < -tol) or np.any(a > PI + tol):
        return "entries outside [0, pi]"
    if a[0] + a[1] + a[2] > PI + tol:
        return "apex angle sum exceeds pi"
    bad = np.abs(_ideal_sums(a) - PI) > tol
    if np.any(bad):
        return "cusp angle sums differ from pi"
    return None


def classify_angles(alpha, tol=1e-9):
    """Place an angle vector in the closed angle polytope decomposition."""
    if not (0.0 < tol <= 1e-6):
        raise ValueError("tol must lie in (0, 1e-6]")
    a = _as6(alpha, "alpha")
    if _check_closure_membership(a, tol) is not None:
        return AngleRegionLabel.OUTSIDE
    if a[0] + a[1] + a[2] < PI - tol:
        if np.all(a > tol):
            return AngleRegionLabel.B
        return AngleRegionLabel.B_I_BOUNDARY
    for pattern in FLAT_PATTERNS:
        if np.max(np.abs(a - pattern)) <= tol:
            return AngleRegionLabel.B_II
    return AngleRegionLabel.B_III


def _require_interior_angles(a):
    if np.any(a <= 0.0) or np.any(a >= PI):
        raise NotInteriorAngle("all six angles must lie strictly in (0, pi)")
    if a[0] + a[1] + a[2] >= PI:
        raise NotInteriorAngle("apex angle sum must be strictly below pi")
    if np.any(np.abs(_ideal_sums(a) - PI) > 1e-9):
        raise NotInteriorAngle("cusp angle sums must equal pi within 1e-9")


def angles_to_lengths(alpha):
    """Canonical decorated lengths of an interior angle vector.

    Uses the gauge with the three apex-slot lengths set to zero; inverse of
    ``extended_angles`` on the interior, up to that normalization.
    """
    a = _as6(alpha, "alpha")
    _require_interior_angles(a)
    c = np.cos(a[:3])
    s = np.sin(a[:3])

    def edge(i, j, k):
        return math.log(0.5 * ((c[k] + c[i] * c[j]) / (s[i] * s[j]) - 1.0))

    return DecoratedLengths(
        0.0, 0.0, 0.0, edge(0, 1, 2), edge(0, 2, 1), edge(1, 2, 0)
    )


def _volume2_raw(a):
    return float(_kernels.volume2_batch(np.asarray(a, dtype=np.float64).reshape(1, 6))[0])


def volume_from_angles(alpha):
    """Hyperbolic volume of the tetrahedron with the given slot angles.

    Defined and continuous on the closed angle polytope; zero exactly at
    the flat patterns.  Raises InvalidAngles outside the polytope
    (tolerance 1e-9 on the linear relations).
    """
    a = _as6(alpha, "alpha")
    reason = _check_closure_membership(a, 1e-9)
    if reason is not None:
        raise InvalidAngles(reason)
    v = 0.5 * _volume2_raw(a)
    return v if v > 0.0 else 0.0


def volume_gradient(alpha):
    """d(vol)/d(a12, a13, a14), dependent slots eliminated, as a (3,) array.

    Raises BoundaryGradient when any log-derivative argument is within
    1e-9 of a multiple of pi (the gradient diverges there).
    """
    a = _as6(alpha, "alpha")
    _require_interior_angles(a)
    args = np.concatenate(([(PI - a[0] - a[1] - a[2]) / 2.0], a))
    dist = np.abs(args - PI * np.round(args / PI))
    if np.any(dist <= 1e-9):
        raise BoundaryGradient(
            "a log-derivative argument is within 1e-9 of a multiple of pi"
        )
    return _kernels.volume_gradient_batch(a.reshape(1, 6))[0]


def covolume(lengths):
    """Convex potential 2*vol(angles(l)) + <angles(l), l>, total on R^6.

    C^1 everywhere with gradient equal to ``extended_angles``; linear with
    slope pi along the two surviving slots on each degenerate region.
    """
    arr = _as6(lengths, "lengths")
    return float(_kernels.covolume_batch(arr.reshape(1, 6))[0])


def covolume_gradient(lengths):
    """Gradient of ``covolume``: exactly the extended angles, as (6,)."""
    arr = _as6(lengths, "lengths")
    return _kernels.extended_angles_batch(arr.reshape(1, 6))[0]


def covolume_hessian(lengths, h=1e-4):
    """Symmetrized central-difference Hessian of ``covolume``.

    Differentiates the analytic gradient (the extended angles).  Positive
    semidefinite with rank 3; the gauge directions span the kernel.  Only
    defined at interior points; ``h`` must lie in [1e-6, 1e-3].
    """
    if not (1e-6 <= h <= 1e-3):
        raise ValueError("h must lie in [1e-6, 1e-3]")
    arr = _as6(lengths, "lengths")
    if classify(arr) is not RegionLabel.INTERIOR:
        raise NotInterior("Hessian requested at a non-interior length vector")
    pts = np.repeat(arr.reshape(1, 6), 12, axis=0)
    for q in range(6):
        pts[2 * q, q] += h
        pts[2 * q + 1, q] -= h
    grads = _kernels.extended_angles_batch(pts)
    cols = (grads[0::2] - grads[1::2]) / (2.0 * h)
    hess = cols.T
    return 0.5 * (hess + hess.T)


def boundary_face_hessian(a13, a14):
    """Closed-form Hessian of twice the volume on the a12 = 0 face.

    On that face the volume depends on (a13, a14) alone; the Hessian is
    negative definite with determinant (1 + t*t')^2 / (4*t*t') for
    t = tan(a13/2), t' = tan(a14/2).
    """
    a13 = float(a13)
    a14 = float(a14)
    if not (0.0 < a13 < PI and 0.0 < a14 < PI and a13 + a14 < PI):
        raise OutOfFace("need a13, a14 in (0, pi) with a13 + a14 < pi")
    t = math.tan((a13 + a14) / 2.0)
    return -0.5 * np.array(
        [
            [2.0 / math.tan(a13) + t, t],
            [t, 2.0 / math.tan(a14) + t],
        ]
    )


def hyperbolic_triangle_sides(A, B, C):
    """Side lengths (a, b, c) of the hyperbolic triangle with angles (A, B, C).

    Dual cosine law: cosh a = (cos A + cos B cos C) / (sin B sin C), and
    cyclic.  Requires positive angles with sum strictly below pi.
    """
    ang = np.array([float(A), float(B), float(C)])
    if np.any(ang <= 0.0):
        raise ValueError("angles must be positive")
    if ang.sum() >= PI:
        raise NotHyperbolic("angle sum must be strictly below pi")
    c = np.cos(ang)
    s = np.sin(ang)
    sides = tuple(
        float(np.arccosh((c[i] + c[j] * c[k]) / (s[j] * s[k])))
        for i, j, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1))
    )
    return sides
