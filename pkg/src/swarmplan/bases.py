"""Polynomial-basis conversions and enclosing-simplex volume tools.

Each cubic interval of a spline can be re-expressed in three bases:

* ``bs`` -- the B-spline segment basis itself (control-point hull is a
  loose outer bound of the curve),
* ``be`` -- Bernstein/Bezier (tighter),
* ``mv`` -- the minimum-volume enclosing-simplex basis, whose four
  control points span the smallest tetrahedron containing the segment.

All bases are partitions of unity with nonnegative functions on the
normalized interval parameter u in [0, 1] (the project-wide domain
convention), so the segment always lies in the convex hull of its
control points in any of them.  Conversions are exact linear maps
between control-point sets of the same polynomial.

The minimum-volume basis matrices are numeric constants.  They were
obtained by maximizing |det A| subject to partition of unity and
nonnegativity (each basis polynomial has a tangency double root, which
is what guarantees nonnegativity), and they are gated by the validation
suite: containment, hull-volume ordering and the published volume
ratios would all catch a wrong constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from swarmplan.splines import (
    Spline,
    position_segment_matrix,
    velocity_segment_matrix,
)

BASES = ("mv", "be", "bs")

_SQRT3 = np.sqrt(3.0)

# Minimum-volume enclosing-simplex basis, cubic, on u in [0, 1].
# Rows are basis polynomials in descending powers [u^3, u^2, u, 1].
A_POS_MV = np.array(
    [
        [-3.4416309550183682, 6.9895482325313535, -4.4622887755465370, 0.91437149803355169],
        [6.6792587661633054, -11.845989949248759, 5.2523596850519023, 0.0],
        [-6.6792587661633054, 8.1917863492411569, -1.5981560850442998, 0.085628501966448309],
        [3.4416309550183682, -3.3353446325237510, 0.80808517553893453, 0.0],
    ]
)

# Quadratic (velocity space) version; exact closed form.
A_VEL_MV = np.array(
    [
        [1.5, -(3.0 + _SQRT3) / 2.0, (2.0 + _SQRT3) / 4.0],
        [-3.0, 3.0, 0.0],
        [1.5, -(3.0 - _SQRT3) / 2.0, (2.0 - _SQRT3) / 4.0],
    ]
)

# Bernstein (Bezier) matrices on [0, 1].
A_POS_BE = np.array(
    [[-1.0, 3, -3, 1], [3, -6, 3, 0], [-3, 3, 0, 0], [1, 0, 0, 0]]
)
A_VEL_BE = np.array([[1.0, -2, 1], [-2, 2, 0], [1, 0, 0]])

for _m in (A_POS_MV, A_VEL_MV, A_POS_BE, A_VEL_BE):
    _m.setflags(write=False)


def position_basis_matrix(basis: str, j: int, num_intervals: int) -> np.ndarray:
    """The 4x4 basis matrix used for interval j in the given basis."""
    if basis == "mv":
        return A_POS_MV
    if basis == "be":
        return A_POS_BE
    if basis == "bs":
        return position_segment_matrix(j, num_intervals)
    raise ValueError(f"unknown basis {basis!r}")


def velocity_basis_matrix(basis: str, j: int, num_intervals: int) -> np.ndarray:
    if basis == "mv":
        return A_VEL_MV
    if basis == "be":
        return A_VEL_BE
    if basis == "bs":
        return velocity_segment_matrix(j, num_intervals)
    raise ValueError(f"unknown basis {basis!r}")


@lru_cache(maxsize=4096)
def position_conversion(j: int, num_intervals: int, basis: str) -> np.ndarray:
    """Matrix T with P_basis = T @ P_bs for control points stored as rows.

    Derived from Q_b = Q_bs A_bs(j) inv(A_b) (points as columns)."""
    if basis == "bs":
        return np.eye(4)
    A_bs = position_segment_matrix(j, num_intervals)
    A_b = position_basis_matrix(basis, j, num_intervals)
    T = (A_bs @ np.linalg.inv(A_b)).T
    T.setflags(write=False)
    return T


@lru_cache(maxsize=4096)
def velocity_conversion(j: int, num_intervals: int, basis: str) -> np.ndarray:
    """Matrix T with V_basis = T @ V_bs for velocity points stored as rows."""
    if basis == "bs":
        return np.eye(3)
    A_bs = velocity_segment_matrix(j, num_intervals)
    A_b = velocity_basis_matrix(basis, j, num_intervals)
    T = (A_bs @ np.linalg.inv(A_b)).T
    T.setflags(write=False)
    return T


def convert_interval_position(q_bs: np.ndarray, j: int, num_intervals: int,
                              basis: str = "mv") -> np.ndarray:
    """Convert the 4 B-spline control points of interval j (rows of a
    (4, 3) array) to the target basis.  Same polynomial, new points."""
    q_bs = np.asarray(q_bs, dtype=float)
    if q_bs.shape != (4, 3):
        raise ValueError("expected 4 control points of dim 3")
    return position_conversion(j, num_intervals, basis) @ q_bs


def bs_velocity_points(q_bs: np.ndarray, j: int, num_intervals: int, dt: float) -> np.ndarray:
    """The 3 B-spline velocity control points of interval j from its 4
    position control points (v_l = p (q_{l+1}-q_l) / knot span)."""
    from swarmplan.splines import DEGREE, _normalized_knots

    k = _normalized_knots(num_intervals)
    ell = np.arange(j, j + 3)
    spans = (k[ell + DEGREE + 1] - k[ell + 1]) * dt
    return DEGREE * (q_bs[1:] - q_bs[:-1]) / spans[:, None]


def convert_interval_velocity(q_bs: np.ndarray, j: int, num_intervals: int,
                              dt: float, basis: str = "mv") -> np.ndarray:
    """Velocity control points of interval j in the target basis, from
    the interval's 4 B-spline position control points."""
    v_bs = bs_velocity_points(np.asarray(q_bs, float), j, num_intervals, dt)
    return velocity_conversion(j, num_intervals, basis) @ v_bs


def spline_interval_points(s: Spline, j: int, basis: str = "mv") -> np.ndarray:
    """Position control points of interval j of a spline, in a basis."""
    return convert_interval_position(s.interval_points(j), j, s.num_intervals, basis)


def all_interval_points(s: Spline, basis: str = "mv") -> np.ndarray:
    """Position control points of every interval, shape (J, 4, 3)."""
    J = s.num_intervals
    return np.stack(
        [spline_interval_points(s, j, basis) for j in range(J)]
    )


def spline_interval_velocity_points(s: Spline, j: int, basis: str = "mv") -> np.ndarray:
    return convert_interval_velocity(
        s.interval_points(j), j, s.num_intervals, s.dt, basis
    )


# ---------------------------------------------------------------------------
# Simplex volumes and the basis comparison report
# ---------------------------------------------------------------------------


def simplex_volume(points: np.ndarray) -> float:
    """Volume of the tetrahedron spanned by 4 points (0 if degenerate)."""
    p = np.asarray(points, dtype=float)
    if p.shape != (4, 3):
        raise ValueError("expected 4 points of dim 3")
    return abs(float(np.linalg.det(p[1:] - p[0]))) / 6.0


def triangle_area(points: np.ndarray) -> float:
    """Area of the triangle spanned by 3 points in 3D."""
    p = np.asarray(points, dtype=float)
    if p.shape != (3, 3):
        raise ValueError("expected 3 points of dim 3")
    return float(np.linalg.norm(np.cross(p[1] - p[0], p[2] - p[0]))) / 2.0


@dataclass
class VolumeReportRow:
    basis: str
    space: str  # "position" | "velocity"
    interval_class: str
    mean_volume: float
    ratio_to_mv: float | None


def volume_ratio_report(sample_splines: list[Spline]) -> list[VolumeReportRow]:
    """Mean enclosing-simplex volume per basis over the interior
    intervals of the sample splines, and each basis's ratio to the
    minimum-volume basis.  Degenerate samples give zero volumes and an
    undefined (None) ratio."""
    if not sample_splines:
        raise ValueError("need at least one spline")
    vols = {b: [] for b in BASES}
    areas = {b: [] for b in BASES}
    for s in sample_splines:
        J = s.num_intervals
        for j in range(J):
            if not (2 <= j <= J - 3):
                continue  # interior intervals only
            for b in BASES:
                vols[b].append(simplex_volume(spline_interval_points(s, j, b)))
                areas[b].append(
                    triangle_area(spline_interval_velocity_points(s, j, b))
                )
    rows = []
    for space, acc in (("position", vols), ("velocity", areas)):
        mv_mean = float(np.mean(acc["mv"])) if acc["mv"] else 0.0
        for b in BASES:
            mean = float(np.mean(acc[b])) if acc[b] else 0.0
            ratio = mean / mv_mean if mv_mean > 0 else None
            rows.append(VolumeReportRow(b, space, "interior", mean, ratio))
    return rows


def volume_report_csv(rows: list[VolumeReportRow]) -> str:
    lines = ["basis,space,interval_class,mean_volume,ratio_to_minvo"]
    for r in rows:
        ratio = "" if r.ratio_to_mv is None else repr(r.ratio_to_mv)
        lines.append(f"{r.basis},{r.space},{r.interval_class},{r.mean_volume!r},{ratio}")
    return "\n".join(lines) + "\n"
