"""Convex geometry: AABBs, interval hulls, separating planes.

Collision constraints are certificates of separation between convex
vertex sets: the planner's interval control points on one side, an
obstacle/agent interval hull on the other.  A hull here is always a
finite vertex set; the polyhedron is its convex hull.

``separating_plane`` realizes the strict separation inequalities as
margin inequalities (an LP cannot express strict ones): it returns a
plane with n.c + d >= margin on the hull side and n.q + d <= -margin on
the query side, under the normalization ||n||_inf <= 1, or None when no
such plane exists.  The search direction comes from a GJK closest-point
query between the convex hulls; every returned plane is verified
against all vertices before being accepted, and an LP fallback covers
any borderline case the primal construction misses.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_MARGIN = 1e-6

_CORNER_SIGNS = np.array(
    [[sx, sy, sz] for sx in (-1.0, 1.0) for sy in (-1.0, 1.0) for sz in (-1.0, 1.0)]
)


@dataclass
class Aabb:
    """Axis-aligned box given by center and half extents."""

    center: np.ndarray
    half_extents: np.ndarray

    def __post_init__(self):
        self.center = np.asarray(self.center, dtype=float)
        self.half_extents = np.asarray(self.half_extents, dtype=float)
        if self.center.shape != (3,) or self.half_extents.shape != (3,):
            raise ValueError("center and half_extents must be 3-vectors")
        if np.any(self.half_extents < 0):
            raise ValueError("half_extents must be nonnegative")

    def corners(self) -> np.ndarray:
        """The 8 corner points, shape (8, 3)."""
        return self.center + _CORNER_SIGNS * self.half_extents

    def to_dict(self) -> dict:
        return {"center": self.center.tolist(), "half_extents": self.half_extents.tolist()}

    @staticmethod
    def from_dict(d: dict) -> "Aabb":
        return Aabb(np.asarray(d["center"], float), np.asarray(d["half_extents"], float))


def inflate(b: Aabb, by) -> Aabb:
    """Grow the box: `by` holds full side-length increments, so the half
    extents grow by by/2 per side."""
    by = np.asarray(by, dtype=float)
    if np.any(by < 0):
        raise ValueError("inflation must be nonnegative")
    return Aabb(b.center.copy(), b.half_extents + by / 2.0)


@dataclass
class Plane:
    """Plane n.x + d = 0 separating two vertex sets (positive side first)."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        self.normal = np.asarray(self.normal, dtype=float)
        if np.linalg.norm(self.normal) == 0.0:
            raise ValueError("plane normal must be nonzero")

    def side(self, points: np.ndarray) -> np.ndarray:
        return np.asarray(points, float) @ self.normal + self.offset


@dataclass
class IntervalHull:
    """Vertex set of the outer polyhedron of one trajectory interval."""

    entity_id: object
    j: int
    vertices: np.ndarray
    degenerate: bool = False

    def __post_init__(self):
        self.vertices = np.asarray(self.vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 3:
            raise ValueError("vertices must be (k, 3)")
        if not np.all(np.isfinite(self.vertices)):
            raise ValueError("vertices must be finite")

    def to_dict(self) -> dict:
        return {
            "entity_id": self.entity_id,
            "j": self.j,
            "vertices": self.vertices.tolist(),
        }


# ---------------------------------------------------------------------------
# Convex hull of a point set (with degenerate fallbacks)
# ---------------------------------------------------------------------------


def convex_hull(points: np.ndarray) -> tuple[np.ndarray, bool]:
    """Extreme points of a point set.

    Returns (vertices, degenerate); degenerate is True when the points
    are affinely dependent (coplanar, collinear or coincident), in which
    case the extreme points of the lower-dimensional hull are returned.
    """
    from scipy.spatial import ConvexHull, QhullError

    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 3:
        raise ValueError("points must be (k, 3)")
    if len(pts) == 0:
        raise ValueError("need at least one point")
    centered = pts - pts.mean(axis=0)
    # rank decides the dimensionality of the hull
    u, sv, vt = np.linalg.svd(centered, full_matrices=False)
    scale = sv[0] if sv[0] > 0 else 1.0
    rank = int(np.sum(sv > 1e-12 * scale))
    if rank == 0:
        return pts[:1].copy(), True
    if rank == 1:
        axis = vt[0]
        proj = centered @ axis
        return pts[[int(np.argmin(proj)), int(np.argmax(proj))]], True
    if rank == 2:
        basis = vt[:2]
        flat = centered @ basis.T
        try:
            hull = ConvexHull(flat)
            return pts[hull.vertices], True
        except QhullError:
            return pts, True
    try:
        hull = ConvexHull(pts)
        return pts[hull.vertices], False
    except QhullError:
        return pts, True


# ---------------------------------------------------------------------------
# GJK distance between convex hulls of point sets
# ---------------------------------------------------------------------------


def _closest_on_segment(a, b):
    ax, ay, az = a
    bx, by, bz = b
    ex, ey, ez = bx - ax, by - ay, bz - az
    denom = ex * ex + ey * ey + ez * ez
    if denom <= 0.0:
        return a, (1.0, 0.0)
    t = -(ax * ex + ay * ey + az * ez) / denom
    t = 0.0 if t < 0.0 else (1.0 if t > 1.0 else t)
    return (ax + t * ex, ay + t * ey, az + t * ez), (1.0 - t, t)


def _closest_on_triangle(a, b, c):
    """Closest point to the origin on triangle abc with barycentrics."""
    ax, ay, az = a
    bx, by, bz = b
    cx, cy, cz = c
    abx, aby, abz = bx - ax, by - ay, bz - az
    acx, acy, acz = cx - ax, cy - ay, cz - az
    d1 = -(abx * ax + aby * ay + abz * az)
    d2 = -(acx * ax + acy * ay + acz * az)
    if d1 <= 0.0 and d2 <= 0.0:
        return a, (1.0, 0.0, 0.0)
    d3 = -(abx * bx + aby * by + abz * bz)
    d4 = -(acx * bx + acy * by + acz * bz)
    if d3 >= 0.0 and d4 <= d3:
        return b, (0.0, 1.0, 0.0)
    vc = d1 * d4 - d3 * d2
    if vc <= 0.0 <= d1 and d3 <= 0.0 and d1 > d3:
        t = d1 / (d1 - d3)
        return (ax + t * abx, ay + t * aby, az + t * abz), (1.0 - t, t, 0.0)
    d5 = -(abx * cx + aby * cy + abz * cz)
    d6 = -(acx * cx + acy * cy + acz * cz)
    if d6 >= 0.0 and d5 <= d6:
        return c, (0.0, 0.0, 1.0)
    vb = d5 * d2 - d1 * d6
    if vb <= 0.0 <= d2 and d6 <= 0.0 and d2 > d6:
        t = d2 / (d2 - d6)
        return (ax + t * acx, ay + t * acy, az + t * acz), (1.0 - t, 0.0, t)
    va = d3 * d6 - d5 * d4
    if va <= 0.0 and d4 - d3 >= 0.0 and d5 - d6 >= 0.0 and (d4 - d3) + (d5 - d6) > 0.0:
        t = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return (
            bx + t * (cx - bx),
            by + t * (cy - by),
            bz + t * (cz - bz),
        ), (0.0, 1.0 - t, t)
    denom = va + vb + vc
    if denom <= 0.0:  # degenerate triangle: fall back to best edge
        best, best_d2 = None, None
        for (i, k), (p, q) in (((0, 1), (a, b)), ((0, 2), (a, c)), ((1, 2), (b, c))):
            pt, lam = _closest_on_segment(p, q)
            dd = pt[0] * pt[0] + pt[1] * pt[1] + pt[2] * pt[2]
            if best is None or dd < best_d2:
                full = [0.0, 0.0, 0.0]
                full[i], full[k] = lam
                best, best_d2 = (pt, tuple(full)), dd
        return best
    v, w = vb / denom, vc / denom
    return (
        ax + abx * v + acx * w,
        ay + aby * v + acy * w,
        az + abz * v + acz * w,
    ), (1.0 - v - w, v, w)


def _closest_on_simplex(pts: list):
    """Closest point to the origin on a 1-4 point simplex (tuples).

    Returns (point, barycentrics); inside a tetrahedron the distance is
    zero.  Zero-weight vertices are the caller's cue to drop them."""
    k = len(pts)
    if k == 1:
        return pts[0], (1.0,)
    if k == 2:
        return _closest_on_segment(pts[0], pts[1])
    if k == 3:
        return _closest_on_triangle(pts[0], pts[1], pts[2])
    faces = ((0, 1, 2, 3), (0, 1, 3, 2), (0, 2, 3, 1), (1, 2, 3, 0))
    best_p, best_lam, best_d2 = None, None, None
    inside = True
    for i1, i2, i3, i4 in faces:
        p1, p2, p3, p4 = pts[i1], pts[i2], pts[i3], pts[i4]
        ux, uy, uz = p2[0] - p1[0], p2[1] - p1[1], p2[2] - p1[2]
        wx, wy, wz = p3[0] - p1[0], p3[1] - p1[1], p3[2] - p1[2]
        nx, ny, nz = uy * wz - uz * wy, uz * wx - ux * wz, ux * wy - uy * wx
        sign_origin = -(p1[0] * nx + p1[1] * ny + p1[2] * nz)
        sign_other = (p4[0] - p1[0]) * nx + (p4[1] - p1[1]) * ny + (p4[2] - p1[2]) * nz
        if sign_origin * sign_other < 0.0:  # origin outside this face
            inside = False
            p, lam3 = _closest_on_triangle(p1, p2, p3)
            dd = p[0] * p[0] + p[1] * p[1] + p[2] * p[2]
            if best_p is None or dd < best_d2:
                lam = [0.0, 0.0, 0.0, 0.0]
                lam[i1], lam[i2], lam[i3] = lam3
                best_p, best_lam, best_d2 = p, tuple(lam), dd
    if inside:
        return (0.0, 0.0, 0.0), (0.25, 0.25, 0.25, 0.25)
    return best_p, best_lam


def gjk_distance(pts_a: np.ndarray, pts_b: np.ndarray,
                 max_iter: int = 128) -> tuple[float, np.ndarray, np.ndarray]:
    """Distance between conv(pts_a) and conv(pts_b) with closest points.

    Returns (distance, point_on_a, point_on_b); distance 0 when the
    hulls intersect.
    """
    A = np.ascontiguousarray(pts_a, dtype=float)
    B = np.ascontiguousarray(pts_b, dtype=float)
    scale = max(
        1.0,
        float(np.max(np.abs(A))) if A.size else 1.0,
        float(np.max(np.abs(B))) if B.size else 1.0,
    )
    tol = 1e-14 * scale * scale
    direction = np.empty(3)

    def support(dx, dy, dz):
        direction[0], direction[1], direction[2] = dx, dy, dz
        ia = int(np.argmax(A @ direction))
        ib = int(np.argmin(B @ direction))
        return ia, ib

    ia, ib = support(1.0, 0.0, 0.0)
    idx = [(ia, ib)]
    wa, wb = A[ia], B[ib]
    W = [(wa[0] - wb[0], wa[1] - wb[1], wa[2] - wb[2])]
    lam = (1.0,)
    v = W[0]
    progress_tol = 1e-12 * scale
    for _ in range(max_iter):
        vv = v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
        if vv <= tol:
            break  # touching / intersecting
        ia, ib = support(-v[0], -v[1], -v[2])
        if (ia, ib) in idx:
            break
        wa, wb = A[ia], B[ib]
        w = (wa[0] - wb[0], wa[1] - wb[1], wa[2] - wb[2])
        # no significant progress toward the origin
        if vv - (v[0] * w[0] + v[1] * w[1] + v[2] * w[2]) <= progress_tol * np.sqrt(vv):
            break
        idx.append((ia, ib))
        W.append(w)
        v, lam = _closest_on_simplex(W)
        if len(W) > 1:
            kept = [i for i, l in enumerate(lam) if l > 1e-14]
            if len(kept) < len(W):
                W = [W[i] for i in kept]
                idx = [idx[i] for i in kept]
                lam = tuple(lam[i] for i in kept)
            s = sum(lam)
            if s > 0.0:
                lam = tuple(l / s for l in lam)
    pa = np.zeros(3)
    pb = np.zeros(3)
    for l, (i, k) in zip(lam, idx):
        pa += l * A[i]
        pb += l * B[k]
    dist2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
    if dist2 <= tol:
        return 0.0, pa, pb
    return float(np.sqrt(dist2)), pa, pb


# ---------------------------------------------------------------------------
# Separating planes
# ---------------------------------------------------------------------------


def _verified(plane: Plane, pos_pts, neg_pts, margin: float) -> bool:
    return bool(
        np.min(plane.side(pos_pts)) >= margin - 1e-15
        and np.max(plane.side(neg_pts)) <= -(margin - 1e-15)
    )


def _plane_lp(pos_pts, neg_pts, margin: float) -> Plane | None:
    """LP fallback: maximize the slack s of n.x + d >= s / <= -s with
    ||n||_inf <= 1; feasible when the optimum reaches the margin."""
    from scipy.optimize import linprog

    pos_pts = np.asarray(pos_pts, float)
    neg_pts = np.asarray(neg_pts, float)
    npos, nneg = len(pos_pts), len(neg_pts)
    # variables: n (3), d, s ; maximize s
    A_ub = np.zeros((npos + nneg, 5))
    A_ub[:npos, :3] = -pos_pts
    A_ub[:npos, 3] = -1.0
    A_ub[:npos, 4] = 1.0
    A_ub[npos:, :3] = neg_pts
    A_ub[npos:, 3] = 1.0
    A_ub[npos:, 4] = 1.0
    b_ub = np.zeros(npos + nneg)
    scale = max(1.0, float(np.max(np.abs(pos_pts))), float(np.max(np.abs(neg_pts))))
    bounds = [(-1, 1), (-1, 1), (-1, 1), (-4 * scale, 4 * scale), (0, 2 * scale)]
    res = linprog(
        c=[0, 0, 0, 0, -1.0], A_ub=A_ub, b_ub=b_ub, bounds=bounds, method="highs"
    )
    if not res.success or res.x[4] < margin:
        return None
    n = res.x[:3]
    if np.max(np.abs(n)) == 0.0:
        return None
    plane = Plane(n, float(res.x[3]))
    return plane if _verified(plane, pos_pts, neg_pts, margin) else None


def separating_plane(hull_vertices, query_points, margin: float = DEFAULT_MARGIN,
                     seed: Plane | None = None) -> Plane | None:
    """Plane with hull_vertices strictly on the positive side and
    query_points on the negative side (margin inequalities under
    ||n||_inf <= 1), or None when the sets cannot be separated.

    `seed` lets callers retry a previously valid plane first, which is
    cheap when geometry changes slowly between queries.
    """
    C = np.asarray(hull_vertices, dtype=float)
    Q = np.asarray(query_points, dtype=float)
    if C.ndim != 2 or C.shape[1] != 3 or len(C) == 0:
        raise ValueError("hull vertex set must be a nonempty (k, 3) array")
    if Q.ndim != 2 or Q.shape[1] != 3 or len(Q) == 0:
        raise ValueError("query point set must be a nonempty (k, 3) array")

    if seed is not None and _verified(seed, C, Q, margin):
        return seed

    # axis-aligned fast path
    cmin, cmax = C.min(axis=0), C.max(axis=0)
    qmin, qmax = Q.min(axis=0), Q.max(axis=0)
    for ax in range(3):
        if cmin[ax] - qmax[ax] >= 2 * margin:
            n = np.zeros(3)
            n[ax] = 1.0
            plane = Plane(n, -0.5 * (cmin[ax] + qmax[ax]))
            if _verified(plane, C, Q, margin):
                return plane
        if qmin[ax] - cmax[ax] >= 2 * margin:
            n = np.zeros(3)
            n[ax] = -1.0
            plane = Plane(n, 0.5 * (qmin[ax] + cmax[ax]))
            if _verified(plane, C, Q, margin):
                return plane

    dist, pc, pq = gjk_distance(C, Q)
    if dist > 0.0:
        direction = pc - pq
        nrm = np.linalg.norm(direction)
        if nrm > 0.0:
            n = direction / np.max(np.abs(direction))
            mid = 0.5 * (pc + pq)
            plane = Plane(n, -float(n @ mid))
            if _verified(plane, C, Q, margin):
                return plane
    if dist > 4.0 * margin:
        # GJK says clearly separated but the primal plane failed
        # verification (numerical corner): let the LP certify it.
        return _plane_lp(C, Q, margin)
    if dist <= 2.0 * margin:
        return None
    # borderline band: decide by LP
    return _plane_lp(C, Q, margin)


# ---------------------------------------------------------------------------
# Interval hulls (outer polyhedra of trajectory intervals)
# ---------------------------------------------------------------------------


def minkowski_with_box(points: np.ndarray, box: Aabb) -> np.ndarray:
    """Vertices of points (+) box: every box corner at every point."""
    pts = np.asarray(points, dtype=float)
    return (pts[:, None, :] + box.corners()[None, :, :]).reshape(-1, 3)


def agent_interval_hull(spline, window: tuple[float, float], box: Aabb,
                        entity_id=None, j: int = 0, basis: str = "mv",
                        reduce: bool = True) -> IntervalHull:
    """Outer polyhedron of a committed spline over a time window: the
    inflated box placed at the enclosing control points of every spline
    interval that overlaps the window.

    Windows (partially) beyond the spline's span use the endpoint
    control points: the final stop condition parks the agent at its
    last control point, and before t_in it sits at the first one.
    """
    from swarmplan.bases import spline_interval_points

    ta, tb = window
    if not tb > ta:
        raise ValueError("empty window")
    pts = []
    eps = 1e-12 * max(1.0, abs(tb - ta))
    if ta < spline.t_in - eps:
        pts.append(spline.control_points[:1])
    if tb > spline.t_f + eps:
        pts.append(spline.control_points[-1:])
    for k in range(spline.num_intervals):
        wa, wb = spline.interval_window(k)
        if wa < tb - eps and wb > ta + eps:
            pts.append(spline_interval_points(spline, k, basis))
    if not pts:  # window degenerate w.r.t. the spline span
        mid_t = min(max(0.5 * (ta + tb), spline.t_in), spline.t_f)
        k = spline.interval_index(mid_t)
        pts.append(spline_interval_points(spline, k, basis))
    cloud = minkowski_with_box(np.vstack(pts), box)
    degenerate = False
    if reduce:
        cloud, degenerate = convex_hull(cloud)
    return IntervalHull(entity_id, j, cloud, degenerate)


def obstacle_interval_hull(position_fn, window: tuple[float, float], box: Aabb,
                           gamma: float, entity_id=None, j: int = 0,
                           reduce: bool = True) -> IntervalHull:
    """Outer polyhedron of an obstacle over a window: the inflated box
    placed at every sample of the predicted trajectory, sampled with
    step <= gamma including both endpoints."""
    ta, tb = window
    if not tb > ta:
        raise ValueError("empty window")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    length = tb - ta
    if gamma > length + 1e-12:
        raise ValueError("gamma larger than the window drops coverage")
    nseg = max(1, int(np.ceil(length / gamma - 1e-12)))
    ts = np.linspace(ta, tb, nseg + 1)
    samples = np.asarray([position_fn(t) for t in ts], dtype=float)
    cloud = minkowski_with_box(samples, box)
    degenerate = False
    if reduce:
        cloud, degenerate = convex_hull(cloud)
    return IntervalHull(entity_id, j, cloud, degenerate)
