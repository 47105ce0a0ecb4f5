"""Independent reference implementations used to check the library.

Everything in here is deliberately written from textbook definitions
(recursions, finite differences, brute-force enumeration) and stays
independent of the code paths it validates.
"""

import numpy as np


def brute_clamped_knots(n, t_in, t_f, p=3):
    """Knot vector built knot-by-knot from the clamped uniform rule."""
    m = n + p + 1
    num_internal = m - 2 * (p + 1) + 1  # distinct internal knots
    dt = (t_f - t_in) / (num_internal + 1)
    knots = []
    for i in range(m + 1):
        if i <= p:
            knots.append(t_in)
        elif i >= m - p:
            knots.append(t_f)
        else:
            knots.append(t_in + (i - p) * dt)
    return np.array(knots)


def deboor_point(knots, points, degree, t):
    """De Boor recursion for one curve point (textbook form)."""
    knots = np.asarray(knots, float)
    points = np.asarray(points, float)
    m = len(knots) - 1
    # locate the knot span k with t in [knots[k], knots[k+1])
    if t >= knots[m - degree]:
        k = m - degree - 1
    else:
        k = int(np.searchsorted(knots, t, side="right") - 1)
    d = [points[i].astype(float).copy() for i in range(k - degree, k + 1)]
    for r in range(1, degree + 1):
        for i in range(degree, r - 1, -1):
            lo = knots[k - degree + i]
            hi = knots[i + k - r + 1]
            alpha = 0.0 if hi == lo else (t - lo) / (hi - lo)
            d[i] = (1.0 - alpha) * d[i - 1] + alpha * d[i]
    return d[degree]


def finite_difference(fn, t, h=1e-6):
    """Central difference derivative of a vector-valued function."""
    return (np.asarray(fn(t + h)) - np.asarray(fn(t - h))) / (2.0 * h)


def jerk_energy_quadrature(fn, t0, t1, samples=4000):
    """integral of ||third derivative||^2 via dense finite differences."""
    ts = np.linspace(t0, t1, samples)
    h = 1e-4 * (t1 - t0)
    # keep the FD stencil inside the domain
    ts = np.clip(ts, t0 + 2 * h, t1 - 2 * h)
    jerks = []
    for t in ts:
        # third central difference
        vals = [np.asarray(fn(t + k * h)) for k in (-2, -1, 1, 2)]
        j = (-0.5 * vals[0] + vals[1] - vals[2] + 0.5 * vals[3]) / h**3
        jerks.append(j @ j)
    return np.trapezoid(jerks, ts)


def random_spline(rng, n=None, dim_scale=5.0, t_span=None):
    """A random clamped cubic spline (library constructor is used; tests
    that need full independence build knots via brute_clamped_knots)."""
    from swarmplan.splines import make_clamped_spline

    if n is None:
        n = int(rng.integers(3, 13))
    t_in = float(rng.uniform(-5.0, 5.0))
    span = float(rng.uniform(0.5, 8.0)) if t_span is None else t_span
    pts = rng.uniform(-dim_scale, dim_scale, size=(n + 1, 3))
    return make_clamped_spline(n, t_in, t_in + span, pts)


def hull_clearance_lower_bound(pts_a, pts_b):
    """Lower bound on the distance between conv(pts_a) and conv(pts_b).

    Works on the Minkowski difference cloud: the clearance equals the
    distance from the origin to conv(a - b for a, b in A x B).  The max
    signed facet-plane distance of that hull is a valid lower bound (it
    is exact whenever the nearest feature is a facet).  Returns 0.0 when
    the hulls overlap.
    """
    from scipy.spatial import ConvexHull, QhullError

    pts_a = np.asarray(pts_a, float)
    pts_b = np.asarray(pts_b, float)
    diffs = (pts_a[:, None, :] - pts_b[None, :, :]).reshape(-1, 3)
    if len(diffs) == 1:
        return float(np.linalg.norm(diffs[0]))
    try:
        hull = ConvexHull(diffs)
        # hull.equations rows: [nx, ny, nz, offset], n.x + offset <= 0 inside
        dists = hull.equations[:, 3]  # signed distance of origin: n.0 + offset
        return max(0.0, float(np.max(dists)))
    except QhullError:
        # degenerate cloud: directional support bound (still a valid
        # lower bound, just looser)
        rng = np.random.default_rng(12345)
        dirs = rng.normal(size=(512, 3))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        dirs = np.vstack([dirs, np.eye(3), -np.eye(3)])
        supports = (diffs @ dirs.T).min(axis=0)
        return max(0.0, float(np.max(supports)))


def min_pairwise_distance(fn_a, fn_b, t0, t1, step=1e-3):
    """Dense-grid minimum distance between two moving points."""
    ts = np.arange(t0, t1 + step, step)
    pa = np.array([fn_a(t) for t in ts])
    pb = np.array([fn_b(t) for t in ts])
    return float(np.min(np.linalg.norm(pa - pb, axis=1)))
