"""Clamped uniform cubic B-splines: construction, evaluation, derivatives.

A trajectory is a clamped uniform cubic B-spline: n+1 control points,
m+1 knots with m = n + p + 1 (p = 3), the first and last p+1 knots
repeated so the curve interpolates its endpoint control points, and the
internal knots equally spaced.  Each of the n - p + 1 intervals is a
cubic polynomial evaluated in matrix form,

    p(t) = Q_j . A_j . [u^3, u^2, u, 1]^T,       u = (t - t_j) / dt,

where Q_j holds the 4 control points active on interval j and A_j is
the per-interval segment matrix (intervals near the clamped ends have
different matrices from interior ones).  Segment matrices are built
once from the local knot pattern and cached.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

DEGREE = 3  # cubic splines throughout


@dataclass
class AgentState:
    """Position, velocity and acceleration of an agent at one instant."""

    position: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray

    def __post_init__(self):
        self.position = np.asarray(self.position, dtype=float)
        self.velocity = np.asarray(self.velocity, dtype=float)
        self.acceleration = np.asarray(self.acceleration, dtype=float)
        for v in (self.position, self.velocity, self.acceleration):
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ValueError("state vectors must be finite 3-vectors")

    @staticmethod
    def at_rest(position) -> "AgentState":
        return AgentState(np.asarray(position, float), np.zeros(3), np.zeros(3))


@dataclass
class Spline:
    """Clamped uniform cubic B-spline in 3D.

    Attributes:
        n: index of the last control point (n+1 points total).
        t_in, t_f: start and end times of the curve.
        control_points: (n+1, 3) array.
        knots: (m+1,) array with m = n + DEGREE + 1.
    """

    n: int
    t_in: float
    t_f: float
    control_points: np.ndarray
    knots: np.ndarray

    @property
    def num_intervals(self) -> int:
        return self.n - DEGREE + 1

    @property
    def dt(self) -> float:
        return (self.t_f - self.t_in) / self.num_intervals

    def interval_index(self, t: float) -> int:
        """Interval containing t; knot boundaries belong to the right
        interval except t_f, which belongs to the last one."""
        j = int(np.floor((t - self.t_in) / self.dt))
        return min(max(j, 0), self.num_intervals - 1)

    def interval_window(self, j: int) -> tuple[float, float]:
        return (self.t_in + j * self.dt, self.t_in + (j + 1) * self.dt)

    def interval_points(self, j: int) -> np.ndarray:
        """The 4 control points active on interval j, shape (4, 3)."""
        return self.control_points[j : j + 4]


def make_clamped_spline(n: int, t_in: float, t_f: float, control_points) -> Spline:
    """Build a clamped uniform cubic spline from its control points."""
    if n < DEGREE:
        raise ValueError(f"need n >= {DEGREE} (got n={n}): at least one interval")
    if not t_f > t_in:
        raise ValueError(f"need t_f > t_in (got {t_in}..{t_f})")
    pts = np.asarray(control_points, dtype=float)
    if pts.shape != (n + 1, 3):
        raise ValueError(f"expected {n + 1} control points of dim 3, got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("control points must be finite")
    num_intervals = n - DEGREE + 1
    distinct = np.linspace(t_in, t_f, num_intervals + 1)
    knots = np.concatenate(
        [np.full(DEGREE, t_in), distinct, np.full(DEGREE, t_f)]
    )
    return Spline(n=n, t_in=float(t_in), t_f=float(t_f), control_points=pts, knots=knots)


# ---------------------------------------------------------------------------
# Per-interval segment matrices.
#
# Built from the local knot window by running the B-spline recursion on
# polynomial coefficients, with the interval normalized to u in [0, 1].
# For a clamped uniform spline with >= 5 intervals this yields exactly
# five distinct matrices (first, second, interior, second-to-last and
# last interval); shorter splines get the correct merged variants.
# ---------------------------------------------------------------------------


def _segment_matrix_from_window(window: tuple[float, ...], degree: int) -> np.ndarray:
    """Segment matrix (degree+1 x degree+1) for the interval
    [window[degree], window[degree+1]], given the 2*degree+2 local knots.

    Row l holds the coefficients (descending powers of u) of basis
    function N_{l} restricted to the interval.
    """
    k = np.asarray(window, dtype=float)
    a, b = k[degree], k[degree + 1]
    span = b - a
    # base case: only the degree-0 basis whose support is our interval
    polys = [np.zeros(1) for _ in range(len(k) - 1)]
    polys[degree] = np.ones(1)
    for d in range(1, degree + 1):
        nxt = []
        for i in range(len(k) - 1 - d):
            c = np.zeros(d + 1)
            den1 = k[i + d] - k[i]
            if den1 > 0.0:
                # multiply polys[i] by (t - k[i]) / den1, t = a + u * span
                c[: d] += polys[i] * (span / den1)
                c[1:] += polys[i] * ((a - k[i]) / den1)
            den2 = k[i + d + 1] - k[i + 1]
            if den2 > 0.0:
                c[: d] += polys[i + 1] * (-span / den2)
                c[1:] += polys[i + 1] * ((k[i + d + 1] - a) / den2)
            nxt.append(c)
        polys = nxt
    return np.vstack(polys)


@lru_cache(maxsize=4096)
def _cached_matrix(window: tuple, degree: int) -> np.ndarray:
    mat = _segment_matrix_from_window(window, degree)
    mat.setflags(write=False)
    return mat


def _normalized_knots(num_intervals: int) -> np.ndarray:
    distinct = np.arange(num_intervals + 1, dtype=float)
    return np.concatenate(
        [np.zeros(DEGREE), distinct, np.full(DEGREE, float(num_intervals))]
    )


def position_segment_matrix(j: int, num_intervals: int) -> np.ndarray:
    """A_j for position (4x4), interval j of a spline with the given
    number of intervals.  Depends only on the local knot pattern."""
    if not 0 <= j < num_intervals:
        raise ValueError(f"interval {j} out of range (J={num_intervals})")
    k = _normalized_knots(num_intervals)
    window = k[j : j + 2 * DEGREE + 2] - k[DEGREE + j]
    return _cached_matrix(tuple(window), DEGREE)


def velocity_segment_matrix(j: int, num_intervals: int) -> np.ndarray:
    """Segment matrix (3x3) of the degree-2 velocity spline on interval j."""
    if not 0 <= j < num_intervals:
        raise ValueError(f"interval {j} out of range (J={num_intervals})")
    k = _normalized_knots(num_intervals)[1:-1]  # derivative knot vector
    d = DEGREE - 1
    window = k[j : j + 2 * d + 2] - k[d + j]
    return _cached_matrix(tuple(window), d)


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


def _check_domain(s: Spline, t) -> None:
    t = np.asarray(t, dtype=float)
    eps = 1e-9 * max(1.0, abs(s.t_f - s.t_in))
    if np.any(t < s.t_in - eps) or np.any(t > s.t_f + eps):
        raise ValueError(f"t outside [{s.t_in}, {s.t_f}]")


def eval_position(s: Spline, t: float) -> np.ndarray:
    """Curve position at time t (t must lie in [t_in, t_f])."""
    _check_domain(s, t)
    j = s.interval_index(t)
    u = (t - (s.t_in + j * s.dt)) / s.dt
    A = position_segment_matrix(j, s.num_intervals)
    w = A @ np.array([u**3, u**2, u, 1.0])
    return s.interval_points(j).T @ w


def eval_velocity(s: Spline, t: float) -> np.ndarray:
    _check_domain(s, t)
    j = s.interval_index(t)
    u = (t - (s.t_in + j * s.dt)) / s.dt
    A = position_segment_matrix(j, s.num_intervals)
    w = A @ np.array([3 * u**2, 2 * u, 1.0, 0.0])
    return s.interval_points(j).T @ w / s.dt


def eval_acceleration(s: Spline, t: float) -> np.ndarray:
    _check_domain(s, t)
    j = s.interval_index(t)
    u = (t - (s.t_in + j * s.dt)) / s.dt
    A = position_segment_matrix(j, s.num_intervals)
    w = A @ np.array([6 * u, 2.0, 0.0, 0.0])
    return s.interval_points(j).T @ w / s.dt**2


def eval_positions(s: Spline, ts: np.ndarray) -> np.ndarray:
    """Vectorized eval_position over an array of times, shape (N, 3)."""
    ts = np.asarray(ts, dtype=float)
    _check_domain(s, ts)
    J = s.num_intervals
    js = np.clip(np.floor((ts - s.t_in) / s.dt).astype(int), 0, J - 1)
    us = (ts - (s.t_in + js * s.dt)) / s.dt
    mats = np.stack([position_segment_matrix(j, J) for j in range(J)])
    upow = np.stack([us**3, us**2, us, np.ones_like(us)], axis=1)
    w = np.einsum("nkl,nl->nk", mats[js], upow)
    p4 = s.control_points[js[:, None] + np.arange(4)[None, :]]
    return np.einsum("nk,nkd->nd", w, p4)


def eval_velocities(s: Spline, ts: np.ndarray) -> np.ndarray:
    """Vectorized eval_velocity over an array of times, shape (N, 3)."""
    ts = np.asarray(ts, dtype=float)
    _check_domain(s, ts)
    J = s.num_intervals
    js = np.clip(np.floor((ts - s.t_in) / s.dt).astype(int), 0, J - 1)
    us = (ts - (s.t_in + js * s.dt)) / s.dt
    mats = np.stack([position_segment_matrix(j, J) for j in range(J)])
    dupow = np.stack(
        [3 * us**2, 2 * us, np.ones_like(us), np.zeros_like(us)], axis=1
    )
    w = np.einsum("nkl,nl->nk", mats[js], dupow)
    p4 = s.control_points[js[:, None] + np.arange(4)[None, :]]
    return np.einsum("nk,nkd->nd", w, p4) / s.dt


def derivative_control_points(s: Spline) -> tuple[np.ndarray, np.ndarray]:
    """Control points of the velocity (degree 2) and acceleration
    (degree 1) splines.

    v_l = p (q_{l+1} - q_l) / (t_{l+p+1} - t_{l+1})      l = 0..n-1
    a_l = (p-1) (v_{l+1} - v_l) / (t_{l+p+1} - t_{l+2})  l = 0..n-2
    """
    q, k, p = s.control_points, s.knots, DEGREE
    n = s.n
    ell = np.arange(n)
    vden = k[ell + p + 1] - k[ell + 1]
    v = p * (q[1:] - q[:-1]) / vden[:, None]
    ell = np.arange(n - 1)
    aden = k[ell + p + 1] - k[ell + 2]
    a = (p - 1) * (v[1:] - v[:-1]) / aden[:, None]
    return v, a


def control_effort(s: Spline) -> float:
    """Sum over intervals of ||Q_j A_j [6,0,0,0]^T||^2.

    Proportional to the integral of the squared jerk (the constant
    1/dt^5 factor is dropped; it is fixed once the time frame is)."""
    total = 0.0
    e = np.array([6.0, 0.0, 0.0, 0.0])
    for j in range(s.num_intervals):
        w = position_segment_matrix(j, s.num_intervals) @ e
        jerk = s.interval_points(j).T @ w
        total += float(jerk @ jerk)
    return total


# ---------------------------------------------------------------------------
# Serialization (used by the simulator log and the CLI)
# ---------------------------------------------------------------------------


def spline_to_dict(s: Spline) -> dict:
    return {
        "n": s.n,
        "t_in": s.t_in,
        "t_f": s.t_f,
        "control_points": s.control_points.tolist(),
    }


def spline_from_dict(d: dict) -> Spline:
    return make_clamped_spline(
        int(d["n"]), float(d["t_in"]), float(d["t_f"]), d["control_points"]
    )
