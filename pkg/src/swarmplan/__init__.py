"""Decentralized asynchronous trajectory planning for agent swarms.

Agents plan cubic-spline trajectories among static obstacles, moving
obstacles and other planning agents.  Collision avoidance is enforced
segment-by-segment: every trajectory interval gets a tight outer
polyhedron (minimum-volume enclosing simplex control points), and pairs
of polyhedra are kept apart by separating planes that are decision
variables of the trajectory optimization.  Deconfliction between agents
is asynchronous, via broadcast commitments and a check/recheck step.
"""

from swarmplan.splines import Spline, AgentState, make_clamped_spline
from swarmplan.geometry import Aabb, Plane, IntervalHull

__all__ = [
    "Spline",
    "AgentState",
    "make_clamped_spline",
    "Aabb",
    "Plane",
    "IntervalHull",
]

__version__ = "0.1.0"
