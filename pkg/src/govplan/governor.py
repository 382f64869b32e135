"""Safety assessment and reference-governor dynamics."""
from __future__ import annotations

import math

import numpy as np

from .environment import FreeSpace, contains, point_boundary_distance, set_boundary_distance
from .geometry import Ball, ConvexSet, project_to_ball


def safety_level(fs: FreeSpace, rng: ConvexSet, robot_pos) -> float:
    """Distance from the predicted motion range to the free-space boundary.

    Zero when the robot itself is outside the free space or exactly on its
    boundary.
    """
    if not contains(fs, robot_pos):
        return 0.0
    if point_boundary_distance(fs, robot_pos) == 0.0:
        return 0.0
    return set_boundary_distance(fs, rng)


def governor_velocity(delta, ref_vel, k_g) -> np.ndarray:
    """k_g * min(delta, |r|) * r / |r|, with zero output at r = 0 or delta = 0."""
    r = np.asarray(ref_vel, dtype=float)
    nr = math.hypot(r[0], r[1])
    if delta <= 0.0 or nr == 0.0:
        return np.zeros(2)
    return k_g * (min(delta, nr) / nr) * r


def governor_velocity_projection(delta, ref_vel, k_g) -> np.ndarray:
    """k_g * proj_{B(0, delta)}(r)."""
    return k_g * project_to_ball(ref_vel, Ball(np.zeros(2), max(delta, 0.0)))


def governor_velocity_shifted(g, delta, ref_vel, k_g) -> np.ndarray:
    """-k_g * (g - proj_{B(g, delta)}(g + r))."""
    g = np.asarray(g, dtype=float)
    return -k_g * (g - project_to_ball(g + np.asarray(ref_vel, float), Ball(g, max(delta, 0.0))))
