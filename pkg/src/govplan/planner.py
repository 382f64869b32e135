"""Path-pursuit reference planner ("move to the projected path goal").

The governor is pulled toward the farthest point along a piecewise-linear
path that still lies inside its clearance ball B(g, d(g, boundary)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import FreeSpace, contains, point_boundary_distance
from .geometry import points_segments_distance


class PathError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ReferencePath:
    waypoints: np.ndarray

    def __post_init__(self):
        W = np.asarray(self.waypoints, dtype=float).reshape(-1, 2)
        if len(W) < 2:
            raise PathError("a reference path needs at least 2 waypoints")
        if not np.all(np.isfinite(W)):
            raise PathError("waypoints must be finite")
        object.__setattr__(self, "waypoints", W)
        seg = np.hypot(*np.diff(W, axis=0).T)
        if seg.sum() == 0.0:
            raise PathError("reference path has zero length")
        object.__setattr__(self, "_lengths", seg)
        object.__setattr__(self, "_cum", np.concatenate([[0.0], np.cumsum(seg)]))

    @property
    def length(self):
        return float(self._cum[-1])

    @property
    def goal(self):
        return self.waypoints[-1]

    @property
    def start(self):
        return self.waypoints[0]

    def point(self, alpha):
        """P(alpha) under normalized arc length."""
        s = float(np.clip(alpha, 0.0, 1.0)) * self.length
        i = int(np.clip(np.searchsorted(self._cum, s, side="right") - 1, 0, len(self._lengths) - 1))
        L = self._lengths[i]
        t = 0.0 if L == 0.0 else (s - self._cum[i]) / L
        W = self.waypoints
        return W[i] + min(t, 1.0) * (W[i + 1] - W[i])

    def distance(self, p):
        W = self.waypoints
        return float(points_segments_distance(p, W[:-1], W[1:]).min())

    def closest_alpha(self, p):
        W = self.waypoints
        A, B = W[:-1], W[1:]
        AB = B - A
        L2 = np.einsum("ij,ij->i", AB, AB)
        t = np.clip(((np.asarray(p, float) - A) * AB).sum(axis=1) / np.where(L2 > 0, L2, 1.0), 0, 1)
        D = np.hypot(*(A + t[:, None] * AB - p).T)
        i = int(np.argmin(D))
        return float((self._cum[i] + t[i] * self._lengths[i]) / self.length)


def projected_path_goal(path: ReferencePath, g, fs: FreeSpace):
    """Largest alpha with |P(alpha) - g| <= d(g, boundary), and P(alpha).

    Segments are scanned from the last one backward; on each the
    segment-circle quadratic is solved in closed form. If no path point is
    inside the clearance ball the closest path point is returned instead.
    """
    g = np.asarray(g, dtype=float)
    R = point_boundary_distance(fs, g)
    W = path.waypoints
    for i in range(len(W) - 2, -1, -1):
        L = path._lengths[i]
        if L == 0.0:
            continue
        a, b = W[i], W[i + 1]
        d = b - a
        f = a - g
        # |f + u d|^2 = R^2  ->  A u^2 + 2 B u + C = 0
        A = d @ d
        B = f @ d
        C = f @ f - R * R
        disc = B * B - A * C
        if disc < 0:
            continue
        sq = math.sqrt(disc)
        u_lo = (-B - sq) / A
        u_hi = (-B + sq) / A
        if u_hi < 0.0 or u_lo > 1.0:
            continue
        u = min(u_hi, 1.0)
        alpha = (path._cum[i] + u * L) / path.length
        return alpha, a + u * d
    alpha = path.closest_alpha(g)
    return alpha, path.point(alpha)


def reference_field(path: ReferencePath, g, fs: FreeSpace, k_path=1.0) -> np.ndarray:
    """-k_path (g - P*(g))."""
    if not k_path > 0:
        raise PathError(f"k_path must be positive, got {k_path}")
    _, target = projected_path_goal(path, g, fs)
    return -k_path * (np.asarray(g, dtype=float) - target)


def in_domain(path: ReferencePath, g, fs: FreeSpace, tol=0.0) -> bool:
    """g in F with d(g, path) <= d(g, boundary)."""
    return contains(fs, g) and path.distance(g) <= point_boundary_distance(fs, g) + tol


def validate_path(path: ReferencePath, fs: FreeSpace):
    """Return a list of problems; empty when every waypoint is strictly inside F."""
    problems = []
    for i, w in enumerate(path.waypoints):
        if not contains(fs, w) or point_boundary_distance(fs, w) <= 0.0:
            problems.append(f"waypoint {i} {w.tolist()} is not in the free-space interior")
    # segments may still graze the boundary between waypoints
    s = np.linspace(0.0, 1.0, 50 * len(path.waypoints))
    for a in s:
        p = path.point(a)
        if not contains(fs, p) or point_boundary_distance(fs, p) <= 0.0:
            problems.append(f"path leaves the free-space interior near alpha={a:.3f}")
            break
    return problems
