"""Disk-robot free space: workspace eroded by the robot radius minus inflated obstacles.

The free-space boundary is stored as straight segments plus circular arcs.
Point queries use the arcs exactly. Set queries use a polygonized copy of
the boundary whose chords err on the safe side: workspace arcs are replaced
by inscribed chords (which lie inside the free space) and obstacle arcs by
circumscribed tangent polygons (which cover the inflated obstacle), so a
set distance is never overestimated by more than rounding.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .geometry import (
    ConvexSet,
    Disk,
    Ellipse,
    GeometryError,
    Point,
    Polytope,
    Segment,
    convex_distance,
    convex_hull,
    cross2,
    points_segments_distance,
    segments_intersect,
)

EPS_ARC = 1e-3


class FreeSpaceError(GeometryError):
    pass


class EmptyFreeSpaceError(FreeSpaceError):
    pass


@dataclass(frozen=True, eq=False)
class DiskRegion:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", np.asarray(self.center, float).reshape(2))
        if not self.radius > 0:
            raise FreeSpaceError(f"disk radius must be positive, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    def signed_distance(self, P):
        """Signed distance to the region boundary, negative inside. P is (k, 2)."""
        return np.hypot(*(np.atleast_2d(P) - self.center).T) - self.radius

    @property
    def area(self):
        return math.pi * self.radius**2


@dataclass(frozen=True, eq=False)
class PolygonRegion:
    """Convex polygon; vertices are reordered counter-clockwise on construction."""

    vertices: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.vertices, float).reshape(-1, 2)
        if len(V) < 3:
            raise FreeSpaceError("polygon needs at least 3 vertices")
        H = convex_hull(V)
        if len(H) != len(V):
            raise FreeSpaceError(
                "polygon must be strictly convex with distinct vertices "
                f"({len(V)} given, hull has {len(H)})"
            )
        # keep the caller's starting vertex but enforce CCW order
        signed = 0.5 * np.sum(cross2(V, np.roll(V, -1, axis=0)))
        if signed < 0:
            V = V[::-1].copy()
        object.__setattr__(self, "vertices", V)

    @property
    def edges(self):
        return self.vertices, np.roll(self.vertices, -1, axis=0)

    @property
    def area(self):
        V = self.vertices
        return 0.5 * float(np.sum(cross2(V, np.roll(V, -1, axis=0))))

    @property
    def perimeter(self):
        A, B = self.edges
        return float(np.sum(np.hypot(*(B - A).T)))

    def signed_distance(self, P):
        P = np.atleast_2d(np.asarray(P, float))
        A, B = self.edges
        d = points_segments_distance(P, A, B).min(axis=1)
        E = B - A
        side = cross2(E[None, :, :], P[:, None, :] - A[None, :, :])
        inside = np.all(side >= 0, axis=1)
        return np.where(inside, -d, d)


Region = Union[DiskRegion, PolygonRegion]


@dataclass(frozen=True)
class Environment:
    workspace: Region
    obstacles: tuple = ()
    robot_radius: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not self.robot_radius >= 0:
            raise FreeSpaceError(f"robot_radius must be >= 0, got {self.robot_radius}")


@dataclass(frozen=True, eq=False)
class Arc:
    """Circular arc from ``start`` angle sweeping ``sweep`` radians counter-clockwise."""

    center: np.ndarray
    radius: float
    start: float
    sweep: float


@dataclass(frozen=True, eq=False)
class InflatedRegion:
    """Minkowski sum of a convex obstacle with a closed disk of radius ``radius``."""

    base: Region
    radius: float

    def signed_distance(self, P):
        return self.base.signed_distance(P) - self.radius

    @property
    def area(self):
        r = self.radius
        if isinstance(self.base, DiskRegion):
            return math.pi * (self.base.radius + r) ** 2
        return self.base.area + self.base.perimeter * r + math.pi * r * r


@dataclass(frozen=True, eq=False)
class FreeSpace:
    environment: Environment
    eroded_workspace: Region
    inflated_obstacles: tuple
    segments: np.ndarray  # (m, 2, 2) exact straight boundary pieces
    arcs: tuple  # exact circular boundary pieces
    eps_arc: float = EPS_ARC
    chords: np.ndarray = field(default=None)  # (k, 2, 2) segments + polygonized arcs

    @property
    def bounds(self):
        W = self.environment.workspace
        if isinstance(W, DiskRegion):
            return np.array([W.center - W.radius, W.center + W.radius])
        return np.array([W.vertices.min(axis=0), W.vertices.max(axis=0)])

    @property
    def boundary_primitives(self):
        segs = [Segment(a, b) for a, b in self.segments]
        return segs + list(self.arcs)


# -- construction -------------------------------------------------------------


def _offset_polygon(poly: PolygonRegion, delta: float) -> PolygonRegion:
    """Move every edge of a CCW convex polygon outward by ``delta`` (inward if < 0)."""
    A, B = poly.edges
    E = B - A
    L = np.hypot(*E.T)
    N = np.column_stack([E[:, 1], -E[:, 0]]) / L[:, None]  # outward normals
    Ao = A + delta * N
    m = len(A)
    out = []
    for i in range(m):
        # vertex i joins edge i-1 and edge i
        j = (i - 1) % m
        d1, d2 = E[j], E[i]
        den = cross2(d1, d2)
        t = cross2(Ao[i] - Ao[j], d2) / den
        out.append(Ao[j] + t * d1)
    V = np.array(out)
    # an edge flips direction once the offset eats it
    En = np.roll(V, -1, axis=0) - V
    if np.any(np.einsum("ij,ij->i", En, E) <= 0):
        raise EmptyFreeSpaceError(
            f"workspace polygon collapses when eroded by {-delta}; free space would be empty"
        )
    return PolygonRegion(V)


def _arc_points(arc: Arc, eps: float, outside: bool):
    """Polyline approximating ``arc`` within chordal tolerance ``eps``.

    ``outside=True`` returns a circumscribed polyline (tangent to the arc),
    otherwise the inscribed chord polyline.
    """
    r = arc.radius
    if r <= 0:
        return arc.center[None, :]
    half = min(math.acos(max(-1.0, 1.0 - eps / r)), math.pi / 4)
    k = max(1, math.ceil(abs(arc.sweep) / (2 * half)))
    th = arc.start + np.linspace(0.0, arc.sweep, k + 1)
    if not outside:
        return arc.center + r * np.column_stack([np.cos(th), np.sin(th)])
    # walk the tangent lines at th0, the piece midpoints, and th1; consecutive
    # tangents meet at radius r / cos(half-angle between them)
    step = arc.sweep / k
    ang = np.concatenate([[th[0] + step / 4], th[1:-1], [th[-1] - step / 4]])
    rad = np.full(len(ang), r / math.cos(step / 2))
    rad[[0, -1]] = r / math.cos(step / 4)
    corners = arc.center + rad[:, None] * np.column_stack([np.cos(ang), np.sin(ang)])
    ends = arc.center + r * np.column_stack([np.cos(th[[0, -1]]), np.sin(th[[0, -1]])])
    pts = np.vstack([ends[:1], corners, ends[1:]])
    return pts


def build_free_space(env: Environment, eps_arc: float = EPS_ARC, check_connected=True) -> FreeSpace:
    """Free space of a disk robot: eroded workspace minus rho-inflated obstacles.

    Polygon obstacles are inflated exactly (offset edges joined by corner
    arcs). Raises EmptyFreeSpaceError if nothing of the workspace remains.
    """
    rho = env.robot_radius
    W = env.workspace
    segments = []
    arcs = []
    chord_polys = []

    if isinstance(W, DiskRegion):
        if W.radius <= rho:
            raise EmptyFreeSpaceError(
                f"workspace radius {W.radius} does not exceed robot radius {rho}"
            )
        eroded = DiskRegion(W.center, W.radius - rho)
        arc = Arc(eroded.center, eroded.radius, 0.0, 2 * math.pi)
        arcs.append(arc)
        chord_polys.append(_arc_points(arc, eps_arc, outside=False))
    else:
        eroded = W if rho == 0 else _offset_polygon(W, -rho)
        A, B = eroded.edges
        segments.extend(np.stack([A, B], axis=1))

    inflated = []
    for obs in env.obstacles:
        inflated.append(InflatedRegion(obs, rho))
        if isinstance(obs, DiskRegion):
            arc = Arc(obs.center, obs.radius + rho, 0.0, 2 * math.pi)
            arcs.append(arc)
            chord_polys.append(_arc_points(arc, eps_arc, outside=True))
            continue
        A, B = obs.edges
        E = B - A
        L = np.hypot(*E.T)
        N = np.column_stack([E[:, 1], -E[:, 0]]) / L[:, None]
        segments.extend(np.stack([A + rho * N, B + rho * N], axis=1))
        if rho > 0:
            m = len(A)
            for i in range(m):
                # corner at vertex B[i] between normal i and normal i+1
                n0, n1 = N[i], N[(i + 1) % m]
                a0 = math.atan2(n0[1], n0[0])
                sweep = math.atan2(cross2(n0, n1), n0 @ n1)
                arc = Arc(B[i].copy(), rho, a0, sweep)
                arcs.append(arc)
                chord_polys.append(_arc_points(arc, eps_arc, outside=True))

    segments = np.array(segments).reshape(-1, 2, 2)
    chords = [segments]
    for pts in chord_polys:
        if len(pts) >= 2:
            chords.append(np.stack([pts[:-1], pts[1:]], axis=1))
    fs = FreeSpace(
        environment=env,
        eroded_workspace=eroded,
        inflated_obstacles=tuple(inflated),
        segments=segments,
        arcs=tuple(arcs),
        eps_arc=eps_arc,
        chords=np.concatenate(chords, axis=0),
    )
    mask, _ = _grid_mask(fs, 160)
    if not mask.any():
        raise EmptyFreeSpaceError("free space is empty")
    if check_connected:
        _warn_if_disconnected(fs, mask)
    return fs


def _grid_mask(fs: FreeSpace, res):
    lo, hi = fs.bounds
    xs = np.linspace(lo[0], hi[0], res)
    ys = np.linspace(lo[1], hi[1], res)
    X, Y = np.meshgrid(xs, ys)
    P = np.column_stack([X.ravel(), Y.ravel()])
    return contains_many(fs, P).reshape(res, res), (xs, ys)


def _warn_if_disconnected(fs, mask):
    from scipy import ndimage

    _, count = ndimage.label(mask)
    if count > 1:
        warnings.warn(
            f"free space looks disconnected on a {mask.shape[0]}x{mask.shape[1]} grid "
            f"({count} components)",
            RuntimeWarning,
            stacklevel=3,
        )


# -- queries ------------------------------------------------------------------


def _points_arcs_distance(P, arcs):
    if not arcs:
        return np.full((len(P), 0), np.inf)
    out = np.empty((len(P), len(arcs)))
    for j, arc in enumerate(arcs):
        d = P - arc.center
        rad = np.hypot(d[:, 0], d[:, 1])
        if arc.sweep >= 2 * math.pi - 1e-15:
            out[:, j] = np.abs(rad - arc.radius)
            continue
        ang = np.mod(np.arctan2(d[:, 1], d[:, 0]) - arc.start, 2 * math.pi)
        on = ang <= arc.sweep
        e0 = arc.center + arc.radius * np.array([math.cos(arc.start), math.sin(arc.start)])
        e1 = arc.center + arc.radius * np.array(
            [math.cos(arc.start + arc.sweep), math.sin(arc.start + arc.sweep)]
        )
        dend = np.minimum(np.hypot(*(P - e0).T), np.hypot(*(P - e1).T))
        out[:, j] = np.where(on, np.abs(rad - arc.radius), dend)
    return out


def point_boundary_distance_many(fs: FreeSpace, P) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, float))
    d = np.full(len(P), np.inf)
    if len(fs.segments):
        d = np.minimum(d, points_segments_distance(P, fs.segments[:, 0], fs.segments[:, 1]).min(axis=1))
    if fs.arcs:
        d = np.minimum(d, _points_arcs_distance(P, fs.arcs).min(axis=1))
    return d


def point_boundary_distance(fs: FreeSpace, p) -> float:
    """Exact distance from ``p`` to the free-space boundary."""
    return float(point_boundary_distance_many(fs, p)[0])


def contains_many(fs: FreeSpace, P) -> np.ndarray:
    P = np.atleast_2d(np.asarray(P, float))
    rho = fs.environment.robot_radius
    tol = 1e-12
    inside = -fs.environment.workspace.signed_distance(P) >= rho - tol
    for obs in fs.inflated_obstacles:
        inside &= obs.base.signed_distance(P) >= rho - tol
    return inside


def contains(fs: FreeSpace, p) -> bool:
    """Closed free-space membership: boundary points count as contained."""
    return bool(contains_many(fs, p)[0])


def _polytope_chords_distance(V, chords):
    """Exact distance between conv(V) and a batch of segments, min over the batch."""
    H = convex_hull(V)
    C0, C1 = chords[:, 0], chords[:, 1]
    if len(H) == 1:
        return points_segments_distance(H, C0, C1).min()
    if len(H) == 2:
        E0, E1 = H[:1], H[1:]
    else:
        E0, E1 = H, np.roll(H, -1, axis=0)
        # a chord endpoint inside the hull means overlap
        side = cross2((E1 - E0)[None, :, :], C0[:, None, :] - E0[None, :, :])
        if np.any(np.all(side >= 0, axis=1)):
            return 0.0
    hit = segments_intersect(E0[:, None, :], E1[:, None, :], C0[None, :, :], C1[None, :, :])
    if hit.any():
        return 0.0
    d1 = points_segments_distance(H, C0, C1).min()
    d2 = points_segments_distance(np.concatenate([C0, C1]), E0, E1).min()
    return float(min(d1, d2))


def set_boundary_distance(fs: FreeSpace, s: ConvexSet) -> float:
    """Minimum distance between a convex set and the free-space boundary.

    Points and disks are measured against the exact arcs; polytopes and
    general ellipses against the polygonized boundary.
    """
    if isinstance(s, Ellipse) and s.is_disk:
        s = s.as_disk()
    if isinstance(s, Point):
        return point_boundary_distance(fs, s.position)
    if isinstance(s, Disk):
        return max(0.0, point_boundary_distance(fs, s.center) - s.radius)
    if isinstance(s, Segment):
        return _polytope_chords_distance(np.stack([s.start, s.end]), fs.chords)
    if isinstance(s, Polytope):
        return _polytope_chords_distance(s.vertices, fs.chords)
    if isinstance(s, Ellipse):
        return _generic_chords_distance(fs, s)
    raise TypeError(f"unsupported set {type(s).__name__}")


def _generic_chords_distance(fs, s):
    # prune with the bounding disk of s before running GJK on each chord
    c = s.center
    R = s.scale * math.sqrt(max(np.linalg.eigvalsh(s.shape).max(), 0.0))
    C0, C1 = fs.chords[:, 0], fs.chords[:, 1]
    dc = points_segments_distance(c, C0, C1)[0]
    order = np.argsort(dc)
    best = math.inf
    for j in order:
        if dc[j] - R >= best:
            break
        best = min(best, convex_distance(s, Segment(C0[j], C1[j])))
        if best == 0.0:
            break
    return best


def path_connected_warning(fs: FreeSpace, res=160):
    """Grid probe for connectivity; emits a RuntimeWarning if components split."""
    mask, _ = _grid_mask(fs, res)
    _warn_if_disconnected(fs, mask)
