"""Planar convex sets, metric projection and set distances.

Every set exposes a support mapping, so one GJK loop computes distances
between any pair of them. A sampling-based distance is kept alongside as a
slow but independent cross-check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Union

import numpy as np
from scipy.spatial import cKDTree

DIST_TOL = 1e-9
MAX_ITER = 128


class GeometryError(ValueError):
    pass


class ConvergenceError(RuntimeError):
    """GJK did not reach the requested tolerance.

    ``lower`` and ``upper`` bracket the true distance at the last iterate.
    """

    def __init__(self, msg, lower, upper):
        super().__init__(f"{msg} (distance in [{lower:.3e}, {upper:.3e}])")
        self.lower = lower
        self.upper = upper


def _vec(p):
    v = np.asarray(p, dtype=float).reshape(2)
    return v


def cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def convex_hull(points):
    """Counter-clockwise convex hull (monotone chain) without collinear points.

    Returns an (m, 2) array with m in {1, 2} for degenerate inputs.
    """
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts
    pts = pts[np.lexsort((pts[:, 1], pts[:, 0]))]

    def half(seq):
        out = []
        for p in seq:
            while len(out) >= 2 and cross2(out[-1] - out[-2], p - out[-2]) <= 1e-15:
                out.pop()
            out.append(p)
        return out

    lower = half(pts)
    upper = half(pts[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 2:
        # all points identical up to rounding
        return pts[:1]
    return hull


def matrix_sqrt_psd(S, tol=1e-12):
    """Symmetric PSD square root via eigendecomposition.

    Raises GeometryError for asymmetric or indefinite input.
    """
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.shape[0] != S.shape[1]:
        raise GeometryError(f"square matrix required, got shape {S.shape}")
    scale = max(1.0, float(np.max(np.abs(S))) if S.size else 1.0)
    if np.max(np.abs(S - S.T), initial=0.0) > tol * scale:
        raise GeometryError("matrix is not symmetric")
    w, V = np.linalg.eigh(0.5 * (S + S.T))
    if w.size and w.min() < -1e-10 * scale:
        raise GeometryError(f"matrix is indefinite (min eigenvalue {w.min():.3e})")
    w = np.clip(w, 0.0, None)
    R = (V * np.sqrt(w)) @ V.T
    return 0.5 * (R + R.T)


@dataclass(frozen=True, eq=False)
class Ball:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not self.radius >= 0:
            raise GeometryError(f"ball radius must be >= 0, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))


def project_to_ball(point, ball: Ball) -> np.ndarray:
    """Metric projection of ``point`` onto a closed Euclidean ball."""
    p = _vec(point)
    d = p - ball.center
    n = math.hypot(d[0], d[1])
    if n <= ball.radius:
        return p
    return ball.center + (ball.radius / n) * d


# -- convex sets -------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Point:
    position: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "position", _vec(self.position))

    def support(self, d):
        return self.position

    def boundary_samples(self, k):
        return self.position[None, :]

    def contains(self, x, tol=1e-12):
        return float(np.linalg.norm(_vec(x) - self.position)) <= tol

    @property
    def anchor(self):
        return self.position


@dataclass(frozen=True, eq=False)
class Segment:
    start: np.ndarray
    end: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "start", _vec(self.start))
        object.__setattr__(self, "end", _vec(self.end))

    def support(self, d):
        return self.end if d @ (self.end - self.start) > 0 else self.start

    def boundary_samples(self, k):
        t = np.linspace(0.0, 1.0, max(int(k), 2))[:, None]
        return self.start + t * (self.end - self.start)

    def contains(self, x, tol=1e-12):
        return point_segment_distance(_vec(x), self.start, self.end) <= tol

    @property
    def anchor(self):
        return 0.5 * (self.start + self.end)


@dataclass(frozen=True, eq=False)
class Disk:
    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        if not self.radius >= 0:
            raise GeometryError(f"disk radius must be >= 0, got {self.radius}")
        object.__setattr__(self, "radius", float(self.radius))

    def support(self, d):
        n = math.hypot(d[0], d[1])
        return self.center + (self.radius / n) * d

    def boundary_samples(self, k):
        th = np.linspace(0.0, 2 * np.pi, max(int(k), 2), endpoint=False)
        return self.center + self.radius * np.column_stack([np.cos(th), np.sin(th)])

    def contains(self, x, tol=1e-12):
        return float(np.linalg.norm(_vec(x) - self.center)) <= self.radius + tol

    @property
    def anchor(self):
        return self.center


@dataclass(frozen=True, eq=False)
class Ellipse:
    """E(c, Q, rho) = {c + rho * Q^(1/2) u : |u| <= 1} for symmetric PSD Q."""

    center: np.ndarray
    shape: np.ndarray
    scale: float

    def __post_init__(self):
        object.__setattr__(self, "center", _vec(self.center))
        Q = np.asarray(self.shape, dtype=float).reshape(2, 2)
        if np.max(np.abs(Q - Q.T)) >= 1e-12 * max(1.0, np.max(np.abs(Q))):
            raise GeometryError("ellipse shape matrix must be symmetric")
        object.__setattr__(self, "shape", Q)
        if not self.scale >= 0:
            raise GeometryError(f"ellipse scale must be >= 0, got {self.scale}")
        object.__setattr__(self, "scale", float(self.scale))
        # raises on indefinite Q
        self.sqrt_shape

    @cached_property
    def sqrt_shape(self):
        return matrix_sqrt_psd(self.shape)

    def support(self, d):
        Rd = self.sqrt_shape @ d
        n = math.hypot(Rd[0], Rd[1])
        if n == 0.0 or self.scale == 0.0:
            return self.center
        return self.center + (self.scale / n) * (self.shape @ d)

    def boundary_samples(self, k):
        th = np.linspace(0.0, 2 * np.pi, max(int(k), 2), endpoint=False)
        u = np.column_stack([np.cos(th), np.sin(th)])
        return self.center + self.scale * u @ self.sqrt_shape.T

    def contains(self, x, tol=1e-12):
        e = _vec(x) - self.center
        R = self.sqrt_shape * self.scale
        # least-squares preimage; residual detects points off a degenerate ellipse
        u, *_ = np.linalg.lstsq(R, e, rcond=None)
        if np.linalg.norm(R @ u - e) > tol:
            return False
        return float(np.linalg.norm(u)) <= 1.0 + tol

    @property
    def anchor(self):
        return self.center

    @property
    def is_disk(self):
        Q = self.shape
        s = max(abs(Q[0, 0]), abs(Q[1, 1]), 1e-300)
        return abs(Q[0, 1]) <= 1e-12 * s and abs(Q[0, 0] - Q[1, 1]) <= 1e-12 * s

    def as_disk(self):
        return Disk(self.center, self.scale * math.sqrt(max(self.shape[0, 0], 0.0)))


@dataclass(frozen=True, eq=False)
class Polytope:
    """Convex hull of a finite vertex list (duplicates and collinear points allowed)."""

    vertices: np.ndarray

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float).reshape(-1, 2)
        if len(V) < 1:
            raise GeometryError("polytope needs at least one vertex")
        object.__setattr__(self, "vertices", V)

    def support(self, d):
        return self.vertices[np.argmax(self.vertices @ d)]

    @cached_property
    def hull(self):
        return convex_hull(self.vertices)

    def boundary_samples(self, k):
        H = self.hull
        if len(H) == 1:
            return H.copy()
        if len(H) == 2:
            return Segment(H[0], H[1]).boundary_samples(k)
        E = np.roll(H, -1, axis=0) - H
        lengths = np.hypot(E[:, 0], E[:, 1])
        s = np.linspace(0.0, lengths.sum(), max(int(k), 3), endpoint=False)
        cum = np.concatenate([[0.0], np.cumsum(lengths)])
        idx = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, len(H) - 1)
        t = (s - cum[idx]) / np.where(lengths[idx] > 0, lengths[idx], 1.0)
        return H[idx] + t[:, None] * E[idx]

    def contains(self, x, tol=1e-12):
        x = _vec(x)
        H = self.hull
        if len(H) == 1:
            return float(np.linalg.norm(x - H[0])) <= tol
        if len(H) == 2:
            return point_segment_distance(x, H[0], H[1]) <= tol
        E = np.roll(H, -1, axis=0) - H
        c = cross2(E, x - H) / np.hypot(E[:, 0], E[:, 1])
        return bool(np.all(c >= -tol))

    @property
    def anchor(self):
        return self.vertices.mean(axis=0)


ConvexSet = Union[Point, Segment, Disk, Ellipse, Polytope]


def support_point(s: ConvexSet, direction) -> np.ndarray:
    """Point of ``s`` maximizing the inner product with ``direction``."""
    d = _vec(direction)
    if not np.all(np.isfinite(d)) or (d[0] == 0.0 and d[1] == 0.0):
        raise GeometryError("support direction must be a finite nonzero vector")
    return s.support(d)


# -- point / segment helpers (vectorized) ------------------------------------


def point_segment_distance(p, a, b):
    ab = b - a
    L2 = ab @ ab
    t = 0.0 if L2 == 0.0 else min(1.0, max(0.0, ((p - a) @ ab) / L2))
    q = a + t * ab - p
    return math.hypot(q[0], q[1])


def points_segments_distance(P, A, B):
    """Distances from points P (k, 2) to segments A[j]-B[j]; returns (k, m)."""
    P = np.asarray(P, dtype=float).reshape(-1, 2)
    AB = B - A
    L2 = np.einsum("ij,ij->i", AB, AB)
    L2 = np.where(L2 > 0, L2, 1.0)
    AP = P[:, None, :] - A[None, :, :]
    t = np.clip(np.einsum("kij,ij->ki", AP, AB) / L2, 0.0, 1.0)
    D = AP - t[..., None] * AB[None, :, :]
    return np.hypot(D[..., 0], D[..., 1])


def segments_intersect(P0, P1, Q0, Q1):
    """Closed-segment intersection test, broadcasting over leading axes."""
    d1 = P1 - P0
    d2 = Q1 - Q0
    o1 = cross2(d1, Q0 - P0)
    o2 = cross2(d1, Q1 - P0)
    o3 = cross2(d2, P0 - Q0)
    o4 = cross2(d2, P1 - Q0)
    proper = (o1 * o2 <= 0) & (o3 * o4 <= 0)
    # collinear segments pass the sign test even when disjoint; screen with boxes
    boxes = (
        (np.minimum(P0[..., 0], P1[..., 0]) <= np.maximum(Q0[..., 0], Q1[..., 0]))
        & (np.minimum(Q0[..., 0], Q1[..., 0]) <= np.maximum(P0[..., 0], P1[..., 0]))
        & (np.minimum(P0[..., 1], P1[..., 1]) <= np.maximum(Q0[..., 1], Q1[..., 1]))
        & (np.minimum(Q0[..., 1], Q1[..., 1]) <= np.maximum(P0[..., 1], P1[..., 1]))
    )
    return proper & boxes


# -- GJK -----------------------------------------------------------------------


def _closest_on_simplex(S):
    """Closest point to the origin on conv(S), plus the minimal supporting subset."""
    if len(S) == 1:
        return S[0], S
    if len(S) == 2:
        a, b = S
        ab = b - a
        L2 = ab @ ab
        t = 0.0 if L2 == 0.0 else -(a @ ab) / L2
        if t <= 0.0:
            return a, [a]
        if t >= 1.0:
            return b, [b]
        return a + t * ab, S
    a, b, c = S
    area = cross2(b - a, c - a)
    if area != 0.0:
        l1 = cross2(b, c) / area
        l2 = cross2(c, a) / area
        l3 = cross2(a, b) / area
        if l1 >= 0 and l2 >= 0 and l3 >= 0:
            return np.zeros(2), S
    best = None
    for pair in ((a, b), (b, c), (a, c)):
        v, sub = _closest_on_simplex(list(pair))
        if best is None or v @ v < best[0] @ best[0]:
            best = (v, sub)
    return best


def convex_distance(a: ConvexSet, b: ConvexSet, tol=DIST_TOL, max_iter=MAX_ITER) -> float:
    """Minimum Euclidean distance between two compact convex sets (GJK).

    Returns 0 when the sets overlap. The result is an upper bound on the
    true distance and is within ``tol`` of it.

    Raises
    ------
    ConvergenceError
        If the duality gap is still above ``tol`` after ``max_iter`` steps.
    """
    d0 = a.anchor - b.anchor
    if d0[0] == 0.0 and d0[1] == 0.0:
        d0 = np.array([1.0, 0.0])
    w = a.support(-d0) - b.support(d0)
    simplex = [w]
    v = w
    vv = v @ v
    lower = 0.0
    for _ in range(max_iter):
        vn = math.sqrt(vv)
        if vn <= tol:
            return 0.0
        w = a.support(-v) - b.support(v)
        lower = max(lower, (v @ w) / vn)
        if vn - lower <= tol:
            return vn
        simplex.append(w)
        v_new, simplex = _closest_on_simplex(simplex)
        vv_new = v_new @ v_new
        if vv_new >= vv:
            # no progress in floating point: v is as good as it gets
            return vn
        v, vv = v_new, vv_new
    raise ConvergenceError("GJK did not converge", max(lower, 0.0), math.sqrt(vv))


def brute_force_distance(a: ConvexSet, b: ConvexSet, samples=10_000) -> float:
    """Sampling estimate of the set distance (an upper bound).

    Boundaries of both sets are sampled with ``samples`` points each and the
    closest pair is found with a k-d tree. Overlap is detected by testing the
    samples of one set for membership in the other.
    """
    if samples < 2:
        raise GeometryError("need at least 2 samples")
    A = a.boundary_samples(samples)
    B = b.boundary_samples(samples)
    for pts, other in ((A, b), (B, a)):
        probe = pts if len(pts) <= 64 else pts[:: max(1, len(pts) // 64)]
        if any(other.contains(p, tol=1e-12) for p in probe):
            return 0.0
    if b.contains(a.anchor) or a.contains(b.anchor):
        return 0.0
    dist, _ = cKDTree(B).query(A, k=1)
    return float(np.min(dist))


def transform(s: ConvexSet, A=None, b=None) -> ConvexSet:
    """Image of ``s`` under x -> A x + b (sets are closed under affine maps)."""
    A = np.eye(2) if A is None else np.asarray(A, dtype=float).reshape(2, 2)
    b = np.zeros(2) if b is None else _vec(b)
    if isinstance(s, Point):
        return Point(A @ s.position + b)
    if isinstance(s, Segment):
        return Segment(A @ s.start + b, A @ s.end + b)
    if isinstance(s, Polytope):
        return Polytope(s.vertices @ A.T + b)
    if isinstance(s, Disk):
        return Ellipse(A @ s.center + b, s.radius**2 * (A @ A.T), 1.0)
    if isinstance(s, Ellipse):
        Q = A @ s.shape @ A.T
        return Ellipse(A @ s.center + b, 0.5 * (Q + Q.T), s.scale)
    raise TypeError(f"unsupported set {type(s).__name__}")


def max_norm(s: ConvexSet) -> float:
    """max over x in s of |x|."""
    if isinstance(s, Point):
        return float(np.linalg.norm(s.position))
    if isinstance(s, Segment):
        return float(max(np.linalg.norm(s.start), np.linalg.norm(s.end)))
    if isinstance(s, Polytope):
        return float(np.max(np.linalg.norm(s.vertices, axis=1)))
    if isinstance(s, Disk):
        return float(np.linalg.norm(s.center) + s.radius)
    raise TypeError(f"unsupported set {type(s).__name__}")
