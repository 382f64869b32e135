"""Independent membership checks shared by the prediction and acceptance tests."""
import numpy as np

from govplan.geometry import Ellipse, Polytope, convex_hull, points_segments_distance


def distance_outside(rng, P):
    """Euclidean distance from each row of P to the range (0 inside)."""
    P = np.atleast_2d(P)
    if isinstance(rng, Ellipse):
        assert rng.is_disk
        r = rng.scale * np.sqrt(rng.shape[0, 0])
        return np.maximum(np.linalg.norm(P - rng.center, axis=1) - r, 0.0)
    assert isinstance(rng, Polytope)
    H = convex_hull(rng.vertices)
    if len(H) <= 2:
        A, B = H[:1], H[-1:]
        return points_segments_distance(P, A, B).min(axis=1)
    A, B = H, np.roll(H, -1, axis=0)
    E = B - A
    side = E[None, :, 0] * (P[:, None, 1] - A[None, :, 1]) - E[None, :, 1] * (P[:, None, 0] - A[None, :, 0])
    inside = np.all(side >= 0, axis=1)
    d = points_segments_distance(P, A, B).min(axis=1)
    return np.where(inside, 0.0, d)
