import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from govplan.control import PhdController, RobotState, uniform_roots
from govplan.environment import contains_many, point_boundary_distance_many
from govplan.geometry import Disk, Point
from govplan.governor import (
    governor_velocity,
    governor_velocity_projection,
    governor_velocity_shifted,
    safety_level,
)
from govplan.prediction import make_predictor
from govplan.scenario import load_shipped

num = st.floats(-50, 50, allow_nan=False)


def test_safety_level_examples(annulus):
    assert safety_level(annulus, Point((0, 0)), (0, 0)) == 0.0
    assert safety_level(annulus, Disk((2, 0), 0.1), (0.5, 0)) == 0.0
    assert safety_level(annulus, Disk((2, 0), 0.1), (3, 0)) == 0.0  # on the boundary
    assert safety_level(annulus, Point((2, 0)), (2, 0)) == pytest.approx(1.0)
    assert safety_level(annulus, Disk((2, 0), 0.5), (2, 0)) == pytest.approx(0.5)


def test_governor_velocity_examples():
    np.testing.assert_array_equal(governor_velocity(0.0, (3, -1), 4), (0, 0))
    np.testing.assert_allclose(governor_velocity(0.5, (1, 0), 4), (2, 0))
    np.testing.assert_allclose(governor_velocity(10, (1, 0), 4), (4, 0))
    np.testing.assert_array_equal(governor_velocity(1.0, (0, 0), 4), (0, 0))


@settings(max_examples=1000, deadline=None)
@given(st.floats(0, 20), num, num, st.floats(0, 10), num, num)
def test_three_forms_agree(delta, rx, ry, k, gx, gy):
    r = np.array([rx, ry])
    a = governor_velocity(delta, r, k)
    b = governor_velocity_projection(delta, r, k)
    c = governor_velocity_shifted((gx, gy), delta, r, k)
    np.testing.assert_allclose(a, b, rtol=0, atol=1e-12)
    # g + r - g loses a few ulps of |g|
    np.testing.assert_allclose(a, c, rtol=0, atol=1e-12 * max(1.0, k * abs(gx) + k * abs(gy)))
    n = math.hypot(*a)
    assert n <= k * delta * (1 + 1e-15) + 1e-300
    assert n <= k * math.hypot(rx, ry) * (1 + 1e-15) + 1e-300
    if delta == 0:
        assert np.all(a == 0) and np.all(b == 0)


def test_positive_safety_means_range_in_interior():
    sc = load_shipped("cluttered")
    fs = sc.free_space
    rng = np.random.default_rng(0)
    ctrl = PhdController.from_roots(uniform_roots(3))
    for method in ("lyapunov", "vandermonde"):
        pred = make_predictor(ctrl, method)
        positive = 0
        for _ in range(400):
            p = rng.uniform((0, 0), (10, 8))
            s = RobotState(np.vstack([p, rng.normal(0, 0.2, (2, 2))]))
            g = p + rng.normal(0, 0.3, 2)
            R = pred.range(s, g)
            delta = safety_level(fs, R, p)
            if delta > 0:
                positive += 1
                B = R.boundary_samples(128)
                assert np.all(contains_many(fs, B))
                assert np.all(point_boundary_distance_many(fs, B) >= delta - fs.eps_arc)
        assert positive > 50
