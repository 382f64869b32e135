import numpy as np
import pytest

from govplan.environment import DiskRegion, Environment, PolygonRegion, build_free_space
from govplan.geometry import Disk, Ellipse, Point, Polytope, Segment


@pytest.fixture(scope="session")
def annulus():
    """Disk workspace R=3 with a centered unit-disk obstacle, rho=0."""
    return build_free_space(Environment(DiskRegion((0, 0), 3.0), [DiskRegion((0, 0), 1.0)], 0.0))


@pytest.fixture(scope="session")
def rectangle():
    return build_free_space(Environment(PolygonRegion([(0, 0), (4, 0), (4, 2), (0, 2)]), [], 0.0))


def random_set(rng, kind=None, spread=3.0):
    """A random convex set of one of the five variants."""
    kind = kind or rng.choice(["point", "segment", "disk", "ellipse", "polytope"])
    c = rng.uniform(-spread, spread, 2)
    if kind == "point":
        return Point(c)
    if kind == "segment":
        return Segment(c, c + rng.normal(0, 1, 2))
    if kind == "disk":
        return Disk(c, rng.uniform(0.05, 1.0))
    if kind == "ellipse":
        M = rng.normal(0, 1, (2, 2))
        return Ellipse(c, M @ M.T + 0.05 * np.eye(2), rng.uniform(0.2, 1.0))
    k = rng.integers(3, 8)
    return Polytope(c + rng.normal(0, 0.7, (k, 2)))


# acceptance lines, echoed in the terminal summary
REPORT = []


def pytest_terminal_summary(terminalreporter):
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
