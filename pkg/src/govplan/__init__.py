"""Reference-governor feedback motion planning for high-order robots.

A first-order path-pursuit planner is extended to n-th order dynamics
under PhD control: a governor follows the planner, throttled by the
distance between the robot's predicted motion range and the free-space
boundary.
"""
from .control import PhdController, RobotState, companion_matrix, gains_from_roots, uniform_roots
from .environment import (
    DiskRegion,
    Environment,
    FreeSpace,
    PolygonRegion,
    build_free_space,
    contains,
    point_boundary_distance,
    set_boundary_distance,
)
from .geometry import (
    Ball,
    Disk,
    Ellipse,
    Point,
    Polytope,
    Segment,
    brute_force_distance,
    convex_distance,
    matrix_sqrt_psd,
    project_to_ball,
    support_point,
)
from .governor import governor_velocity, safety_level
from .planner import ReferencePath, projected_path_goal, reference_field
from .prediction import (
    lyapunov_beta,
    lyapunov_range,
    make_predictor,
    range_bounding_ball,
    solve_lyapunov,
    vandermonde_coefficients,
    vandermonde_range,
)
from .scenario import load_scenario, load_shipped, parse_scenario, serialize_scenario
from .simulator import Scenario, Trace, run, system_derivative

__version__ = "0.1.0"
