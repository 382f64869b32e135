"""Coupled robot-governor simulation.

The robot runs PhD control toward the governor position g; the governor
follows the path-pursuit field, throttled by the safety level of the
robot's predicted motion range relative to g. The joint system is
integrated with Dormand-Prince RK45 and every accepted step is recorded.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Optional

import numpy as np
from scipy.integrate import RK45
from scipy.optimize import brentq

from .control import PhdController, RobotState
from .environment import (
    EPS_ARC,
    Environment,
    FreeSpace,
    build_free_space,
    contains,
    point_boundary_distance,
)
from .governor import governor_velocity, safety_level
from .planner import ReferencePath, in_domain, projected_path_goal, validate_path
from .prediction import METHODS, Predictor, make_predictor

log = logging.getLogger(__name__)

DEFAULT_K_PATH = 1.0
DEFAULT_K_GOVERNOR = 4.0
DEFAULT_RTOL = 1e-3
DEFAULT_ATOL = 1e-6
DEFAULT_HORIZON = 120.0
EPS_POS = 1e-2
EPS_MOT = 1e-2


class ScenarioError(ValueError):
    pass


class SimulationError(RuntimeError):
    def __init__(self, msg, trace=None):
        super().__init__(msg)
        self.trace = trace


@dataclass(frozen=True, eq=False)
class Scenario:
    environment: Environment
    path: ReferencePath
    order: int
    roots: np.ndarray
    prediction: str = "vandermonde"
    k_path: float = DEFAULT_K_PATH
    k_governor: float = DEFAULT_K_GOVERNOR
    initial_state: Optional[RobotState] = None  # default: zero motion at the path start
    initial_governor: Optional[np.ndarray] = None  # default: path start
    rtol: float = DEFAULT_RTOL
    atol: float = DEFAULT_ATOL
    horizon: float = DEFAULT_HORIZON
    eps_pos: float = EPS_POS
    eps_mot: float = EPS_MOT
    eps_arc: float = EPS_ARC
    name: str = "scenario"

    def __post_init__(self):
        roots = np.atleast_1d(np.asarray(self.roots, dtype=float))
        object.__setattr__(self, "roots", roots)
        if len(roots) != self.order:
            raise ScenarioError(f"order {self.order} but {len(roots)} roots given")
        if self.prediction not in METHODS:
            raise ScenarioError(f"prediction must be one of {METHODS}, got {self.prediction!r}")
        if not self.k_governor >= 0 or not self.k_path > 0:
            raise ScenarioError("gains must satisfy k_path > 0 and k_governor >= 0")
        if not (self.rtol > 0 and self.atol > 0 and self.horizon > 0):
            raise ScenarioError("tolerances and horizon must be positive")

    @cached_property
    def free_space(self) -> FreeSpace:
        return build_free_space(self.environment, eps_arc=self.eps_arc)

    @cached_property
    def controller(self) -> PhdController:
        return PhdController.from_roots(self.roots)

    @cached_property
    def predictor(self) -> Predictor:
        return make_predictor(self.controller, self.prediction)

    @property
    def goal(self):
        return self.path.goal

    def x0(self) -> RobotState:
        if self.initial_state is not None:
            return self.initial_state
        return RobotState.zero_motion(self.path.start, self.order)

    def g0(self) -> np.ndarray:
        if self.initial_governor is not None:
            return np.asarray(self.initial_governor, dtype=float)
        return self.path.start.copy()

    def with_(self, **changes) -> "Scenario":
        """Copy with fields replaced (cached geometry is rebuilt lazily)."""
        return replace(self, **changes)


@dataclass(eq=False)
class Trace:
    t: np.ndarray
    x: np.ndarray  # (N, n, 2) robot derivatives
    g: np.ndarray  # (N, 2)
    delta: np.ndarray
    ref_speed: np.ndarray
    clearance: np.ndarray  # d(p(t), boundary)
    range_radius: np.ndarray  # beta |x - g~|, radius of the range's bounding ball
    status: str = "horizon"  # converged | horizon | error
    message: str = ""
    scenario: Optional[Scenario] = field(default=None, repr=False)

    @property
    def travel_time(self):
        return float(self.t[-1])

    @property
    def min_clearance(self):
        return float(np.min(self.clearance))

    @property
    def path_length(self):
        p = self.x[:, 0, :]
        return float(np.sum(np.hypot(*np.diff(p, axis=0).T))) if len(p) > 1 else 0.0

    def summary(self):
        return {
            "travel_time": self.travel_time,
            "min_clearance": self.min_clearance,
            "path_length": self.path_length,
            "status": self.status,
        }


# -- dynamics -----------------------------------------------------------------


def _split(y, n):
    return y[: 2 * n].reshape(n, 2), y[2 * n :]


def system_terms(scenario: Scenario, state: RobotState, g):
    """Robot derivative, governor velocity, safety level and reference field at (x, g)."""
    ctrl = scenario.controller
    fs = scenario.free_space
    D = state.derivatives
    robot = np.empty_like(D)
    robot[:-1] = D[1:]
    robot[-1] = -ctrl.gains @ D + ctrl.gains[0] * g
    rng = scenario.predictor.range(state, g)
    delta = safety_level(fs, rng, D[0])
    _, target = projected_path_goal(scenario.path, g, fs)
    r = -scenario.k_path * (g - target)
    gv = governor_velocity(delta, r, scenario.k_governor) if scenario.k_governor > 0 else np.zeros(2)
    return robot, gv, delta, r


def system_derivative(scenario: Scenario, state: RobotState, g):
    """Stacked derivative of the joint state (x, g): an (n*2 + 2,) vector."""
    robot, gv, _, _ = system_terms(scenario, state, np.asarray(g, dtype=float))
    return np.concatenate([robot.reshape(-1), gv])


def _motion_error(scenario, y):
    n = scenario.order
    D, g = _split(y, n)
    goal = scenario.goal
    e = np.linalg.norm(D[0] - goal) / scenario.eps_pos
    e = max(e, np.linalg.norm(g - goal) / scenario.eps_pos)
    if n > 1:
        e = max(e, np.max(np.linalg.norm(D[1:], axis=1)) / scenario.eps_mot)
    return e - 1.0


def check_initial_conditions(scenario: Scenario):
    """Raise ScenarioError unless the start is safe: positive safety level, governor in domain."""
    fs = scenario.free_space
    x0, g0 = scenario.x0(), scenario.g0()
    if x0.order != scenario.order:
        raise ScenarioError(f"initial state has order {x0.order}, expected {scenario.order}")
    problems = validate_path(scenario.path, fs)
    if problems:
        raise ScenarioError("; ".join(problems))
    if not in_domain(scenario.path, g0, fs):
        raise ScenarioError(
            f"initial governor {g0.tolist()} is outside the planner domain "
            f"(d(g, path)={scenario.path.distance(g0):.4g} > d(g, boundary)="
            f"{point_boundary_distance(fs, g0):.4g})"
        )
    rng = scenario.predictor.range(x0, g0)
    delta = safety_level(fs, rng, x0.position)
    if not delta > 0:
        raise ScenarioError(f"initial safety level must be positive, got delta={delta:.6g}")
    return delta


class _Recorder:
    def __init__(self, scenario):
        self.sc = scenario
        self.rows = []

    def add(self, t, y):
        sc = self.sc
        n = sc.order
        D, g = _split(y, n)
        state = RobotState(D.copy())
        _, _, delta, r = system_terms(sc, state, g)
        radius = sc.predictor.beta * float(np.linalg.norm(state.error(g)))
        clear = point_boundary_distance(sc.free_space, D[0])
        if not contains(sc.free_space, D[0]):
            clear = -clear
        self.rows.append((t, D.copy(), g.copy(), delta, float(np.hypot(*r)), clear, radius))

    def trace(self, status, message=""):
        cols = list(zip(*self.rows))
        return Trace(
            t=np.array(cols[0]),
            x=np.array(cols[1]),
            g=np.array(cols[2]),
            delta=np.array(cols[3]),
            ref_speed=np.array(cols[4]),
            clearance=np.array(cols[5]),
            range_radius=np.array(cols[6]),
            status=status,
            message=message,
            scenario=self.sc,
        )


def run(scenario: Scenario, rtol=None, atol=None, horizon=None) -> Trace:
    """Integrate the robot-governor system until convergence or the horizon.

    The run stops as soon as |p - goal| < eps_pos, every higher derivative
    has norm < eps_mot and |g - goal| < eps_pos; the crossing time is
    located on the step's dense output.

    Raises
    ------
    ScenarioError
        If the initial safety level is not positive or the initial governor
        is outside the planner domain.
    SimulationError
        If the integrator fails; the partial trace is attached.
    """
    sc = scenario
    rtol = sc.rtol if rtol is None else rtol
    atol = sc.atol if atol is None else atol
    horizon = sc.horizon if horizon is None else horizon
    check_initial_conditions(sc)

    n = sc.order
    y0 = np.concatenate([sc.x0().vector, sc.g0()])
    rec = _Recorder(sc)
    rec.add(0.0, y0)
    if _motion_error(sc, y0) < 0:
        return rec.trace("converged")

    def fun(t, y):
        D, g = _split(y, n)
        robot, gv, _, _ = system_terms(sc, RobotState(D), g)
        return np.concatenate([robot.reshape(-1), gv])

    solver = RK45(fun, 0.0, y0, t_bound=horizon, rtol=rtol, atol=atol)
    while solver.status == "running":
        t_old = solver.t
        msg = solver.step()
        if solver.status == "failed":
            tr = rec.trace("error", str(msg))
            raise SimulationError(f"integrator failed at t={t_old:.6g}: {msg}", tr)
        y = solver.y
        if _motion_error(sc, y) < 0:
            dense = solver.dense_output()
            if _motion_error(sc, dense(t_old)) > 0:
                tc = brentq(lambda s: _motion_error(sc, dense(s)), t_old, solver.t, xtol=1e-10)
                yc = dense(tc)
            else:
                tc, yc = solver.t, y
            rec.add(tc, yc)
            return rec.trace("converged")
        rec.add(solver.t, y.copy())
    log.info("%s: horizon %.3g s reached without convergence", sc.name, horizon)
    return rec.trace("horizon", f"not converged within {horizon} s")
