import numpy as np
import pytest

from govplan.control import RobotState
from govplan.environment import contains, point_boundary_distance
from govplan.planner import in_domain, projected_path_goal
from govplan.scenario import load_shipped
from govplan.simulator import (
    ScenarioError,
    SimulationError,
    check_initial_conditions,
    run,
    system_derivative,
    system_terms,
)
import govplan.simulator as simulator


@pytest.fixture(scope="module")
def corridor_trace():
    return run(load_shipped("corridor"))


def test_start_at_goal_converges_immediately():
    sc = load_shipped("corridor")
    goal = sc.goal
    sc = sc.with_(initial_state=RobotState.zero_motion(goal, sc.order), initial_governor=goal.copy())
    tr = run(sc)
    assert tr.status == "converged"
    assert tr.travel_time == 0.0 and len(tr.t) == 1


def test_fixed_governor_matches_rk4_oracle():
    sc = load_shipped("corridor", roots=[-1.0, -2.0], gains={"k_path": 1, "k_governor": 0},
                      initial_state={"derivatives": [[0.0, -2.0], [0.3, 0.1]]})
    tr = run(sc, rtol=1e-8, atol=1e-10, horizon=20.0)
    assert tr.status == "horizon"
    assert np.all(tr.g == sc.g0())

    # fixed-step RK4 on x' = (A kron I)(x - g~), h = 1e-4
    A = np.kron(sc.controller.A, np.eye(2))
    gt = np.concatenate([sc.g0(), np.zeros(2)])
    f = lambda x: A @ (x - gt)
    x = sc.x0().vector.copy()
    h = 1e-4
    for _ in range(200_000):
        k1 = f(x)
        k2 = f(x + 0.5 * h * k1)
        k3 = f(x + 0.5 * h * k2)
        k4 = f(x + h * k3)
        x = x + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    assert np.linalg.norm(x - gt) < 1e-3
    assert tr.t[-1] == pytest.approx(20.0)
    np.testing.assert_allclose(tr.x[-1].reshape(-1), x, atol=1e-8)
    assert np.linalg.norm(tr.x[-1].reshape(-1) - gt) < 1e-3


def test_system_derivative_equilibrium_and_freeze():
    sc = load_shipped("corridor")
    goal = sc.goal
    z = RobotState.zero_motion(goal, sc.order)
    np.testing.assert_array_equal(system_derivative(sc, z, goal), 0)
    # robot outside F: safety level 0 freezes the governor only
    s = RobotState([[0.0, 0.0], [0.5, 0.0]])
    robot, gv, delta, _ = system_terms(sc, s, sc.g0())
    assert delta == 0.0 and np.all(gv == 0)
    np.testing.assert_allclose(robot, [[0.5, 0.0], -sc.controller.gains @ s.derivatives + sc.controller.gains[0] * sc.g0()])


def test_system_derivative_matches_components():
    from govplan.control import closed_loop_derivative
    from govplan.governor import governor_velocity, safety_level
    from govplan.planner import reference_field

    sc = load_shipped("cluttered", order=3)
    rng = np.random.default_rng(0)
    for _ in range(50):
        p = sc.path.point(rng.uniform())
        s = RobotState(np.vstack([p + rng.normal(0, 0.05, 2), rng.normal(0, 0.1, (2, 2))]))
        g = p + rng.normal(0, 0.05, 2)
        out = system_derivative(sc, s, g)
        robot = closed_loop_derivative(sc.controller, s, g).reshape(-1)
        d = safety_level(sc.free_space, sc.predictor.range(s, g), s.position)
        gv = governor_velocity(d, reference_field(sc.path, g, sc.free_space, sc.k_path), sc.k_governor)
        assert np.max(np.abs(out - np.concatenate([robot, gv]))) <= 1e-14


def test_corridor_trace_invariants(corridor_trace):
    tr = corridor_trace
    sc = tr.scenario
    fs = sc.free_space
    assert tr.status == "converged"
    assert np.all(np.diff(tr.t) > 0)
    assert tr.travel_time == tr.t[-1]
    assert tr.min_clearance > 0
    assert tr.min_clearance == pytest.approx(min(point_boundary_distance(fs, p) for p in tr.x[:, 0]))
    alphas = []
    for k in range(len(tr.t)):
        p, g = tr.x[k, 0], tr.g[k]
        assert contains(fs, p) and point_boundary_distance(fs, p) > 0
        assert in_domain(sc.path, g, fs, tol=1e-9)
        s = RobotState(tr.x[k])
        assert sc.predictor.range(s, g).contains(p, tol=1e-6)
        alphas.append(projected_path_goal(sc.path, g, fs)[0])
    assert np.all(np.diff(alphas) >= -1e-9)
    end = tr.x[-1]
    assert np.linalg.norm(end[0] - sc.goal) <= 1e-2 + 1e-9
    assert np.all(np.linalg.norm(end[1:], axis=1) <= 1e-2 + 1e-9)


def test_safety_level_continuous_along_trace(corridor_trace):
    tr = corridor_trace
    sc = tr.scenario
    # simplex vertices move by at most beta |dx| (state) or |dg| (goal vertex), and the
    # set-to-boundary distance is 1-Lipschitz in the Hausdorff metric
    dt = np.diff(tr.t)
    dD = np.abs(np.diff(tr.delta))
    dx = np.linalg.norm(np.diff(tr.x.reshape(len(tr.t), -1), axis=0), axis=1)
    dg = np.linalg.norm(np.diff(tr.g, axis=0), axis=1)
    assert np.all(dD <= np.maximum(sc.predictor.beta * dx, dg) + 1e-9)
    assert np.all(dt > 0)


def test_initial_safety_must_be_positive():
    sc = load_shipped("corridor", check=False)
    bad = sc.with_(initial_state=RobotState([[0.0, -1.2], [0.0, 0.0]]))  # inside the obstacle
    with pytest.raises(ScenarioError, match="delta"):
        check_initial_conditions(bad)
    with pytest.raises(ScenarioError):
        run(bad)


def test_governor_outside_domain_rejected():
    sc = load_shipped("corridor", check=False).with_(initial_governor=np.array([2.35, 0.0]))
    with pytest.raises(ScenarioError, match="planner domain"):
        run(sc)


def test_integrator_failure_carries_partial_trace(monkeypatch):
    class Failing(simulator.RK45):
        def step(self):
            if self.t > 0.5:
                self.status = "failed"
                return "step size underflow"
            return super().step()

    monkeypatch.setattr(simulator, "RK45", Failing)
    with pytest.raises(SimulationError) as err:
        run(load_shipped("corridor"))
    tr = err.value.trace
    assert tr.status == "error" and len(tr.t) > 1 and tr.t[-1] > 0.5


def test_horizon_status():
    tr = run(load_shipped("corridor"), horizon=2.0)
    assert tr.status == "horizon" and tr.t[-1] == pytest.approx(2.0)
