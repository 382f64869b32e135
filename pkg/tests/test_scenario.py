import json

import numpy as np
import pytest

from govplan.scenario import (
    ScenarioFileError,
    load_shipped,
    parse_scenario,
    scenario_to_dict,
    serialize_scenario,
    shipped_scenarios,
)

MINIMAL = {
    "version": 1,
    "environment": {
        "workspace": {"type": "disk", "center": [0, 0], "radius": 3},
        "obstacles": [{"type": "disk", "center": [0, 0], "radius": 1}],
        "robot_radius": 0.1,
    },
    "path": [[0, -2], [2, 0]],
    "order": 2,
    "root_interval": [-2, -1],
}


def test_minimal_document_defaults():
    sc = parse_scenario(json.dumps(MINIMAL))
    assert sc.k_path == 1 and sc.k_governor == 4
    np.testing.assert_allclose(sc.roots, [-2, -1])
    assert sc.prediction == "vandermonde"
    assert sc.rtol == 1e-3 and sc.atol == 1e-6 and sc.horizon == 120


def test_root_interval_expands_uniformly():
    sc = parse_scenario(json.dumps(dict(MINIMAL, order=4)))
    np.testing.assert_allclose(sc.roots, [-2, -5 / 3, -4 / 3, -1])


@pytest.mark.parametrize(
    "mutate,field",
    [
        (lambda d: d.pop("order"), "order"),
        (lambda d: d.pop("root_interval"), "roots"),
        (lambda d: d.update(roots=[-1, -2]), "roots"),
        (lambda d: d.update(order=9), "order"),
        (lambda d: d.update(prediction="tube"), "prediction"),
        (lambda d: d["environment"].update(robot_radius=-1), "environment/robot_radius"),
        (lambda d: d.update(path=[[0, 1]]), "path"),
        (lambda d: d.update(unknown=1), "<document>"),
    ],
)
def test_schema_diagnostics_name_field(mutate, field):
    d = json.loads(json.dumps(MINIMAL))
    mutate(d)
    with pytest.raises(ScenarioFileError) as err:
        parse_scenario(json.dumps(d))
    assert err.value.field == field


def test_physical_violation_reports_delta():
    d = dict(MINIMAL, initial_state={"derivatives": [[0, -1.05], [0, 0]]}, initial_governor=[0, -2])
    with pytest.raises(ScenarioFileError, match="delta"):
        parse_scenario(json.dumps(d))


def test_invalid_json():
    with pytest.raises(ScenarioFileError):
        parse_scenario("{not json")
    with pytest.raises(ScenarioFileError):
        parse_scenario("[1, 2]")


def test_wrong_root_count():
    with pytest.raises(ScenarioFileError) as err:
        parse_scenario(json.dumps({**{k: v for k, v in MINIMAL.items() if k != "root_interval"}, "roots": [-1]}))
    assert err.value.field == "roots"


@pytest.mark.parametrize("name", shipped_scenarios())
def test_shipped_round_trip(name):
    sc = load_shipped(name)
    text = serialize_scenario(sc)
    again = parse_scenario(text)
    assert serialize_scenario(again) == text
    assert scenario_to_dict(again) == json.loads(text)


def test_random_initial_state_is_seeded():
    d = dict(MINIMAL, order=3, initial_state={"random": {"derivative_scale": 0.05}})
    a = parse_scenario(json.dumps(d), seed=3).x0().derivatives
    b = parse_scenario(json.dumps(d), seed=3).x0().derivatives
    c = parse_scenario(json.dumps(d), seed=4).x0().derivatives
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, c)
    np.testing.assert_array_equal(a[0], [0, -2])


def test_shipped_names():
    assert {"corridor", "cluttered"} <= set(shipped_scenarios())
