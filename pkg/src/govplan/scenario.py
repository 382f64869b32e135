"""JSON scenario files: schema validation, parsing and serialization.

A scenario document looks like::

    {
      "version": 1,
      "name": "corridor",
      "environment": {
        "workspace": {"type": "disk", "center": [0, 0], "radius": 2.5},
        "obstacles": [{"type": "polygon", "vertices": [[0, 0], [1, 0], [0, 1]]}],
        "robot_radius": 0.1
      },
      "path": [[0, -2], [2, 0]],
      "order": 2,
      "root_interval": [-2, -1],          # or "roots": [-2, -1]
      "prediction": "vandermonde",
      "gains": {"k_path": 1, "k_governor": 4},
      "initial_state": {"derivatives": [[0, -2], [0, 0]]},
      "initial_governor": [0, -2],
      "integrator": {"rtol": 1e-3, "atol": 1e-6},
      "horizon": 120
    }

Only ``version``, ``environment``, ``path``, ``order`` and one of ``roots``
or ``root_interval`` are required.
"""
from __future__ import annotations

import copy
import json
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .control import ControlError, RobotState, uniform_roots
from .environment import DiskRegion, Environment, PolygonRegion
from .geometry import GeometryError
from .planner import PathError, ReferencePath
from .simulator import (
    DEFAULT_ATOL,
    DEFAULT_HORIZON,
    DEFAULT_K_GOVERNOR,
    DEFAULT_K_PATH,
    DEFAULT_RTOL,
    Scenario,
    ScenarioError,
)

SCHEMA_VERSION = 1

_point = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_region = {
    "oneOf": [
        {
            "type": "object",
            "properties": {
                "type": {"const": "disk"},
                "center": _point,
                "radius": {"type": "number", "exclusiveMinimum": 0},
            },
            "required": ["type", "center", "radius"],
            "additionalProperties": False,
        },
        {
            "type": "object",
            "properties": {
                "type": {"const": "polygon"},
                "vertices": {"type": "array", "items": _point, "minItems": 3},
            },
            "required": ["type", "vertices"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "properties": {
        "version": {"const": SCHEMA_VERSION},
        "name": {"type": "string"},
        "environment": {
            "type": "object",
            "properties": {
                "workspace": _region,
                "obstacles": {"type": "array", "items": _region},
                "robot_radius": {"type": "number", "minimum": 0},
            },
            "required": ["workspace"],
            "additionalProperties": False,
        },
        "path": {"type": "array", "items": _point, "minItems": 2},
        "order": {"type": "integer", "minimum": 1, "maximum": 8},
        "roots": {"type": "array", "items": {"type": "number", "exclusiveMaximum": 0}},
        "root_interval": {
            "type": "array",
            "items": {"type": "number", "exclusiveMaximum": 0},
            "minItems": 2,
            "maxItems": 2,
        },
        "prediction": {"enum": ["lyapunov", "vandermonde"]},
        "gains": {
            "type": "object",
            "properties": {
                "k_path": {"type": "number", "exclusiveMinimum": 0},
                "k_governor": {"type": "number", "minimum": 0},
            },
            "additionalProperties": False,
        },
        "initial_state": {
            "type": "object",
            "properties": {
                "derivatives": {"type": "array", "items": _point, "minItems": 1},
                "random": {
                    "type": "object",
                    "properties": {"derivative_scale": {"type": "number", "minimum": 0}},
                    "required": ["derivative_scale"],
                    "additionalProperties": False,
                },
            },
            "oneOf": [{"required": ["derivatives"]}, {"required": ["random"]}],
            "additionalProperties": False,
        },
        "initial_governor": _point,
        "integrator": {
            "type": "object",
            "properties": {
                "rtol": {"type": "number", "exclusiveMinimum": 0},
                "atol": {"type": "number", "exclusiveMinimum": 0},
            },
            "additionalProperties": False,
        },
        "horizon": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["version", "environment", "path", "order"],
    "oneOf": [{"required": ["roots"]}, {"required": ["root_interval"]}],
    "additionalProperties": False,
}


class ScenarioFileError(ScenarioError):
    """Schema or physical violation in a scenario document; ``field`` names the culprit."""

    def __init__(self, field, msg):
        super().__init__(f"{field}: {msg}")
        self.field = field


def _field_name(err: jsonschema.ValidationError):
    path = "/".join(str(p) for p in err.absolute_path)
    if err.validator == "required":
        missing = err.message.split("'")[1] if "'" in err.message else ""
        return f"{path}/{missing}" if path else missing
    if err.validator == "oneOf" and not path:
        return "roots"
    return path or "<document>"


def validate_document(doc: dict):
    """Raise ScenarioFileError naming the first offending field."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), e.message))
    if errors:
        err = errors[0]
        name = _field_name(err)
        if err.validator == "oneOf" and name == "roots":
            msg = "exactly one of 'roots' or 'root_interval' is required"
        else:
            msg = err.message
        raise ScenarioFileError(name, msg)


def _region_from(d):
    if d["type"] == "disk":
        return DiskRegion(d["center"], d["radius"])
    return PolygonRegion(d["vertices"])


def _region_to(r):
    if isinstance(r, DiskRegion):
        return {"type": "disk", "center": r.center.tolist(), "radius": r.radius}
    return {"type": "polygon", "vertices": r.vertices.tolist()}


def scenario_from_dict(doc: dict, seed=None, check=True) -> Scenario:
    """Build a Scenario from a decoded document.

    ``check`` also verifies the physical start condition (positive initial
    safety level, governor in the planner domain).
    """
    validate_document(doc)
    order = doc["order"]
    if "roots" in doc:
        roots = np.asarray(doc["roots"], dtype=float)
        if len(roots) != order:
            raise ScenarioFileError("roots", f"expected {order} roots, got {len(roots)}")
    else:
        lo, hi = sorted(doc["root_interval"])
        roots = uniform_roots(order, (lo, hi))
    try:
        envd = doc["environment"]
        env = Environment(
            _region_from(envd["workspace"]),
            [_region_from(o) for o in envd.get("obstacles", [])],
            envd.get("robot_radius", 0.0),
        )
    except GeometryError as exc:
        raise ScenarioFileError("environment", str(exc)) from exc
    try:
        path = ReferencePath(doc["path"])
    except PathError as exc:
        raise ScenarioFileError("path", str(exc)) from exc

    init = doc.get("initial_state")
    state = None
    if init is not None and "derivatives" in init:
        try:
            state = RobotState(init["derivatives"])
        except ControlError as exc:
            raise ScenarioFileError("initial_state", str(exc)) from exc
        if state.order != order:
            raise ScenarioFileError(
                "initial_state", f"expected {order} derivative vectors, got {state.order}"
            )
    elif init is not None:
        scale = init["random"]["derivative_scale"]
        rng = np.random.default_rng(seed)
        D = np.zeros((order, 2))
        D[0] = path.start
        D[1:] = scale * rng.standard_normal((order - 1, 2))
        state = RobotState(D)

    gains = doc.get("gains", {})
    integ = doc.get("integrator", {})
    try:
        sc = Scenario(
            environment=env,
            path=path,
            order=order,
            roots=roots,
            prediction=doc.get("prediction", "vandermonde"),
            k_path=gains.get("k_path", DEFAULT_K_PATH),
            k_governor=gains.get("k_governor", DEFAULT_K_GOVERNOR),
            initial_state=state,
            initial_governor=None if "initial_governor" not in doc else np.asarray(doc["initial_governor"], float),
            rtol=integ.get("rtol", DEFAULT_RTOL),
            atol=integ.get("atol", DEFAULT_ATOL),
            horizon=doc.get("horizon", DEFAULT_HORIZON),
            name=doc.get("name", "scenario"),
        )
    except (ScenarioError, ControlError) as exc:
        raise ScenarioFileError("order", str(exc)) from exc
    if check:
        from .simulator import check_initial_conditions

        try:
            check_initial_conditions(sc)
        except ScenarioError as exc:
            raise ScenarioFileError("initial_state", str(exc)) from exc
        except GeometryError as exc:
            raise ScenarioFileError("environment", str(exc)) from exc
    return sc


def parse_scenario(text: str, seed=None, check=True) -> Scenario:
    """Parse a JSON scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFileError("<document>", f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioFileError("<document>", "top level must be an object")
    return scenario_from_dict(doc, seed=seed, check=check)


def scenario_to_dict(sc: Scenario) -> dict:
    """Fully explicit document for ``sc`` (roots spelled out, defaults filled in)."""
    env = sc.environment
    return {
        "version": SCHEMA_VERSION,
        "name": sc.name,
        "environment": {
            "workspace": _region_to(env.workspace),
            "obstacles": [_region_to(o) for o in env.obstacles],
            "robot_radius": float(env.robot_radius),
        },
        "path": sc.path.waypoints.tolist(),
        "order": int(sc.order),
        "roots": [float(r) for r in sc.roots],
        "prediction": sc.prediction,
        "gains": {"k_path": float(sc.k_path), "k_governor": float(sc.k_governor)},
        "initial_state": {"derivatives": sc.x0().derivatives.tolist()},
        "initial_governor": sc.g0().tolist(),
        "integrator": {"rtol": float(sc.rtol), "atol": float(sc.atol)},
        "horizon": float(sc.horizon),
    }


def serialize_scenario(sc: Scenario) -> str:
    return json.dumps(scenario_to_dict(sc), indent=2, sort_keys=True) + "\n"


def load_scenario(path, seed=None, check=True) -> Scenario:
    return parse_scenario(Path(path).read_text(), seed=seed, check=check)


def shipped_scenarios():
    """Names of the scenario files bundled with the package."""
    root = resources.files("govplan") / "scenarios"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def load_shipped(name, check=True, **overrides) -> Scenario:
    """Load a bundled scenario by name, optionally overriding document keys."""
    root = resources.files("govplan") / "scenarios"
    doc = json.loads((root / f"{name}.json").read_text())
    doc = copy.deepcopy(doc)
    if "order" in overrides and "roots" in doc and "roots" not in overrides:
        # keep the interval convention when only the order changes
        doc.pop("roots")
        doc.setdefault("root_interval", [-2.0, -1.0])
    doc.update(overrides)
    if "roots" in overrides:
        doc.pop("root_interval", None)
    return scenario_from_dict(doc, check=check)
