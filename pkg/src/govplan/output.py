"""Trace artifacts: CSV samples, JSON summary and an SVG figure.

SVG colors: workspace and obstacles black, configuration-space inflation
gray, reference path red, robot blue, governor green, prediction
snapshots orange.
"""
from __future__ import annotations

import csv
import io
import json
import xml.etree.ElementTree as ET
from pathlib import Path

import numpy as np

from .control import RobotState
from .environment import DiskRegion
from .geometry import Ellipse, Polytope
from .simulator import Trace

FORMATS = ("csv", "json", "svg")


def _g(x):
    return f"{x:.6g}"


def trace_csv(trace: Trace) -> str:
    n = trace.x.shape[1]
    header = ["t"]
    for i in range(n):
        header += [f"p{i}x", f"p{i}y"]
    header += ["gx", "gy", "delta", "ref_speed"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for k in range(len(trace.t)):
        row = [trace.t[k], *trace.x[k].reshape(-1), *trace.g[k], trace.delta[k], trace.ref_speed[k]]
        w.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def trace_summary_json(trace: Trace) -> str:
    return json.dumps(trace.summary(), indent=2, sort_keys=True) + "\n"


def _polyline(parent, pts, flip, **attrs):
    s = " ".join(f"{_g(x)},{_g(flip(y))}" for x, y in pts)
    return ET.SubElement(parent, "polyline", points=s, fill="none", **attrs)


def _region(parent, region, flip, **attrs):
    if isinstance(region, DiskRegion):
        c = region.center
        return ET.SubElement(
            parent, "circle", cx=_g(c[0]), cy=_g(flip(c[1])), r=_g(region.radius), **attrs
        )
    s = " ".join(f"{_g(x)},{_g(flip(y))}" for x, y in region.vertices)
    return ET.SubElement(parent, "polygon", points=s, **attrs)


def trace_svg(trace: Trace, snapshot_interval=None, pixels=600) -> str:
    """Render the run: environment, path, robot and governor trajectories.

    ``snapshot_interval`` (seconds) adds prediction-set outlines along the run.
    """
    sc = trace.scenario
    fs = sc.free_space
    env = sc.environment
    lo, hi = fs.bounds
    pad = 0.05 * float(np.max(hi - lo))
    lo, hi = lo - pad, hi + pad
    w, h = hi - lo
    sw = _g(0.004 * max(w, h))

    def flip(y):
        return lo[1] + hi[1] - y

    root = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=str(pixels),
        height=str(int(round(pixels * h / w))),
        viewBox=f"{_g(lo[0])} {_g(lo[1])} {_g(w)} {_g(h)}",
    )
    ws = ET.SubElement(root, "g", id="workspace")
    if isinstance(env.workspace, DiskRegion):
        # black ring outside the workspace disk
        _region(ws, DiskRegion(env.workspace.center, env.workspace.radius + pad), flip, fill="black")
        _region(ws, env.workspace, flip, fill="lightgray")
    else:
        ET.SubElement(ws, "rect", x=_g(lo[0]), y=_g(lo[1]), width=_g(w), height=_g(h), fill="black")
        _region(ws, env.workspace, flip, fill="lightgray")
    _region(ws, fs.eroded_workspace, flip, fill="white")
    cs = ET.SubElement(root, "g", id="inflation")
    for obs in env.obstacles:
        c = obs.center if isinstance(obs, DiskRegion) else None
        if c is not None:
            _region(cs, DiskRegion(c, obs.radius + env.robot_radius), flip, fill="gray")
        else:
            _region(cs, obs, flip, fill="gray", stroke="gray",
                    **{"stroke-width": _g(2 * env.robot_radius), "stroke-linejoin": "round"})
    ob = ET.SubElement(root, "g", id="obstacles")
    for obs in env.obstacles:
        _region(ob, obs, flip, fill="black")

    _polyline(root, sc.path.waypoints, flip, id="reference-path", stroke="red", **{"stroke-width": sw})
    ET.SubElement(root, "circle", cx=_g(sc.path.start[0]), cy=_g(flip(sc.path.start[1])),
                  r=_g(3 * float(sw)), fill="blue")
    ET.SubElement(root, "circle", cx=_g(sc.goal[0]), cy=_g(flip(sc.goal[1])),
                  r=_g(3 * float(sw)), fill="red")

    if snapshot_interval:
        snaps = ET.SubElement(root, "g", id="predictions")
        t_next = 0.0
        for k, t in enumerate(trace.t):
            if t + 1e-12 < t_next:
                continue
            t_next += snapshot_interval
            rng = sc.predictor.range(RobotState(trace.x[k]), trace.g[k])
            style = {"fill": "orange", "fill-opacity": "0.25", "stroke": "orange",
                     "stroke-width": sw}
            if isinstance(rng, Polytope):
                pts = rng.hull
            elif isinstance(rng, Ellipse):
                pts = rng.boundary_samples(64)
            else:
                continue
            if len(pts) >= 3:
                s = " ".join(f"{_g(x)},{_g(flip(y))}" for x, y in pts)
                ET.SubElement(snaps, "polygon", points=s, **style)
            else:
                _polyline(snaps, pts, flip, stroke="orange", **{"stroke-width": sw})

    _polyline(root, trace.x[:, 0, :], flip, id="robot", stroke="blue", **{"stroke-width": sw})
    _polyline(root, trace.g, flip, id="governor", stroke="green", **{"stroke-width": sw})
    ET.indent(root)
    return ET.tostring(root, encoding="unicode") + "\n"


def emit_outputs(trace: Trace, formats=FORMATS, out_dir=".", stem=None, snapshot_interval=None):
    """Write the requested artifacts; returns {format: path}."""
    formats = set(formats)
    unknown = formats - set(FORMATS)
    if unknown:
        raise ValueError(f"unknown output formats {sorted(unknown)}; choose from {FORMATS}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    stem = stem or (trace.scenario.name if trace.scenario is not None else "trace")
    written = {}
    if "csv" in formats:
        p = out / f"{stem}.csv"
        p.write_text(trace_csv(trace))
        written["csv"] = p
    if "json" in formats:
        p = out / f"{stem}.json"
        p.write_text(trace_summary_json(trace))
        written["json"] = p
    if "svg" in formats:
        p = out / f"{stem}.svg"
        p.write_text(trace_svg(trace, snapshot_interval=snapshot_interval))
        written["svg"] = p
    return written
