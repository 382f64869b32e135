"""Command line entry point: run, batch, validate and sweep scenario files.

Exit codes: 0 converged (or valid), 2 horizon reached, 1 error.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import output
from .scenario import load_scenario, scenario_from_dict, scenario_to_dict
from .simulator import ScenarioError, SimulationError, run

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_HORIZON = 2



def _formats(text):
    fmts = [f.strip() for f in text.split(",") if f.strip()]
    bad = [f for f in fmts if f not in output.FORMATS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown format(s) {bad}; choose from {output.FORMATS}")
    return fmts


def _add_common(p):
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--format", type=_formats, default=list(output.FORMATS),
                   help="comma-separated subset of csv,json,svg")
    p.add_argument("--tol-rel", type=float, help="override integrator relative tolerance")
    p.add_argument("--tol-abs", type=float, help="override integrator absolute tolerance")
    p.add_argument("--horizon", type=float, help="override simulated time horizon (s)")
    p.add_argument("--seed", type=int, help="seed for scenarios with a random initial state")
    p.add_argument("--snapshots", type=float, default=None,
                   help="draw prediction sets every SNAPSHOTS seconds in the SVG")


def build_parser():
    ap = argparse.ArgumentParser(prog="govplan", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one scenario file")
    p.add_argument("scenario", type=Path)
    _add_common(p)

    p = sub.add_parser("batch", help="simulate every *.json scenario in a directory")
    p.add_argument("directory", type=Path)
    p.add_argument("--parallel", action="store_true", help="run scenarios in worker processes")
    _add_common(p)

    p = sub.add_parser("validate", help="check a scenario file without simulating")
    p.add_argument("scenario", type=Path)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("sweep", help="compare orders and prediction methods on one base scenario")
    p.add_argument("scenario", type=Path)
    p.add_argument("--orders", default="2,3,4", help="comma-separated orders (default 2,3,4)")
    p.add_argument("--methods", default="lyapunov,vandermonde")
    _add_common(p)
    return ap


def _overrides(sc, args):
    ch = {}
    if args.tol_rel is not None:
        ch["rtol"] = args.tol_rel
    if args.tol_abs is not None:
        ch["atol"] = args.tol_abs
    if args.horizon is not None:
        ch["horizon"] = args.horizon
    return sc.with_(**ch) if ch else sc


def _status_code(status):
    return {"converged": EXIT_OK, "horizon": EXIT_HORIZON}.get(status, EXIT_ERROR)


def _run_one(path, args_dict):
    """Simulate one file and write artifacts; returns (name, status, summary or error)."""
    args = argparse.Namespace(**args_dict)
    try:
        sc = _overrides(load_scenario(path, seed=args.seed), args)
        trace = run(sc)
    except (ScenarioError, SimulationError, OSError, ValueError) as exc:
        trace = getattr(exc, "trace", None)
        if trace is not None:
            output.emit_outputs(trace, args.format, args.out, stem=Path(path).stem,
                                snapshot_interval=args.snapshots)
        return Path(path).stem, "error", str(exc)
    output.emit_outputs(trace, args.format, args.out, stem=Path(path).stem,
                        snapshot_interval=args.snapshots)
    return Path(path).stem, trace.status, trace.summary()


def cmd_run(args):
    name, status, info = _run_one(args.scenario, vars(args))
    if status == "error":
        print(f"error: {info}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{name}: {status} travel_time={info['travel_time']:.4f} s "
          f"min_clearance={info['min_clearance']:.4f} m path_length={info['path_length']:.4f} m")
    return _status_code(status)


def cmd_batch(args):
    files = sorted(args.directory.glob("*.json"))
    if not files:
        print(f"error: no *.json scenarios in {args.directory}", file=sys.stderr)
        return EXIT_ERROR
    d = {k: v for k, v in vars(args).items() if k != "directory"}
    if args.parallel:
        with ProcessPoolExecutor() as ex:
            results = list(ex.map(_run_one, files, [d] * len(files)))
    else:
        results = [_run_one(f, d) for f in files]
    worst = EXIT_OK
    for name, status, info in results:
        if status == "error":
            print(f"{name}: error: {info}")
        else:
            print(f"{name}: {status} travel_time={info['travel_time']:.4f}")
        code = _status_code(status)
        if code == EXIT_ERROR or (code == EXIT_HORIZON and worst == EXIT_OK):
            worst = code
    return worst


def cmd_validate(args):
    try:
        sc = load_scenario(args.scenario, seed=args.seed)
    except (ScenarioError, OSError, ValueError) as exc:
        print(f"invalid: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(f"{args.scenario}: valid (order {sc.order}, {sc.prediction}, roots {sc.roots.tolist()})")
    return EXIT_OK


def sweep_table(base, orders, methods, **overrides):
    """Run every (order, method) variant of ``base``; returns a list of row dicts."""
    rows = []
    doc = scenario_to_dict(base)
    for method in methods:
        for n in orders:
            d = dict(doc, order=n, prediction=method)
            d.pop("roots")
            d.pop("initial_state")
            d["root_interval"] = [-2.0, -1.0]
            sc = scenario_from_dict(d)
            if overrides:
                sc = sc.with_(**overrides)
            try:
                tr = run(sc)
                rows.append({"method": method, "order": n, **tr.summary()})
            except (ScenarioError, SimulationError) as exc:
                rows.append({"method": method, "order": n, "status": "error",
                             "travel_time": float("nan"), "min_clearance": float("nan"),
                             "path_length": float("nan"), "error": str(exc)})
    return rows


def cmd_sweep(args):
    try:
        base = _overrides(load_scenario(args.scenario, seed=args.seed), args)
    except (ScenarioError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    orders = [int(s) for s in args.orders.split(",")]
    methods = [s.strip() for s in args.methods.split(",")]
    rows = sweep_table(base, orders, methods, rtol=base.rtol, atol=base.atol, horizon=base.horizon)
    lines = ["method,order,status,travel_time,min_clearance,path_length"]
    for r in rows:
        lines.append(f"{r['method']},{r['order']},{r['status']},{r['travel_time']:.6g},"
                     f"{r['min_clearance']:.6g},{r['path_length']:.6g}")
    table = "\n".join(lines) + "\n"
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{args.scenario.stem}_sweep.csv").write_text(table)
    print(table, end="")
    codes = [_status_code(r["status"]) for r in rows]
    return EXIT_ERROR if EXIT_ERROR in codes else max(codes)


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": cmd_run, "batch": cmd_batch, "validate": cmd_validate, "sweep": cmd_sweep}
    return handler[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
