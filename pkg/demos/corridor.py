#!/usr/bin/env python3
# Annulus corridor: the robot travels three quarters of the way around a
# disk obstacle, with the governor holding it back wherever the predicted
# motion range would touch a wall.
#
# Writes corridor_<method>.svg next to this script.

from pathlib import Path

from govplan.output import emit_outputs
from govplan.scenario import load_shipped
from govplan.simulator import run

here = Path(__file__).parent

for method in ("vandermonde", "lyapunov"):
    sc = load_shipped("corridor", prediction=method)
    trace = run(sc)
    emit_outputs(trace, ["svg"], here, stem=f"corridor_{method}", snapshot_interval=3.0)
    print(f"{method:12s} {trace.status}: travel time {trace.travel_time:6.2f} s, "
          f"min clearance {trace.min_clearance:.3f} m, {len(trace.t)} steps")

# the Lyapunov disk is larger, so the governor must creep along more slowly
