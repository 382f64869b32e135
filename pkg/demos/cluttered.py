#!/usr/bin/env python3
# Cluttered room: compare system orders and prediction methods.
#
# Higher-order robots take longer to stop, so their predicted ranges are
# larger and the governor lets them advance more slowly.

from govplan.scenario import load_shipped
from govplan.simulator import run

print(f"{'method':12s} {'n':>2s} {'time (s)':>9s} {'clearance (m)':>14s} {'length (m)':>11s}")
for method in ("vandermonde", "lyapunov"):
    for n in (2, 3, 4):
        tr = run(load_shipped("cluttered", order=n, prediction=method))
        print(f"{method:12s} {n:2d} {tr.travel_time:9.2f} {tr.min_clearance:14.3f} {tr.path_length:11.2f}")
