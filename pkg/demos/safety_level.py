#!/usr/bin/env python3
# Safety level along a trace.
#
# Delta(t) is the distance from the predicted motion range to the boundary
# of the free space. The governor moves at most k_g * Delta, so Delta shrinks
# near walls and the governor slows down there.

import numpy as np

from govplan.control import RobotState
from govplan.scenario import load_shipped
from govplan.simulator import run, system_terms

sc = load_shipped("corridor", order=3)
tr = run(sc)

# governor speed from the right-hand side at each recorded sample
gov_speed = np.array([np.linalg.norm(system_terms(sc, RobotState(x), g)[1]) for x, g in zip(tr.x, tr.g)])

print(f"{'t (s)':>7s} {'delta (m)':>10s} {'|r| (m/s)':>10s} {'|g dot| (m/s)':>14s} {'clearance (m)':>14s}")
for k in np.linspace(0, len(tr.t) - 1, 15).astype(int):
    print(f"{tr.t[k]:7.2f} {tr.delta[k]:10.4f} {tr.ref_speed[k]:10.4f} {gov_speed[k]:14.4f} {tr.clearance[k]:14.4f}")

# the governor never outruns its bound
bound = sc.k_governor * np.minimum(tr.delta, tr.ref_speed)
print("|g dot| <= k_g min(delta, |r|) at every sample:", bool(np.all(gov_speed <= bound + 1e-12)))
