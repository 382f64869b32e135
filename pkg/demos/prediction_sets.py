#!/usr/bin/env python3
# Motion-range prediction for a PhD-controlled robot.
#
# Start a third-order robot away from its goal, simulate the closed loop,
# and compare the two predicted motion ranges: the Lyapunov disk and the
# Vandermonde simplex. Both must contain the whole future trajectory;
# the simplex is usually much smaller.

import numpy as np
from scipy.integrate import solve_ivp

from govplan.control import PhdController, RobotState, closed_loop_derivative, uniform_roots
from govplan.prediction import make_predictor

# ---- controller: roots spread over [-2, -1] ----
n = 3
ctrl = PhdController.from_roots(uniform_roots(n))
print("roots", ctrl.roots, "-> gains", ctrl.gains)

lyap = make_predictor(ctrl, "lyapunov")
vand = make_predictor(ctrl, "vandermonde")
print(f"bounding-ball constants: lyapunov {lyap.beta:.4f}, vandermonde {vand.beta:.4f}")

# ---- initial state: position, velocity, acceleration ----
goal = np.zeros(2)
x0 = RobotState([[1.0, 0.5], [0.0, 1.0], [-0.5, 0.0]])

sol = solve_ivp(
    lambda t, y: closed_loop_derivative(ctrl, RobotState.from_vector(y, n), goal).reshape(-1),
    (0.0, 12.0), x0.vector, rtol=1e-9, atol=1e-12, t_eval=np.linspace(0, 12, 600),
)
traj = sol.y[:2].T

# ---- containment check and size comparison ----
disk = lyap.range(x0, goal).as_disk()
simplex = vand.range(x0, goal)
H = simplex.hull
area = 0.5 * abs(np.sum(H[:, 0] * np.roll(H[:, 1], -1) - H[:, 1] * np.roll(H[:, 0], -1)))

print(f"lyapunov disk radius {disk.radius:.3f}, area {np.pi * disk.radius**2:.3f}")
print(f"vandermonde simplex vertices\n{simplex.vertices}\narea {area:.3f}")
print("trajectory inside disk:   ", all(disk.contains(p, tol=1e-9) for p in traj))
print("trajectory inside simplex:", all(simplex.contains(p, tol=1e-9) for p in traj))
