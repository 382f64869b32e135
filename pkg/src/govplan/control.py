"""PhD (proportional higher-order derivative) control of an n-th order planar robot.

The closed loop is p^(n) = -sum_i k_i p^(i) + k_0 g, or in state-space form
x' = (A kron I_d)(x - g~) with A the companion matrix of the gains.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_ORDER = 8


class ControlError(ValueError):
    pass


def uniform_roots(order, interval=(-2.0, -1.0)):
    """Characteristic roots uniformly spaced over ``interval``.

    A single root sits at the interval midpoint.
    """
    lo, hi = float(interval[0]), float(interval[1])
    if order == 1:
        return np.array([0.5 * (lo + hi)])
    return np.linspace(lo, hi, order)


def _check_roots(roots):
    r = np.atleast_1d(np.asarray(roots, dtype=complex))
    if r.ndim != 1 or not 1 <= len(r) <= MAX_ORDER:
        raise ControlError(f"need between 1 and {MAX_ORDER} roots, got {r.size}")
    if not np.all(np.isfinite(r)):
        raise ControlError("roots must be finite")
    if np.any(r.real >= 0):
        raise ControlError(f"roots must have negative real parts (Hurwitz), got {r}")
    # complex roots must come in conjugate pairs for real gains
    if not np.allclose(np.sort_complex(r), np.sort_complex(r.conj()), atol=1e-12):
        raise ControlError("complex roots must appear in conjugate pairs")
    return r


def gains_from_roots(roots) -> np.ndarray:
    """Gains k_0..k_{n-1} with lambda^n + sum_i k_i lambda^i = prod_j (lambda - lambda_j)."""
    r = _check_roots(roots)
    coeffs = np.poly(r)  # highest degree first, leading 1
    return np.real(coeffs[1:][::-1]).astype(float)


def companion_matrix(gains) -> np.ndarray:
    """Companion matrix: ones on the superdiagonal, last row -(k_0, ..., k_{n-1})."""
    k = np.atleast_1d(np.asarray(gains, dtype=float))
    n = len(k)
    A = np.zeros((n, n))
    A[np.arange(n - 1), np.arange(1, n)] = 1.0
    A[-1, :] = -k
    return A


@dataclass(frozen=True, eq=False)
class PhdController:
    roots: np.ndarray
    gains: np.ndarray
    A: np.ndarray

    @classmethod
    def from_roots(cls, roots):
        r = _check_roots(roots)
        if np.all(np.abs(r.imag) == 0):
            r = r.real
        k = gains_from_roots(r)
        return cls(roots=r, gains=k, A=companion_matrix(k))

    @classmethod
    def from_gains(cls, gains):
        k = np.atleast_1d(np.asarray(gains, dtype=float))
        A = companion_matrix(k)
        r = np.linalg.eigvals(A)
        if np.any(r.real >= 0):
            raise ControlError(f"gains {k} are not Hurwitz (roots {r})")
        if np.all(np.abs(r.imag) < 1e-12):
            r = np.sort(r.real)
        return cls(roots=r, gains=k, A=A)

    @property
    def order(self):
        return len(self.gains)

    @property
    def non_overshooting(self):
        return bool(np.isrealobj(self.roots) and np.all(self.roots < 0))

    @property
    def slowest_rate(self):
        """|Re| of the root closest to the imaginary axis."""
        return float(np.min(np.abs(np.real(self.roots))))


@dataclass(frozen=True, eq=False)
class RobotState:
    """Position and its first n-1 time derivatives, stacked as an (n, d) array."""

    derivatives: np.ndarray

    def __post_init__(self):
        D = np.array(self.derivatives, dtype=float)
        if D.ndim != 2 or D.shape[0] < 1:
            raise ControlError(f"derivatives must be an (n, d) array, got shape {D.shape}")
        if not np.all(np.isfinite(D)):
            raise ControlError("robot state must be finite")
        object.__setattr__(self, "derivatives", D)

    @classmethod
    def zero_motion(cls, position, order):
        p = np.asarray(position, dtype=float).reshape(-1)
        D = np.zeros((order, p.size))
        D[0] = p
        return cls(D)

    @classmethod
    def from_vector(cls, x, order):
        return cls(np.asarray(x, dtype=float).reshape(order, -1))

    @property
    def order(self):
        return self.derivatives.shape[0]

    @property
    def position(self):
        return self.derivatives[0]

    @property
    def vector(self):
        return self.derivatives.reshape(-1)

    def error(self, goal):
        """x - g~ with g~ = (goal, 0, ..., 0)."""
        E = self.derivatives.copy()
        E[0] -= np.asarray(goal, dtype=float)
        return E

    def is_zero_motion(self, tol=0.0):
        return bool(np.all(np.abs(self.derivatives[1:]) <= tol))


def _check_order(ctrl, state):
    if state.order != ctrl.order:
        raise ControlError(f"state order {state.order} does not match controller order {ctrl.order}")


def closed_loop_derivative(ctrl: PhdController, state: RobotState, goal) -> np.ndarray:
    """Time derivative of the stacked state under PhD control toward ``goal``.

    Returns an (n, d) array (p^(1), ..., p^(n-1), p^(n)).
    """
    _check_order(ctrl, state)
    D = state.derivatives
    goal = np.asarray(goal, dtype=float)
    if goal.shape != D[0].shape:
        raise ControlError(f"goal shape {goal.shape} does not match position shape {D[0].shape}")
    out = np.empty_like(D)
    out[:-1] = D[1:]
    out[-1] = -ctrl.gains @ D + ctrl.gains[0] * goal
    return out


def closed_loop_derivative_ss(ctrl: PhdController, state: RobotState, goal) -> np.ndarray:
    """Same as closed_loop_derivative, via (A kron I_d)(x - g~)."""
    _check_order(ctrl, state)
    d = state.derivatives.shape[1]
    x = state.error(goal).reshape(-1)
    return (np.kron(ctrl.A, np.eye(d)) @ x).reshape(ctrl.order, d)
