"""Motion-range prediction for PhD control.

Two convex bounds on the whole future position trajectory toward a goal:

* projected Lyapunov ellipsoids, from a quadratic Lyapunov function of the
  closed loop, and
* Vandermonde simplexes, the convex hull of n + 1 points built from the
  state derivatives (non-overshooting controllers only).

Both are bounded by a ball around the goal of radius beta * |x - g~|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .control import ControlError, PhdController, RobotState, _check_order
from .geometry import Ball, Ellipse, Polytope

METHODS = ("lyapunov", "vandermonde")


class PredictionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class LyapunovCertificate:
    """P solving (A kron I)^T P + P (A kron I) + C^T C = 0.

    ``P_order`` is the n x n factor when P = P_order kron I_d (C = I), else None.
    """

    P: np.ndarray
    C: np.ndarray
    beta: float
    order: int
    dim: int
    P_order: Optional[np.ndarray] = None

    @property
    def position_shape(self):
        """I^T P^-1 I: the d x d shape of the projected ellipsoid (per unit scale)."""
        if self.P_order is not None:
            return np.linalg.inv(self.P_order)[0, 0] * np.eye(self.dim)
        S = np.linalg.inv(self.P)[: self.dim, : self.dim]
        return 0.5 * (S + S.T)

    def residual(self, A):
        Ab = np.kron(A, np.eye(self.dim))
        return float(np.linalg.norm(Ab.T @ self.P + self.P @ Ab + self.C.T @ self.C))


def _lyap_vectorized(A, Q):
    """Solve A^T P + P A = -Q by vectorization (column-major vec)."""
    n = A.shape[0]
    I = np.eye(n)
    K = np.kron(I, A.T) + np.kron(A.T, I)
    P = np.linalg.solve(K, -Q.reshape(-1, order="F")).reshape(n, n, order="F")
    return 0.5 * (P + P.T)


def solve_lyapunov(ctrl: PhdController, C=None, dim=2) -> LyapunovCertificate:
    """Lyapunov certificate for the closed loop x' = (A kron I_d)(x - g~).

    With the default C = I the Kronecker structure is used: solve the n x n
    equation A^T P_n + P_n A = -I_n and set P = P_n kron I_d. Any other C
    goes through the dense nd x nd vectorized solve.
    """
    A = ctrl.A
    n = ctrl.order
    if np.any(np.linalg.eigvals(A).real >= 0):
        raise PredictionError("companion matrix is not Hurwitz")
    nd = n * dim
    kron_path = C is None
    if C is None:
        C = np.eye(nd)
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape[1] != nd:
        raise PredictionError(f"C must have {nd} columns, got shape {C.shape}")
    if not kron_path and C.shape == (nd, nd) and np.array_equal(C, np.eye(nd)):
        kron_path = True
    try:
        if kron_path:
            Pn = _lyap_vectorized(A, np.eye(n))
            P = np.kron(Pn, np.eye(dim))
        else:
            Pn = None
            P = _lyap_vectorized(np.kron(A, np.eye(dim)), C.T @ C)
    except np.linalg.LinAlgError as exc:
        raise PredictionError(f"singular Lyapunov system: {exc}") from exc
    evals = np.linalg.eigvalsh(P)
    if evals.min() <= 0:
        raise PredictionError(
            "Lyapunov solution is not positive definite; (A kron I, C) is probably not observable"
        )
    cert = LyapunovCertificate(P=P, C=C, beta=0.0, order=n, dim=dim, P_order=Pn)
    object.__setattr__(cert, "beta", lyapunov_beta(cert))
    return cert


def lyapunov_beta(cert: LyapunovCertificate) -> float:
    """Bounding-ball constant |I^T P^-1 I|^(1/2) |P|^(1/2) (spectral norms)."""
    S = cert.position_shape
    return math.sqrt(np.linalg.norm(S, 2)) * math.sqrt(np.linalg.eigvalsh(cert.P).max())


def lyapunov_range(cert: LyapunovCertificate, state: RobotState, goal) -> Ellipse:
    """Projected Lyapunov ellipsoid E(goal, I^T P^-1 I, |x - g~|_P)."""
    if state.order != cert.order or state.derivatives.shape[1] != cert.dim:
        raise PredictionError(
            f"state shape {state.derivatives.shape} does not match certificate "
            f"({cert.order}, {cert.dim})"
        )
    E = state.error(goal)
    if cert.P_order is not None:
        scale2 = float(np.einsum("ij,ik,jk->", cert.P_order, E, E))
    else:
        e = E.reshape(-1)
        scale2 = float(e @ cert.P @ e)
    return Ellipse(goal, cert.position_shape, math.sqrt(max(scale2, 0.0)))


@dataclass(frozen=True, eq=False)
class VandermondeCoefficients:
    coeffs: np.ndarray  # h_0 .. h_{n-1}
    beta: float

    @property
    def order(self):
        return len(self.coeffs)

    @property
    def ratios(self):
        return self.coeffs / self.coeffs[0]


def vandermonde_coefficients(roots) -> VandermondeCoefficients:
    """Coefficients of prod over the roots except the largest of (lambda - lambda_i).

    With a repeated largest root exactly one instance is dropped.
    """
    r = np.atleast_1d(np.asarray(roots))
    if np.iscomplexobj(r):
        if np.any(r.imag != 0):
            raise PredictionError("Vandermonde prediction requires real roots")
        r = r.real
    r = r.astype(float)
    if r.size < 1:
        raise PredictionError("need at least one root")
    if np.any(r >= 0) or not np.all(np.isfinite(r)):
        raise PredictionError(f"Vandermonde prediction requires real negative roots, got {r}")
    rest = np.delete(r, np.argmax(r))
    h = np.poly(rest)[::-1].astype(float) if rest.size else np.array([1.0])
    if np.any(h <= 0):
        raise PredictionError(f"non-positive Vandermonde coefficient in {h}")
    beta = math.sqrt(r.size) * h.max() / h[0]
    return VandermondeCoefficients(coeffs=h, beta=beta)


def vandermonde_range(coeffs: VandermondeCoefficients, state: RobotState, goal) -> Polytope:
    """Vandermonde simplex conv(goal, p, p + (h_1/h_0) p', ..., sum_i (h_i/h_0) p^(i))."""
    if state.order != coeffs.order:
        raise PredictionError(
            f"state order {state.order} does not match {coeffs.order} coefficients"
        )
    D = state.derivatives
    partial = np.cumsum(coeffs.ratios[:, None] * D, axis=0)
    V = np.vstack([np.asarray(goal, dtype=float)[None, :], partial])
    return Polytope(V)


def vandermonde_matrix(coeffs: VandermondeCoefficients, state: RobotState, goal) -> np.ndarray:
    """X with V = {X s : s in the standard n-simplex}; columns are the vertices."""
    return vandermonde_range(coeffs, state, goal).vertices.T


MotionRange = Union[Ellipse, Polytope]


def range_bounding_ball(rng: MotionRange, beta: float, state: RobotState, goal) -> Ball:
    """Ball(goal, beta |x - g~|), which contains ``rng`` by construction."""
    return Ball(goal, beta * float(np.linalg.norm(state.error(goal))))


@dataclass(frozen=True, eq=False)
class Predictor:
    """A controller paired with one prediction method."""

    controller: PhdController
    method: str
    certificate: Optional[LyapunovCertificate] = None
    coefficients: Optional[VandermondeCoefficients] = None

    @property
    def beta(self):
        if self.method == "lyapunov":
            return self.certificate.beta
        return self.coefficients.beta

    def range(self, state: RobotState, goal) -> MotionRange:
        if self.method == "lyapunov":
            return lyapunov_range(self.certificate, state, goal)
        return vandermonde_range(self.coefficients, state, goal)

    def bounding_ball(self, state, goal):
        return range_bounding_ball(None, self.beta, state, goal)


def make_predictor(ctrl: PhdController, method: str, C=None, dim=2) -> Predictor:
    if method == "lyapunov":
        return Predictor(ctrl, method, certificate=solve_lyapunov(ctrl, C=C, dim=dim))
    if method == "vandermonde":
        if not ctrl.non_overshooting:
            raise PredictionError(
                "Vandermonde prediction requires a non-overshooting controller (real negative roots)"
            )
        return Predictor(ctrl, method, coefficients=vandermonde_coefficients(ctrl.roots))
    raise PredictionError(f"unknown prediction method {method!r}; expected one of {METHODS}")
