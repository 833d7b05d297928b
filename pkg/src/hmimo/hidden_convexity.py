"""Sphere-relaxed binary quadratic minimization.

The binary problem min s^T A s - 2 b^T s over {-1,+1}^M relaxes to the sphere
||s||^2 = M, which is solvable globally: in the eigenbasis of A the optimality
system is (lambda_i + mu) x_i = b_i with a scalar dual variable mu located by
bisection on the norm condition sum b_i^2/(lambda_i+mu)^2 = M. Rounding the
relaxed solution by sign and keeping it only when it improves on the previous
iterate, followed by a single-pass 1-opt local search, gives the binary
candidate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .element_problem import QuadraticForm, binary_objective


@dataclass
class SphereSolution:
    """Global minimizer of a diagonal quadratic on a sphere (eigenbasis
    coordinates)."""

    x: np.ndarray
    value: float          # x^T diag(lam) x - 2 c^T x
    multiplier: float
    hard_case: bool
    residual: float       # | ||x||^2 - radius_sq | after the dual solve


def solve_sphere_quadratic(lam: np.ndarray, c: np.ndarray, radius_sq: float,
                           tol: float = 1e-10,
                           max_iter: int = 200) -> SphereSolution:
    """min x^T diag(lam) x - 2 c^T x  s.t.  ||x||^2 = radius_sq.

    lam: real eigenvalues (any sign); c: linear term in the same basis.
    The dual condition phi(mu) = sum c_i^2/(lam_i+mu)^2 - radius_sq is
    monotone decreasing on mu > -min(lam); when even mu -> -min(lam)+ cannot
    reach the required norm ("hard case") the remaining norm goes onto the
    first bottom-eigenvalue coordinate with + sign.
    """
    lam = np.asarray(lam, dtype=float)
    c = np.asarray(c, dtype=float)
    if radius_sq <= 0:
        raise ValueError("radius_sq must be positive")
    lam_min = float(lam.min())
    lam_max = float(lam.max())
    eps = 1e-12 * (1.0 + abs(lam_max))
    lo = -lam_min + eps

    def norm_sq(mu: float) -> float:
        return float(np.sum((c / (lam + mu)) ** 2))

    cond_tol = tol * max(1.0, radius_sq)
    if norm_sq(lo) < radius_sq - cond_tol:
        # hard case: interior coordinates at mu = -lam_min, residual norm on
        # the bottom eigenspace
        bottom = np.isclose(lam, lam_min, rtol=0.0, atol=eps * 4.0)
        x = np.zeros_like(c)
        free = ~bottom
        x[free] = c[free] / (lam[free] - lam_min)
        residual_sq = radius_sq - float(np.sum(x ** 2))
        residual_sq = max(residual_sq, 0.0)
        j = int(np.argmax(bottom))
        sign = np.sign(c[j]) if c[j] != 0 else 1.0
        x[j] = x[j] + sign * np.sqrt(residual_sq)
        value = float(x @ (lam * x) - 2.0 * c @ x)
        return SphereSolution(x=x, value=value, multiplier=-lam_min,
                              hard_case=True,
                              residual=abs(float(np.sum(x ** 2)) - radius_sq))

    # bracket the root: grow the upper end geometrically until phi < 0
    step = max(1.0, abs(lo))
    hi = lo + step
    for _ in range(200):
        if norm_sq(hi) < radius_sq:
            break
        step *= 2.0
        hi = lo + step
    else:
        raise RuntimeError("failed to bracket the dual root")

    mu = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mu = 0.5 * (lo + hi)
        phi = norm_sq(mu) - radius_sq
        if abs(phi) <= cond_tol:
            break
        if phi > 0:
            lo = mu
        else:
            hi = mu
    x = c / (lam + mu)
    value = float(x @ (lam * x) - 2.0 * c @ x)
    return SphereSolution(x=x, value=value, multiplier=float(mu),
                          hard_case=False,
                          residual=abs(float(np.sum(x ** 2)) - radius_sq))


def sign_project(x: np.ndarray) -> np.ndarray:
    """Entrywise sign with sign(0) = +1."""
    return np.where(np.asarray(x) >= 0.0, 1.0, -1.0)


def local_search(qf: QuadraticForm, s: np.ndarray,
                 max_passes: int = 1) -> np.ndarray:
    """1-opt descent: flip coordinates in index order when a flip strictly
    decreases F; one pass by default."""
    s = np.asarray(s, dtype=float).copy()
    As = qf.A @ s
    for _ in range(max_passes):
        improved = False
        for i in range(qf.M):
            # flipping s_i changes F by 4*(A_ii - s_i*(As_i - b_i))
            delta = 4.0 * (qf.A[i, i] - s[i] * (As[i] - qf.b[i]))
            if delta < 0.0:
                As -= 2.0 * s[i] * qf.A[:, i]
                s[i] = -s[i]
                improved = True
        if not improved:
            break
    return s


@dataclass
class HcResult:
    s: np.ndarray             # binary solution in {-1, +1}^M
    objective: float          # F(s)
    relaxed: np.ndarray       # global sphere minimizer (original basis)
    relaxed_value: float      # F at the relaxed minimizer (lower bound)
    multiplier: float
    hard_case: bool
    accepted: bool            # whether the rounded candidate beat s_prev


def hc_solve(qf: QuadraticForm, s_prev: Optional[np.ndarray] = None,
             ls_passes: int = 1) -> HcResult:
    """Sphere relaxation + sign rounding + monotone acceptance + local search.

    s_prev is the incumbent the rounded candidate must beat to be accepted;
    None accepts the candidate unconditionally.
    """
    lam, S = np.linalg.eigh(qf.A)
    b_hat = S.T @ qf.b
    sol = solve_sphere_quadratic(lam, b_hat, float(qf.M))
    relaxed = S @ sol.x
    candidate = sign_project(relaxed)
    accepted = True
    if s_prev is not None:
        s_prev = np.asarray(s_prev, dtype=float)
        if binary_objective(qf, candidate) > binary_objective(qf, s_prev):
            candidate = s_prev.copy()
            accepted = False
    s = local_search(qf, candidate, max_passes=ls_passes)
    return HcResult(s=s, objective=binary_objective(qf, s), relaxed=relaxed,
                    relaxed_value=sol.value, multiplier=sol.multiplier,
                    hard_case=sol.hard_case, accepted=accepted)
