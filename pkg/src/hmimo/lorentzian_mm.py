"""Majorize-minimize element tuning for grayscale Lorentzian responses.

A Lorentzian response is q = (j + q_hat)/2 with |q_hat| = 1, so the design
problem becomes unit-modulus optimization of the phase variable q_hat. The
quadratic part is majorized at the current iterate by the usual largest-
eigenvalue surrogate, whose minimizer over the unit-modulus set is a pure
phase alignment; iterating descends monotonically.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np


def lambda_max(A: np.ndarray, tol: float = 1e-8,
               max_iter: int = 5000) -> float:
    """Largest eigenvalue of a Hermitian PSD matrix.

    Exact (eigensolver) up to M = 64; power iteration with relative
    tolerance `tol` beyond that.
    """
    M = A.shape[0]
    if M <= 64:
        return float(np.linalg.eigvalsh(A)[-1])
    v = np.ones(M, dtype=complex) / np.sqrt(M)
    lam = 0.0
    for _ in range(max_iter):
        w = A @ v
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
        lam_new = float(np.real(np.vdot(v, A @ v)))
        if abs(lam_new - lam) <= tol * max(1.0, abs(lam_new)):
            return lam_new
        lam = lam_new
    return lam


def phase_objective(q_hat: np.ndarray, A_o: np.ndarray,
                    b_o: np.ndarray) -> float:
    """Element objective expressed in the phase variable:
    f(q_hat) = (1/4) q_hat^H A_o q_hat - Re{(b_o^T + (j/2) 1^H A_o) q_hat}."""
    lin = b_o + 0.5j * A_o.sum(axis=0)
    return float(0.25 * np.real(np.vdot(q_hat, A_o @ q_hat))
                 - np.real(lin @ q_hat))


def surrogate_objective(q_hat: np.ndarray, q_anchor: np.ndarray,
                        A_o: np.ndarray, b_o: np.ndarray,
                        lam: float) -> float:
    """Majorizer of phase_objective anchored at q_anchor (tight there)."""
    M = A_o.shape[0]
    B = lam * np.eye(M) - A_o
    const = lam * M + float(np.real(np.vdot(q_anchor, B @ q_anchor)))
    lin = b_o + 0.5j * A_o.sum(axis=0)
    cross = float(np.real(np.vdot(q_hat, B @ q_anchor)))
    return 0.25 * (-2.0 * cross + const) - float(np.real(lin @ q_hat))


def mm_step(q_hat: np.ndarray, A_o: np.ndarray, b_o: np.ndarray,
            lam: float) -> np.ndarray:
    """Exact minimizer of the surrogate: align phases with the gradient
    direction. Zero entries keep their previous phase."""
    M = A_o.shape[0]
    B = lam * np.eye(M) - A_o
    z_row = (0.5 * (np.conj(q_hat) @ B.conj().T)
             + b_o + 0.5j * A_o.sum(axis=0))
    z = np.conj(z_row)
    out = np.exp(1j * np.angle(z))
    zero = (z == 0)
    if np.any(zero):
        out = np.where(zero, q_hat, out)
    return out


@dataclass
class MmResult:
    q_hat: np.ndarray             # unit-modulus phase variable
    objective: float              # phase_objective at q_hat
    iterations: int
    converged: bool
    trace: List[float] = field(default_factory=list)

    @property
    def responses(self) -> np.ndarray:
        """Lorentzian element responses (j + q_hat)/2."""
        return (1j + self.q_hat) / 2.0


def mm_solve(A_o: np.ndarray, b_o: np.ndarray,
             q_init: Optional[np.ndarray] = None, tol: float = 1e-6,
             max_iter: int = 500) -> MmResult:
    """Monotone MM descent of the Lorentzian element objective."""
    M = A_o.shape[0]
    if q_init is None:
        q_hat = np.ones(M, dtype=complex)
    else:
        q_hat = np.asarray(q_init, dtype=complex).copy()
        mags = np.abs(q_hat)
        if np.any(np.abs(mags - 1.0) > 1e-6):
            raise ValueError("q_init must be unit-modulus")
        q_hat = q_hat / mags
    lam = lambda_max(A_o)
    f = phase_objective(q_hat, A_o, b_o)
    trace = [f]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        q_hat = mm_step(q_hat, A_o, b_o, lam)
        f_new = phase_objective(q_hat, A_o, b_o)
        trace.append(f_new)
        if abs(f_new - f) <= tol * (1.0 + abs(f_new)):
            f = f_new
            converged = True
            break
        f = f_new
    return MmResult(q_hat=q_hat, objective=f, iterations=it,
                    converged=converged, trace=trace)


def unit_modulus_objective(q: np.ndarray, A_o: np.ndarray,
                           b_o: np.ndarray) -> float:
    """q^H A_o q - 2 Re{b_o^T q}, for constant-modulus phase shifters."""
    return float(np.real(np.vdot(q, A_o @ q)) - 2.0 * np.real(b_o @ q))


def mm_solve_unit_modulus(A_o: np.ndarray, b_o: np.ndarray,
                          q_init: Optional[np.ndarray] = None,
                          tol: float = 1e-6, max_iter: int = 500) -> MmResult:
    """Same MM scheme for direct unit-modulus responses (no Lorentzian
    offset); used by the conventional hybrid-array baseline."""
    M = A_o.shape[0]
    q = np.ones(M, dtype=complex) if q_init is None \
        else np.asarray(q_init, dtype=complex).copy()
    q = q / np.abs(q)
    lam = lambda_max(A_o)
    B = lam * np.eye(M) - A_o
    f = unit_modulus_objective(q, A_o, b_o)
    trace = [f]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        z = np.conj(np.conj(q) @ B + b_o)
        q_new = np.exp(1j * np.angle(z))
        q_new = np.where(z == 0, q, q_new)
        f_new = unit_modulus_objective(q_new, A_o, b_o)
        q = q_new
        trace.append(f_new)
        if abs(f_new - f) <= tol * (1.0 + abs(f_new)):
            f = f_new
            converged = True
            break
        f = f_new
    return MmResult(q_hat=q, objective=f, iterations=it,
                    converged=converged, trace=trace)
