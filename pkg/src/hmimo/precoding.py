"""Closed-form digital precoder updates under per-RF-chain power caps.

With receive filters and MSE weights held fixed, the surrogate objective is,
as a function of the stacked vector w_tilde of one RF chain (the chain's rows
across every user's precoder in its cell), a quadratic

    mu * ||w_tilde||^2 + 2 Re{d_vec^H w_tilde},   ||w_tilde||^2 <= p_rf,

whose minimizer is w_tilde = -min(1/mu, sqrt(p_rf)/||d_vec||) * d_vec. Chains
are swept Gauss-Seidel style (cells in ascending order, chains in ascending
order within a cell), each update using the latest values of the others.
"""

from __future__ import annotations

from typing import Optional, Tuple

import numpy as np

from .wmmse import BeamformerState


def stacked_rf_vector(W: np.ndarray, i: int, m: int) -> np.ndarray:
    """w_tilde of chain m in cell i: user-major stack of conj precoder rows,
    shape (U*d,)."""
    U = W.shape[1]
    return np.concatenate([np.conj(W[i, k, m, :]) for k in range(U)])


def write_rf_vector(W: np.ndarray, i: int, m: int,
                    w_tilde: np.ndarray) -> None:
    """Scatter w_tilde back into the per-user precoder rows (in place)."""
    U, d = W.shape[1], W.shape[3]
    for k in range(U):
        W[i, k, m, :] = np.conj(w_tilde[k * d:(k + 1) * d])


def cell_coupling_matrix(state: BeamformerState, H: np.ndarray,
                         weights: np.ndarray, cell: int) -> np.ndarray:
    """K = sum over every user (i,k) of w_ik H_ik,cell^H U V U^H H_ik,cell.

    (M, M) Hermitian PSD; couples cell's transmit side to all receivers.
    """
    L, U = state.W.shape[:2]
    M = H.shape[-1]
    K = np.zeros((M, M), dtype=complex)
    for i in range(L):
        for k in range(U):
            HU = H[i, k, cell].conj().T @ state.U[i, k]  # (M, d)
            K += weights[i, k] * (HU @ state.V[i, k] @ HU.conj().T)
    return 0.5 * (K + K.conj().T)


def rf_subproblem(state: BeamformerState, H: np.ndarray, T: np.ndarray,
                  weights: np.ndarray, cell: int, chain: int,
                  K: Optional[np.ndarray] = None) -> Tuple[float, np.ndarray]:
    """Quadratic coefficients (mu, d_vec) of one chain's subproblem.

    The surrounding chains' current values enter through the cross term; the
    subproblem's constant offset is dropped.
    """
    U_cnt, d = state.W.shape[1], state.W.shape[3]
    if K is None:
        K = cell_coupling_matrix(state, H, weights, cell)
    Tq = state.q[cell][:, None] * T[cell]          # (M, M_y) response-weighted feed
    tq = Tq[:, chain]                              # (M,)
    # cross term from the cell's other chains, latest values
    Wrow = np.concatenate([state.W[cell, k] for k in range(U_cnt)], axis=1)  # (M_y, U*d)
    S = Tq @ Wrow                                  # (M, U*d)
    S_minus = S - np.outer(Tq[:, chain], Wrow[chain])
    left = tq.conj() @ K                           # (M,)
    mu = float(np.real(left @ tq))
    mu = max(mu, 0.0)
    c_row = left @ S_minus                         # (U*d,) row of the cross term
    lin = np.empty(U_cnt * d, dtype=complex)
    for k in range(U_cnt):
        HU = H[cell, k, cell].conj().T @ state.U[cell, k]      # (M, d)
        B_k = weights[cell, k] * (HU @ state.V[cell, k].conj().T)
        lin[k * d:(k + 1) * d] = tq.conj() @ B_k
    d_vec = np.conj(c_row - lin)
    return mu, d_vec


def solve_rf_chain(mu: float, d_vec: np.ndarray, p_rf: float) -> np.ndarray:
    """Minimizer of mu*||w||^2 + 2Re{d^H w} subject to ||w||^2 <= p_rf."""
    if p_rf <= 0:
        raise ValueError("p_rf must be positive")
    norm = float(np.linalg.norm(d_vec))
    if norm == 0.0:
        return np.zeros_like(d_vec)
    cap = np.sqrt(p_rf) / norm
    scale = cap if mu <= 0.0 else min(1.0 / mu, cap)
    return -scale * d_vec


def update_precoders(state: BeamformerState, H: np.ndarray, T: np.ndarray,
                     weights: np.ndarray, p_rf: float) -> BeamformerState:
    """One Gauss-Seidel sweep over every cell's RF chains."""
    L, U_cnt, M_y, d = state.W.shape
    W_new = state.W.copy()
    work = state.replace(W=W_new)
    for cell in range(L):
        K = cell_coupling_matrix(work, H, weights, cell)
        for chain in range(M_y):
            mu, d_vec = rf_subproblem(work, H, T, weights, cell, chain, K=K)
            write_rf_vector(W_new, cell, chain,
                            solve_rf_chain(mu, d_vec, p_rf))
    return state.replace(W=W_new)
