"""Weighted-MMSE machinery for the multi-cell downlink.

State per user (i, k): digital precoder W[i,k] (M_y x d), receive filter
U[i,k] (N x d), MSE weight V[i,k] (d x d, Hermitian PSD). Per cell: element
response vector q[i] (M,). The transmit chain of cell i is
x_i = Q_i T_i sum_k W[i,k] s[i,k], so the effective channel from BS j to user
(i, k) is Heff = H[i,k,j] Q_j T_j (N x M_y).

Rates use natural logs internally; bits appear only in reporting helpers.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

LN2 = float(np.log(2.0))


@dataclass
class BeamformerState:
    """All optimization variables of one scenario. Treated as immutable:
    update functions return fresh states."""

    W: np.ndarray  # (L, U, M_y, d) digital precoders
    U: np.ndarray  # (L, U, N, d) receive filters
    V: np.ndarray  # (L, U, d, d) MSE weights
    q: np.ndarray  # (L, M) element responses

    def replace(self, **changes) -> "BeamformerState":
        return dataclasses.replace(self, **changes)

    @property
    def shape(self):
        L, U, M_y, d = self.W.shape
        return L, U, M_y, d


def effective_channels(H: np.ndarray, T: np.ndarray,
                       q: np.ndarray) -> np.ndarray:
    """Heff[i, k, j] = H[i, k, j] diag(q[j]) T[j], shape (L, U, L, N, M_y)."""
    # H: (L,U,L,N,M); q: (L,M); T: (L,M,M_y)
    QT = q[:, :, None] * T  # (L, M, M_y)
    return np.einsum("ikjnm,jms->ikjns", H, QT)


def interference_covariance(Heff: np.ndarray, W: np.ndarray, i: int, k: int,
                            sigma2: float,
                            exclude_self: bool = False) -> np.ndarray:
    """Covariance of everything user (i,k) receives: all streams plus noise.

    With exclude_self the (i,k) term is left out (rate denominator).
    """
    L, U = W.shape[:2]
    N = Heff.shape[3]
    J = sigma2 * np.eye(N, dtype=complex)
    for j in range(L):
        for u in range(U):
            if exclude_self and j == i and u == k:
                continue
            G = Heff[i, k, j] @ W[j, u]  # (N, d)
            J = J + G @ G.conj().T
    return J


def _logdet_hermitian(A: np.ndarray) -> float:
    sign, val = np.linalg.slogdet(A)
    return float(val)


def user_rate_nats(state: BeamformerState, Heff: np.ndarray, i: int, k: int,
                   sigma2: float) -> float:
    """Achievable rate of user (i,k) in nats per channel use."""
    S = Heff[i, k, i] @ state.W[i, k]
    J = interference_covariance(Heff, state.W, i, k, sigma2, exclude_self=True)
    # logdet(I + S S^H J^-1) = logdet(J + S S^H) - logdet(J)
    return _logdet_hermitian(J + S @ S.conj().T) - _logdet_hermitian(J)


def per_user_rates_nats(state: BeamformerState, Heff: np.ndarray,
                        sigma2: float) -> np.ndarray:
    L, U = state.W.shape[:2]
    R = np.empty((L, U))
    for i in range(L):
        for k in range(U):
            R[i, k] = user_rate_nats(state, Heff, i, k, sigma2)
    return R


def weighted_sum_rate_nats(state: BeamformerState, Heff: np.ndarray,
                           sigma2: float, weights: np.ndarray) -> float:
    return float(np.sum(weights * per_user_rates_nats(state, Heff, sigma2)))


def mse_matrix(state: BeamformerState, Heff: np.ndarray, i: int, k: int,
               sigma2: float) -> np.ndarray:
    """Error covariance of user (i,k)'s stream estimate, shape (d, d)."""
    d = state.W.shape[3]
    Uik = state.U[i, k]
    G = Heff[i, k, i] @ state.W[i, k]        # (N, d)
    cross = Uik.conj().T @ G                 # (d, d)
    J = interference_covariance(Heff, state.W, i, k, sigma2)
    E = (np.eye(d, dtype=complex) - cross - cross.conj().T
         + Uik.conj().T @ J @ Uik)
    return E


def update_decoders(state: BeamformerState, Heff: np.ndarray,
                    sigma2: float) -> BeamformerState:
    """MMSE receive filters: U = (sum of all stream covariances + noise)^-1
    times the desired effective channel."""
    L, U_cnt = state.W.shape[:2]
    U_new = np.empty_like(state.U)
    for i in range(L):
        for k in range(U_cnt):
            J = interference_covariance(Heff, state.W, i, k, sigma2)
            G = Heff[i, k, i] @ state.W[i, k]
            U_new[i, k] = np.linalg.solve(J, G)
    return state.replace(U=U_new)


def _invert_mse(E: np.ndarray, eps_scale: float = 1e-12):
    """Inverse of a Hermitian PSD MSE matrix; ridge-regularized when nearly
    singular. Returns (inverse, regularized_flag)."""
    E = 0.5 * (E + E.conj().T)
    eigvals = np.linalg.eigvalsh(E)
    floor = eps_scale * max(1.0, float(np.trace(E).real))
    if eigvals[0] < floor:
        E = E + floor * np.eye(E.shape[0])
        return np.linalg.inv(E), True
    return np.linalg.inv(E), False


def update_weights(state: BeamformerState, Heff: np.ndarray,
                   sigma2: float) -> BeamformerState:
    """MSE weights V = E^-1 at the current filters and precoders."""
    L, U_cnt = state.W.shape[:2]
    V_new = np.empty_like(state.V)
    for i in range(L):
        for k in range(U_cnt):
            E = mse_matrix(state, Heff, i, k, sigma2)
            V_new[i, k], _ = _invert_mse(E)
    return state.replace(V=V_new)


def wmmse_objective(state: BeamformerState, Heff: np.ndarray, sigma2: float,
                    weights: np.ndarray) -> float:
    """sum_ik w_ik * (Tr{V E} - logdet V), the surrogate being minimized."""
    L, U_cnt = state.W.shape[:2]
    total = 0.0
    for i in range(L):
        for k in range(U_cnt):
            E = mse_matrix(state, Heff, i, k, sigma2)
            V = state.V[i, k]
            total += weights[i, k] * (float(np.trace(V @ E).real)
                                      - _logdet_hermitian(V))
    return total


@dataclass
class RateReport:
    """Rates of one state, reported in bits per channel use."""

    per_user_bits: np.ndarray      # (L, U)
    weighted_sum_bits: float
    sum_bits: float

    @classmethod
    def from_state(cls, state: BeamformerState, Heff: np.ndarray,
                   sigma2: float, weights: np.ndarray) -> "RateReport":
        R = per_user_rates_nats(state, Heff, sigma2) / LN2
        return cls(per_user_bits=R,
                   weighted_sum_bits=float(np.sum(weights * R)),
                   sum_bits=float(np.sum(R)))


def per_rf_chain_power(W_cell: np.ndarray) -> np.ndarray:
    """Power loading per RF chain of one cell: sum_k diag(W W^H), shape (M_y,).

    Equals ||w_tilde_m||^2 where w_tilde_m stacks the m-th rows of every
    user's precoder.
    """
    # W_cell: (U, M_y, d)
    return np.sum(np.abs(W_cell) ** 2, axis=(0, 2))


def power_feasible(state: BeamformerState, p_rf: float,
                   rel_tol: float = 1e-9) -> bool:
    L = state.W.shape[0]
    for i in range(L):
        if np.any(per_rf_chain_power(state.W[i]) > p_rf * (1.0 + rel_tol)):
            return False
    return True


def init_state(cfg, rng: np.random.Generator, constraint,
               M_y: Optional[int] = None) -> BeamformerState:
    """Random starting point: per-RF powers at their caps, elements all-on
    (binary) or at random Lorentzian phases."""
    from .constraints import BinaryConstraint, LorentzianConstraint

    L, U, N, d = cfg.L, cfg.U_per_cell, cfg.N, cfg.d
    M_y = cfg.M_y if M_y is None else M_y
    W = (rng.standard_normal((L, U, M_y, d))
         + 1j * rng.standard_normal((L, U, M_y, d)))
    for i in range(L):
        load = per_rf_chain_power(W[i])  # (M_y,)
        W[i] *= np.sqrt(cfg.p_rf / load)[None, :, None]
    if isinstance(constraint, BinaryConstraint):
        q = np.full((L, cfg.M), constraint.varpi, dtype=complex)
    elif isinstance(constraint, LorentzianConstraint):
        phases = rng.uniform(0.0, 2.0 * np.pi, size=(L, cfg.M))
        q = (np.exp(1j * phases) + 1j) / 2.0
    elif constraint is None:  # baseline array modes: unit responses
        q = np.ones((L, cfg.M), dtype=complex)
    else:
        raise TypeError(f"unknown constraint {constraint!r}")
    U_arr = np.zeros((L, U, N, d), dtype=complex)
    V_arr = np.tile(np.eye(d, dtype=complex), (L, U, 1, 1))
    return BeamformerState(W=W, U=U_arr, V=V_arr, q=q)
