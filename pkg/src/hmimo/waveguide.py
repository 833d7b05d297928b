"""Microstrip reference-wave propagation and array steering vectors.

Each microstrip guides a reference wave from its feed past M_x radiating
elements. The wave seen by element m_x is exp(-rho * (alpha + 1j*beta)) where
rho is the guided distance from the feed: m_x * delta for an edge feed,
|m_x - (M_x+1)/2| * delta for a center feed. A base station stacks M_y
microstrips into the block-diagonal propagation matrix T (M x M_y): column m_y
holds that strip's coefficients, zeros elsewhere.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig


def feed_distances(M_x: int, delta: float, feeding: str = "edge",
                   index_from_zero: bool = False) -> np.ndarray:
    """Guided distance from the feed to each element along one microstrip.

    index_from_zero shifts the edge-feed convention so the first element sits
    on the feed (rho = (m_x - 1) * delta); used by the single-microstrip
    analysis. Meaningless for center feeding.
    """
    m = np.arange(1, M_x + 1, dtype=float)
    if feeding == "edge":
        if index_from_zero:
            m = m - 1.0
        return m * delta
    if feeding == "center":
        return np.abs(m - (M_x + 1) / 2.0) * delta
    raise ValueError(f"unknown feeding {feeding!r}")


def microstrip_coefficients(M_x: int, delta: float, alpha: float, beta: float,
                            feeding: str = "edge",
                            index_from_zero: bool = False) -> np.ndarray:
    """Complex reference-wave coefficients of one microstrip, shape (M_x,)."""
    rho = feed_distances(M_x, delta, feeding, index_from_zero)
    return np.exp(-rho * (alpha + 1j * beta))


@dataclass(frozen=True)
class WaveguideModel:
    """Reference-wave description of one base station's feed network."""

    coeffs: np.ndarray  # (M_y, M_x) per-microstrip coefficients
    matrix: np.ndarray  # (M, M_y) block-diagonal propagation matrix

    @property
    def M(self) -> int:
        return self.matrix.shape[0]

    @property
    def M_y(self) -> int:
        return self.matrix.shape[1]


def propagation_matrix(coeffs: np.ndarray) -> np.ndarray:
    """Stack per-microstrip coefficient vectors block-diagonally.

    coeffs is (M_y, M_x); element (m_y, m_x) maps to row m_y * M_x + m_x of
    the output, so a length-M vector reshapes to (M_y, M_x) in C order.
    """
    M_y, M_x = coeffs.shape
    T = np.zeros((M_y * M_x, M_y), dtype=complex)
    for m_y in range(M_y):
        T[m_y * M_x:(m_y + 1) * M_x, m_y] = coeffs[m_y]
    return T


def build_waveguide(cfg: ScenarioConfig, bs_index: int = 0) -> WaveguideModel:
    """Propagation model of one BS. All strips share the scenario's physics."""
    if not 0 <= bs_index < cfg.L:
        raise ValueError(f"bs_index {bs_index} out of range for L={cfg.L}")
    row = microstrip_coefficients(cfg.M_x, cfg.delta_x, cfg.alpha, cfg.beta,
                                  cfg.feeding)
    coeffs = np.tile(row, (cfg.M_y, 1))
    return WaveguideModel(coeffs=coeffs, matrix=propagation_matrix(coeffs))


def build_all_waveguides(cfg: ScenarioConfig) -> np.ndarray:
    """Stacked propagation matrices for every BS, shape (L, M, M_y)."""
    return np.stack([build_waveguide(cfg, i).matrix for i in range(cfg.L)])


def uniform_propagation_matrix(cfg: ScenarioConfig) -> np.ndarray:
    """All-ones feed pattern (M, M_y): phase control left entirely to the
    element responses, as in a conventional sub-connected hybrid array."""
    coeffs = np.ones((cfg.M_y, cfg.M_x), dtype=complex)
    return propagation_matrix(coeffs)


def los_steering(M: int, delta: float, wavelength: float,
                 angle: float) -> np.ndarray:
    """Line-of-sight steering vector of an M-element line array.

    Entry m (0-based) is exp(+1j * 2*pi*delta*m*sin(angle)/wavelength);
    entries are unit-modulus.
    """
    m = np.arange(M, dtype=float)
    return np.exp(1j * 2.0 * np.pi * delta * m * np.sin(angle) / wavelength)
