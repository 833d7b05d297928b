"""Geometric multipath channel generation for the multi-cell scenario.

Channels follow a sparse mmWave model: n_paths plane waves with CN(0,1) gains,
uniformly drawn departure angles at the BS planar array and arrival angles at
the user's half-wavelength ULA,

    H = sqrt(pathloss / n_paths) * sum_p  g_p * a_user(theta_p) a_bs(phi_p)^H.

Array responses use unit-modulus entries, so E||H||_F^2 = pathloss * N * M.
Pathloss is log-distance, PL_dB(r) = ref_db + 10 * exp * log10(r / 1 m), with
optional lognormal shadowing. Base stations sit on a regular polygon with side
inter_cell_distance; users drop uniformly in each cell's disc.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig


@dataclass(frozen=True)
class ChannelSet:
    """All downlink channels of one realization.

    H[i, k, j] is the (N, M) channel from BS j to user k of cell i.
    """

    H: np.ndarray        # (L, U, L, N, M) complex
    bs_xy: np.ndarray    # (L, 2) BS positions [m]
    user_xy: np.ndarray  # (L, U, 2) user positions [m]
    seed: int

    def save(self, path) -> None:
        np.savez_compressed(path, H=self.H, bs_xy=self.bs_xy,
                            user_xy=self.user_xy, seed=np.int64(self.seed))

    @classmethod
    def load(cls, path) -> "ChannelSet":
        with np.load(path) as data:
            return cls(H=data["H"], bs_xy=data["bs_xy"],
                       user_xy=data["user_xy"], seed=int(data["seed"]))


def bs_layout(L: int, spacing: float) -> np.ndarray:
    """BS positions: single site at the origin, else a regular polygon whose
    side length equals `spacing` (adjacent sites are one inter-cell distance
    apart)."""
    if L == 1:
        return np.zeros((1, 2))
    radius = spacing / (2.0 * np.sin(np.pi / L))
    angles = 2.0 * np.pi * np.arange(L) / L
    return radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)


def drop_users(cfg: ScenarioConfig, rng: np.random.Generator,
               bs_xy: np.ndarray) -> np.ndarray:
    """Uniform user positions in each cell disc, at least
    min_bs_user_distance from the serving BS."""
    r_min, r_max = cfg.min_bs_user_distance, cfg.cell_radius
    if r_min >= r_max:
        raise ValueError("min_bs_user_distance must be below the cell radius")
    out = np.empty((cfg.L, cfg.U_per_cell, 2))
    for i in range(cfg.L):
        for k in range(cfg.U_per_cell):
            # uniform over the annulus via inverse-CDF on r^2
            u = rng.uniform(r_min ** 2, r_max ** 2)
            r = np.sqrt(u)
            phi = rng.uniform(0.0, 2.0 * np.pi)
            out[i, k] = bs_xy[i] + r * np.array([np.cos(phi), np.sin(phi)])
    return out


def pathloss_db(distance: float, ref_db: float, exponent: float) -> float:
    d = max(float(distance), 1.0)
    return ref_db + 10.0 * exponent * np.log10(d)


def user_array_response(N: int, wavelength: float, angle) -> np.ndarray:
    """Half-wavelength ULA response at the user, unit-modulus entries."""
    n = np.arange(N, dtype=float)
    angle = np.atleast_1d(angle)
    return np.exp(1j * np.pi * np.outer(np.sin(angle), n))  # (P, N)


def bs_array_response(cfg: ScenarioConfig, azimuth, elevation) -> np.ndarray:
    """Planar-array response at the BS, unit-modulus entries, shape (P, M).

    Element (m_y, m_x) sits at (x, y) = (m_x*delta_x, m_y*delta_y) and is row
    m_y*M_x + m_x of the flattened response (same ordering as the waveguide
    propagation matrix).
    """
    azimuth = np.atleast_1d(azimuth)
    elevation = np.atleast_1d(elevation)
    x = cfg.delta_x * np.arange(cfg.M_x)
    y = cfg.delta_y * np.arange(cfg.M_y)
    kx = np.cos(elevation) * np.sin(azimuth)   # (P,)
    ky = np.sin(elevation)
    phase = (kx[:, None, None] * x[None, None, :]
             + ky[:, None, None] * y[None, :, None])  # (P, M_y, M_x)
    a = np.exp(1j * 2.0 * np.pi / cfg.wavelength * phase)
    return a.reshape(len(azimuth), cfg.M)


def geometric_channel(cfg: ScenarioConfig, gains: np.ndarray,
                      user_angles: np.ndarray, bs_azimuths: np.ndarray,
                      bs_elevations: np.ndarray,
                      pathloss_lin: float) -> np.ndarray:
    """Assemble one (N, M) channel from explicit path parameters."""
    P = len(gains)
    a_user = user_array_response(cfg.N, cfg.wavelength, user_angles)  # (P, N)
    a_bs = bs_array_response(cfg, bs_azimuths, bs_elevations)         # (P, M)
    H = np.einsum("p,pn,pm->nm", gains, a_user, np.conj(a_bs))
    return np.sqrt(pathloss_lin / P) * H


def generate_channels(cfg: ScenarioConfig) -> ChannelSet:
    """Draw one channel realization; deterministic in cfg.rng_seed."""
    rng = np.random.default_rng(cfg.rng_seed)
    bs_xy = bs_layout(cfg.L, cfg.inter_cell_distance)
    user_xy = drop_users(cfg, rng, bs_xy)
    H = np.empty((cfg.L, cfg.U_per_cell, cfg.L, cfg.N, cfg.M), dtype=complex)
    P = cfg.n_paths
    for i in range(cfg.L):
        for k in range(cfg.U_per_cell):
            for j in range(cfg.L):
                dist = np.linalg.norm(user_xy[i, k] - bs_xy[j])
                pl_db = pathloss_db(dist, cfg.pathloss_ref_db, cfg.pathloss_exp)
                if cfg.shadow_std_db > 0.0:
                    pl_db += rng.normal(0.0, cfg.shadow_std_db)
                gains = (rng.standard_normal(P) + 1j * rng.standard_normal(P))
                gains /= np.sqrt(2.0)
                theta = rng.uniform(-np.pi / 2, np.pi / 2, size=P)
                az = rng.uniform(-np.pi / 2, np.pi / 2, size=P)
                el = rng.uniform(-np.pi / 4, np.pi / 4, size=P)
                H[i, k, j] = geometric_channel(
                    cfg, gains, theta, az, el, 10.0 ** (-pl_db / 10.0))
    return ChannelSet(H=H, bs_xy=bs_xy, user_xy=user_xy, seed=cfg.rng_seed)
