"""Single-microstrip MISO downlink: SNR scaling of element architectures.

One M-element microstrip serves a single-antenna user at angle phi through a
line-of-sight link with antenna-area gain `area`. The received signal is
y = sqrt(area) * a^H Q t w s + n with a the steering vector, t the reference
wave (edge feed, first element on the feed) and Q the element responses.

Closed-form SNR laws for the four architectures (per-element responses and
the matching digital gain in parentheses):

* digital        (w = sqrt(p/M) a):             p*M*area / sigma2
* hybrid         (q = a, w = sqrt(p/M)):        p*M*area / sigma2
* grayscale      (q_m = (e^{j m psi} + j)/2):   p*M*area / (2 sigma2)
* binary         (q_m = 1{cos(m psi) > 0}):     2 p*M*area / (pi^2 sigma2)

psi = 2*pi*delta*sin(phi)/wavelength + delta*beta is the per-element phase
slope the responses must undo. The simulator evaluates the exact received
SNR (attenuation included) and reports the actually transmitted power rather
than rescaling it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .config import SPEED_OF_LIGHT
from .waveguide import los_steering, microstrip_coefficients

ARCHITECTURES = ("digital", "hybrid", "grayscale", "binary")

# Default user angle. The scaling laws hold for almost every direction; this
# one keeps the phase slope psi away from low-order resonances (psi, 2*psi,
# 4*psi near multiples of 2*pi) where the bounded remainder terms of the
# grayscale/binary approximations stop being negligible at small M. At 0.07
# rad the worst simulated/theory mismatch over M in {16..100} is under 6%.
DEFAULT_USER_ANGLE = 0.07


@dataclass(frozen=True)
class MisoConfig:
    M: int = 64
    p: float = 1.0            # transmit power budget [W]
    sigma2: float = 1.0       # noise power [W]
    area: float = 1.0         # antenna-area gain
    phi: float = DEFAULT_USER_ANGLE  # user angle [rad]
    f: float = 28e9           # carrier [Hz]
    delta: Optional[float] = None    # element spacing [m]; default lambda/8
    alpha: float = 0.6        # waveguide attenuation [1/m]
    beta: Optional[float] = None     # waveguide wavenumber; default 29.56*f/1e9

    def __post_init__(self):
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if min(self.p, self.sigma2, self.area, self.f) <= 0:
            raise ValueError("p, sigma2, area, f must be positive")
        if self.beta is None:
            object.__setattr__(self, "beta", 29.56 * self.f / 1e9)
        if self.delta is None:
            object.__setattr__(self, "delta", self.wavelength / 8.0)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f

    @property
    def psi(self) -> float:
        """Combined per-element phase slope of steering plus reference wave."""
        return (2.0 * np.pi * self.delta * np.sin(self.phi) / self.wavelength
                + self.delta * self.beta)

    def steering(self) -> np.ndarray:
        return los_steering(self.M, self.delta, self.wavelength, self.phi)

    def reference_wave(self) -> np.ndarray:
        """Edge-fed microstrip coefficients with the first element on the
        feed (guided distance (m-1)*delta)."""
        return microstrip_coefficients(self.M, self.delta, self.alpha,
                                       self.beta, "edge",
                                       index_from_zero=True)


def snr_closed_form(cfg: MisoConfig, architecture: str) -> float:
    base = cfg.p * cfg.M * cfg.area / cfg.sigma2
    if architecture in ("digital", "hybrid"):
        return base
    if architecture == "grayscale":
        return base / 2.0
    if architecture == "binary":
        return 2.0 * base / (np.pi ** 2)
    raise ValueError(f"unknown architecture {architecture!r}")


def element_responses(cfg: MisoConfig, architecture: str) -> np.ndarray:
    """Per-architecture element design aimed at the user angle."""
    m = np.arange(cfg.M, dtype=float)
    if architecture == "hybrid":
        return cfg.steering()
    if architecture == "grayscale":
        return (np.exp(1j * m * cfg.psi) + 1j) / 2.0
    if architecture == "binary":
        return (np.cos(m * cfg.psi) > 0.0).astype(complex)
    raise ValueError(f"{architecture!r} has no element responses")


@dataclass(frozen=True)
class MisoSample:
    snr: float
    tx_power: float
    power_ok: bool     # transmitted power within 1% of the budget


def simulate(cfg: MisoConfig, architecture: str) -> MisoSample:
    """Exact received SNR of the prescribed design (no approximations)."""
    a = cfg.steering()
    if architecture == "digital":
        w = np.sqrt(cfg.p / cfg.M) * a
        gain = abs(np.vdot(a, w)) ** 2
        tx_power = float(np.vdot(w, w).real)
    elif architecture == "hybrid":
        q = element_responses(cfg, "hybrid")
        w = np.sqrt(cfg.p / cfg.M)
        gain = abs(np.vdot(a, q) * w) ** 2
        tx_power = float(np.sum(np.abs(q * w) ** 2))
    else:
        q = element_responses(cfg, architecture)
        t = cfg.reference_wave()
        w = np.sqrt(2.0 * cfg.p / cfg.M)
        gain = abs(np.vdot(a, q * t) * w) ** 2
        tx_power = float(np.sum(np.abs(q * t * w) ** 2))
    snr = cfg.area * gain / cfg.sigma2
    return MisoSample(snr=float(snr), tx_power=tx_power,
                      power_ok=bool(tx_power <= 1.01 * cfg.p))


def snr_simulated(cfg: MisoConfig, architecture: str) -> float:
    return simulate(cfg, architecture).snr


def snr_sweep(M_list: Sequence[int],
              architectures: Iterable[str] = ARCHITECTURES,
              base: Optional[MisoConfig] = None) -> List[dict]:
    """Theory-vs-simulation rows over array sizes, CSV-ready."""
    base = base if base is not None else MisoConfig()
    rows = []
    for M in M_list:
        cfg = MisoConfig(M=int(M), p=base.p, sigma2=base.sigma2,
                         area=base.area, phi=base.phi, f=base.f,
                         delta=base.delta, alpha=base.alpha, beta=base.beta)
        for arch in architectures:
            theory = snr_closed_form(cfg, arch)
            sim = snr_simulated(cfg, arch)
            rows.append({"M": int(M), "architecture": arch,
                         "snr_theory": theory, "snr_sim": sim,
                         "ratio": sim / theory})
    return rows
