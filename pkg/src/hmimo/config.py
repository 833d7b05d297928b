"""Scenario configuration for multi-cell holographic MIMO downlink runs.

A scenario bundles the cell topology, array geometry, waveguide physics and
power budget. Everything downstream (channel generation, beamforming updates,
experiment sweeps) is a deterministic function of one ScenarioConfig plus its
rng_seed.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional, Tuple

SPEED_OF_LIGHT = 299_792_458.0  # m/s

FEEDINGS = ("edge", "center")


def dbm_to_watt(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watt_to_dbm(p_watt: float) -> float:
    if p_watt <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p_watt) + 30.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Multi-cell downlink scenario.

    Array layout: each base station carries M_y parallel microstrips with M_x
    radiating elements each (M = M_x * M_y). delta_x is the element spacing
    along a microstrip, delta_y the spacing between microstrips; both default
    to fractions of the carrier wavelength (lambda/8 and lambda/2).

    Power: p_tot is the total budget in watts used to derive the default
    per-RF-chain cap p_rf = p_tot / M. sigma2 is the receiver noise power in
    watts.
    """

    L: int = 3                    # number of cells
    U_per_cell: int = 2           # users per cell
    N: int = 2                    # antennas per user
    d: int = 2                    # data streams per user
    M_y: int = 4                  # microstrips (RF chains) per BS
    M_x: int = 8                  # elements per microstrip
    p_tot: float = 1.0            # total power budget [W] (30 dBm)
    p_rf: Optional[float] = None  # per-RF-chain cap [W]; default p_tot / M
    sigma2: float = dbm_to_watt(-104.0)  # noise power [W]
    f: float = 28e9               # carrier frequency [Hz]
    alpha: float = 0.6            # waveguide attenuation [1/m]
    beta: Optional[float] = None  # waveguide wavenumber [rad/m]; default 29.56*f/1e9
    delta_x: Optional[float] = None  # element spacing along microstrip [m]
    delta_y: Optional[float] = None  # microstrip spacing [m]
    varpi: float = 0.8            # "on" amplitude of binary elements
    inter_cell_distance: float = 400.0  # BS spacing [m]
    feeding: str = "edge"         # microstrip feed position: "edge" | "center"
    weights: Optional[Tuple[float, ...]] = None  # per-user priorities, row-major (L*U,)
    rng_seed: int = 0
    # channel model knobs
    n_paths: int = 4
    pathloss_ref_db: float = 82.0     # intercept at 1 m [dB]; 28 GHz free space (61.4)
                                      # plus excess/penetration margin
    pathloss_exp: float = 3.0
    shadow_std_db: float = 0.0
    min_bs_user_distance: float = 50.0  # exclusion radius around each BS [m]

    def __post_init__(self):
        lam = SPEED_OF_LIGHT / self.f
        if self.beta is None:
            object.__setattr__(self, "beta", 29.56 * self.f / 1e9)
        if self.delta_x is None:
            object.__setattr__(self, "delta_x", lam / 8.0)
        if self.delta_y is None:
            object.__setattr__(self, "delta_y", lam / 2.0)
        if self.p_rf is None:
            object.__setattr__(self, "p_rf", self.p_tot / self.M)
        self.validate()

    @property
    def M(self) -> int:
        return self.M_x * self.M_y

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f

    @property
    def n_users(self) -> int:
        return self.L * self.U_per_cell

    @property
    def cell_radius(self) -> float:
        return self.inter_cell_distance / 2.0

    def user_weights(self):
        """Per-user priorities as an (L, U) array; defaults to all-ones."""
        import numpy as np

        if self.weights is None:
            return np.ones((self.L, self.U_per_cell))
        w = np.asarray(self.weights, dtype=float).reshape(self.L, self.U_per_cell)
        return w

    def validate(self) -> None:
        if min(self.L, self.U_per_cell, self.N, self.d, self.M_y, self.M_x) < 1:
            raise ValueError("counts L, U_per_cell, N, d, M_y, M_x must be >= 1")
        if self.d > self.N:
            raise ValueError("stream count d must not exceed user antennas N")
        if self.M_y < self.U_per_cell * self.d:
            raise ValueError(
                "need M_y >= U_per_cell * d RF chains to carry all streams"
            )
        for name in ("p_tot", "p_rf", "sigma2", "f", "varpi",
                     "inter_cell_distance", "delta_x", "delta_y"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.alpha < 0:
            raise ValueError("attenuation alpha must be >= 0")
        if self.feeding not in FEEDINGS:
            raise ValueError(f"feeding must be one of {FEEDINGS}")
        if self.weights is not None and len(self.weights) != self.n_users:
            raise ValueError("weights must have L * U_per_cell entries")
        if self.weights is not None and any(w <= 0 for w in self.weights):
            raise ValueError("weights must be positive")
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")

    # -- config file round trip ------------------------------------------------

    _SERIALIZED = (
        "L", "U_per_cell", "N", "d", "M_y", "M_x", "p_tot", "p_rf", "sigma2",
        "f", "alpha", "beta", "delta_x", "delta_y", "varpi",
        "inter_cell_distance", "feeding", "weights", "rng_seed", "n_paths",
        "pathloss_ref_db", "pathloss_exp", "shadow_std_db",
        "min_bs_user_distance",
    )
    _INT_FIELDS = frozenset({"L", "U_per_cell", "N", "d", "M_y", "M_x",
                             "rng_seed", "n_paths"})

    def to_file(self, path) -> None:
        """Write the scenario as `key = value` lines (floats in repr form)."""
        lines = ["# hmimo scenario"]
        for name in self._SERIALIZED:
            value = getattr(self, name)
            if value is None:
                continue
            if name == "weights":
                value = ",".join(repr(w) for w in value)
            lines.append(f"{name} = {value}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        fields = {}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ValueError(f"{path}:{lineno}: expected 'key = value'")
                key, value = (part.strip() for part in line.split("=", 1))
                if key not in cls._SERIALIZED:
                    raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
                fields[key] = value
        return cls.from_dict(fields)

    @classmethod
    def from_dict(cls, fields: dict) -> "ScenarioConfig":
        kwargs = {}
        for key, value in fields.items():
            if key == "feeding":
                kwargs[key] = str(value)
            elif key == "weights":
                if isinstance(value, str):
                    kwargs[key] = tuple(float(v) for v in value.split(",") if v.strip())
                elif value is not None:
                    kwargs[key] = tuple(float(v) for v in value)
            elif key in cls._INT_FIELDS:
                kwargs[key] = int(value)
            else:
                kwargs[key] = float(value)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out = {}
        for name in self._SERIALIZED:
            value = getattr(self, name)
            if name == "weights" and value is not None:
                value = list(value)
            out[name] = value
        return out

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)
