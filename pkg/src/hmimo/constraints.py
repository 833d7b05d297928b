"""Element response constraint sets and their projections.

Two realizable tuning sets for a metamaterial radiator:

* binary on/off: q in {0, varpi};
* grayscale Lorentzian: q = (j + exp(j*theta)) / 2, a circle of radius 1/2
  centered at j/2 that passes through 0 and j.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np


@dataclass(frozen=True)
class BinaryConstraint:
    varpi: float = 0.8

    def __post_init__(self):
        if self.varpi <= 0:
            raise ValueError("varpi must be positive")


@dataclass(frozen=True)
class LorentzianConstraint:
    pass


ElementConstraint = Union[BinaryConstraint, LorentzianConstraint]


def project_binary(values: np.ndarray, varpi: float) -> np.ndarray:
    """Elementwise nearest point of {0, varpi}: threshold Re at varpi/2.

    Ties (Re == varpi/2) round up to varpi.
    """
    values = np.asarray(values)
    return np.where(values.real >= varpi / 2.0, varpi, 0.0).astype(complex)


def project_lorentzian(values: np.ndarray) -> np.ndarray:
    """Elementwise nearest point of the Lorentzian circle {(j+e^{j*t})/2}.

    Radial projection onto the circle centered at j/2. The center itself has
    no unique nearest point; numpy's angle(0) = 0 convention sends it to
    (1+j)/2.
    """
    values = np.asarray(values, dtype=complex)
    phase = np.angle(values - 0.5j)
    return (np.exp(1j * phase) + 1j) / 2.0


def project_element(value, constraint: ElementConstraint):
    """Project a single response (or array) onto the constraint set."""
    if isinstance(constraint, BinaryConstraint):
        return project_binary(value, constraint.varpi)
    if isinstance(constraint, LorentzianConstraint):
        return project_lorentzian(value)
    raise TypeError(f"unknown constraint {constraint!r}")


def contains(values: np.ndarray, constraint: ElementConstraint,
             tol: float = 1e-9) -> bool:
    """Whether every entry lies in the constraint set (up to tol)."""
    values = np.asarray(values, dtype=complex)
    if isinstance(constraint, BinaryConstraint):
        dist = np.minimum(np.abs(values), np.abs(values - constraint.varpi))
        return bool(np.all(dist <= tol))
    if isinstance(constraint, LorentzianConstraint):
        return bool(np.all(np.abs(np.abs(values - 0.5j) - 0.5) <= tol))
    raise TypeError(f"unknown constraint {constraint!r}")
