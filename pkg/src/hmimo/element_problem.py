"""Per-cell element-response design problem.

With precoders, receive filters and MSE weights fixed, the surrogate
objective restricted to one cell's element responses q is, up to a constant,

    f(q) = q^H A_o q - 2 Re{b_o^T q},

where A_o is a Hermitian PSD coupling matrix (a Hadamard product of the
receive-side and transmit-side couplings) and b_o collects the desired-signal
alignment of the cell's own users. For binary on/off elements, substituting
q = varpi*(s + 1)/2 with s in {-1, +1}^M turns f into a real quadratic
F(s) = s^T A s - 2 b^T s (constant dropped).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .precoding import cell_coupling_matrix
from .wmmse import BeamformerState


@dataclass(frozen=True)
class ElementDesignProblem:
    """Complex quadratic data of one cell's element design step."""

    A_o: np.ndarray  # (M, M) Hermitian PSD
    b_o: np.ndarray  # (M,) complex
    cell: int = 0

    @property
    def M(self) -> int:
        return self.b_o.shape[0]


@dataclass(frozen=True)
class QuadraticForm:
    """Real symmetric binary quadratic: minimize s^T A s - 2 b^T s over
    s in {-1, +1}^M."""

    A: np.ndarray  # (M, M) real symmetric PSD
    b: np.ndarray  # (M,) real
    varpi: float = 0.8

    @property
    def M(self) -> int:
        return self.b.shape[0]


def assemble_element_problem(state: BeamformerState, H: np.ndarray,
                             T: np.ndarray, weights: np.ndarray,
                             cell: int) -> ElementDesignProblem:
    """Quadratic coefficients of one cell's element-response subproblem."""
    U_cnt = state.W.shape[1]
    K = cell_coupling_matrix(state, H, weights, cell)  # receive-side coupling
    # transmit-side coupling: sum_u (T W_u)(T W_u)^H
    F_tx = np.zeros_like(K)
    for u in range(U_cnt):
        TW = T[cell] @ state.W[cell, u]  # (M, d)
        F_tx += TW @ TW.conj().T
    A_o = K * F_tx.T  # Hadamard; PSD by the Schur product theorem
    A_o = 0.5 * (A_o + A_o.conj().T)
    b_o = np.zeros(state.q.shape[1], dtype=complex)
    for k in range(U_cnt):
        left = T[cell] @ state.W[cell, k] @ state.V[cell, k]          # (M, d)
        right = state.U[cell, k].conj().T @ H[cell, k, cell]          # (d, M)
        b_o += weights[cell, k] * np.einsum("md,dm->m", left, right)
    return ElementDesignProblem(A_o=A_o, b_o=b_o, cell=cell)


def quadratic_objective(problem: ElementDesignProblem,
                        q: np.ndarray) -> float:
    """f(q) = q^H A_o q - 2 Re{b_o^T q} (constant offset dropped)."""
    quad = np.real(np.vdot(q, problem.A_o @ q))
    return float(quad - 2.0 * np.real(problem.b_o @ q))


def to_real_binary(problem: ElementDesignProblem,
                   varpi: float) -> QuadraticForm:
    """Real binary reduction of the on/off design under q = varpi*(s+1)/2."""
    Ar = np.real(problem.A_o)
    Ar = 0.5 * (Ar + Ar.T)
    A = (varpi ** 2 / 4.0) * Ar
    b = (varpi / 2.0) * np.real(problem.b_o) - (varpi ** 2 / 4.0) * (Ar @ np.ones(problem.M))
    return QuadraticForm(A=A, b=b, varpi=varpi)


def binary_objective(qf: QuadraticForm, s: np.ndarray) -> float:
    """F(s) = s^T A s - 2 b^T s for s in {-1, +1}^M."""
    s = np.asarray(s, dtype=float)
    return float(s @ qf.A @ s - 2.0 * qf.b @ s)


def binary_objective_batch(qf: QuadraticForm, S: np.ndarray) -> np.ndarray:
    """F(s) for each row of S, shape (n, M) -> (n,)."""
    S = np.asarray(S, dtype=float)
    return np.einsum("nm,mk,nk->n", S, qf.A, S) - 2.0 * S @ qf.b


def levels_from_signs(s: np.ndarray, varpi: float) -> np.ndarray:
    """Map s in {-1, +1}^M back to element responses in {0, varpi}."""
    return (varpi * (np.asarray(s, dtype=float) + 1.0) / 2.0).astype(complex)


def signs_from_levels(q: np.ndarray, varpi: float) -> np.ndarray:
    """Inverse map; entries must already lie in {0, varpi}."""
    return np.where(np.real(q) >= varpi / 2.0, 1.0, -1.0)


def unconstrained_optimum(problem: ElementDesignProblem,
                          ridge_scale: float = 1e-12
                          ) -> Tuple[np.ndarray, bool]:
    """Stationary point of f over unconstrained complex q.

    Near-singular A_o gets a ridge of ridge_scale * trace; the flag reports
    whether it was applied.
    """
    A = problem.A_o
    eigvals = np.linalg.eigvalsh(A)
    ridged = bool(eigvals[0] <= 1e-12 * max(1.0, eigvals[-1]))
    if ridged:
        A = A + (ridge_scale * max(1.0, float(np.trace(A).real))) * np.eye(problem.M)
    q = np.linalg.solve(A.conj().T, np.conj(problem.b_o))
    return q, ridged


def projection_baseline(problem: ElementDesignProblem, constraint) -> np.ndarray:
    """Unconstrained optimum snapped elementwise onto the constraint set."""
    from .constraints import project_element

    q, _ = unconstrained_optimum(problem)
    return project_element(q, constraint)


def make_random_quadratic(M: int, rng: np.random.Generator,
                          b_scale: float = 1.0,
                          varpi: float = 0.8) -> QuadraticForm:
    """Random PSD instance for benchmarks and oracle tests."""
    G = rng.standard_normal((M, M))
    A = G @ G.T / M
    b = b_scale * rng.standard_normal(M)
    return QuadraticForm(A=A, b=b, varpi=varpi)


def save_text(qf: QuadraticForm, path) -> None:
    """Plain-text dump: size line, M rows of A, one row of b, varpi."""
    with open(path, "w") as fh:
        fh.write(f"{qf.M}\n")
        for row in qf.A:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")
        fh.write(" ".join(f"{v:.17g}" for v in qf.b) + "\n")
        fh.write(f"{qf.varpi:.17g}\n")


def load_text(path) -> QuadraticForm:
    with open(path) as fh:
        tokens = fh.read().split("\n")
    M = int(tokens[0])
    A = np.array([[float(v) for v in tokens[1 + i].split()] for i in range(M)])
    b = np.array([float(v) for v in tokens[1 + M].split()])
    if len(b) != M or A.shape != (M, M):
        raise ValueError(f"malformed quadratic form file {path}")
    varpi = float(tokens[2 + M]) if len(tokens) > 2 + M and tokens[2 + M].strip() else 0.8
    return QuadraticForm(A=A, b=b, varpi=varpi)
