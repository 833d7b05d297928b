"""Exact binary quadratic minimization by depth-first sphere decoding.

The binary design problem min F(s) = s^T A s - 2 b^T s over {-1,+1}^M is
rewritten, after adding a diagonal shift zeta to make A positive definite and
factoring A + zeta*I = C^T C with C upper triangular, as

    F(s) = ||C s - d||^2 - ||d||^2 - zeta*M,      d = C^{-T} b,

so minimizing F is a closest-lattice-point search over the hypercube. The
search enumerates levels from the last coordinate down, pruning by the sphere
radius. Two accelerations are available and composable:

* coordinate fixing: a per-coordinate optimality test on A + zeta*I decides
  some signs of the global optimum up front; fixed levels are skipped
  ("transparent") on both descent and ascent;
* relaxation lower bounds: at each level, the cost of the still-undecided
  head block is lower-bounded by the spherically-relaxed quadratic (solved in
  a per-level eigenbasis precomputed once), and branches that cannot beat the
  incumbent are cut.

The radius never grows during a search; shrinkage after an incumbent update
is carried by the gap term nabla = r0^2 - r*^2, so per-level budgets computed
against the initial radius stay valid.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from .element_problem import QuadraticForm, binary_objective
from .hidden_convexity import hc_solve, solve_sphere_quadratic

VARIANTS = ("plain", "optimal-condition", "lower-bound", "accelerated")


class TimeBudgetExceeded(RuntimeError):
    """Raised when a search exceeds its wall-time budget."""


def fixable_coordinates(A_prime: np.ndarray, b: np.ndarray) -> Dict[int, float]:
    """Coordinates of the global optimum decidable a priori.

    If b_k dominates the total off-diagonal coupling of row k, the sign of
    s_k at the optimum is forced: +1 when b_k > sum_{m != k} |A'_{k,m}|,
    -1 when b_k < -sum_{m != k} |A'_{k,m}|.
    """
    off = np.sum(np.abs(A_prime), axis=1) - np.abs(np.diag(A_prime))
    fixed: Dict[int, float] = {}
    for k in range(len(b)):
        if off[k] - b[k] < 0.0:
            fixed[k] = 1.0
        elif -off[k] - b[k] > 0.0:
            fixed[k] = -1.0
    return fixed


@dataclass
class _LbCache:
    """Per-level eigen data for the relaxation lower bound."""

    lam: List[Optional[np.ndarray]]   # eigenvalues of C_head^T C_head
    W: List[Optional[np.ndarray]]     # C_head @ eigvecs, for fast projections


@dataclass
class SdProblem:
    """Factored search data for one binary quadratic instance."""

    C: np.ndarray                 # (M, M) upper triangular, positive diagonal
    d: np.ndarray                 # (M,)
    zeta: float
    fixed: Dict[int, float]       # level -> forced sign
    qf: QuadraticForm
    _lb_cache: Optional[_LbCache] = field(default=None, repr=False)

    @property
    def M(self) -> int:
        return self.d.shape[0]

    def fixed_mask(self) -> np.ndarray:
        mask = np.zeros(self.M, dtype=bool)
        for k in self.fixed:
            mask[k] = True
        return mask

    def lb_cache(self) -> _LbCache:
        if self._lb_cache is None:
            lam: List[Optional[np.ndarray]] = [None] * self.M
            W: List[Optional[np.ndarray]] = [None] * self.M
            for h in range(1, self.M):
                Ch = self.C[:h, :h]
                G = Ch.T @ Ch
                vals, vecs = np.linalg.eigh(G)
                lam[h] = vals
                W[h] = Ch @ vecs
            self._lb_cache = _LbCache(lam=lam, W=W)
        return self._lb_cache


def build_sd_problem(qf: QuadraticForm,
                     fix_coordinates: bool = True) -> SdProblem:
    """Shift, factor and (optionally) pre-decide coordinates."""
    M = qf.M
    eigvals = np.linalg.eigvalsh(qf.A)
    zeta_floor = 1e-8 * (1.0 + float(np.trace(qf.A)) / M)
    zeta = max(0.0, zeta_floor - float(eigvals[0]))
    A_prime = None
    for _ in range(8):
        A_prime = qf.A + zeta * np.eye(M)
        try:
            lower = np.linalg.cholesky(A_prime)
            break
        except np.linalg.LinAlgError:
            zeta = max(zeta * 10.0, zeta_floor)
            zeta_floor *= 10.0
    else:
        raise np.linalg.LinAlgError("could not factor the shifted matrix")
    C = lower.T
    d = np.linalg.solve(lower, qf.b)  # C^T d = b, forward substitution
    fixed = fixable_coordinates(A_prime, qf.b) if fix_coordinates else {}
    return SdProblem(C=C, d=d, zeta=zeta, fixed=fixed, qf=qf)


def sd_objective(problem: SdProblem, s: np.ndarray) -> float:
    """F(s) through the factored identity (for cross-checks)."""
    res = problem.C @ s - problem.d
    return float(res @ res - problem.d @ problem.d
                 - problem.zeta * problem.M)


def _lb_value(problem: SdProblem, s: np.ndarray, head: int) -> float:
    """Relaxation lower bound on the head cost given the tail assignment.

    head is the number of still-undecided leading coordinates; the bound is
    the minimum of ||C_head x + C_cross s_tail - d_head||^2 over the sphere
    ||x||^2 = head, which contains every binary completion.
    """
    cache = problem.lb_cache()
    v = problem.d[:head] - problem.C[:head, head:] @ s[head:]
    c_hat = cache.W[head].T @ v
    sol = solve_sphere_quadratic(cache.lam[head], c_hat, float(head))
    return max(sol.value + float(v @ v), 0.0)


def hc_lower_bound(problem: SdProblem, s_tail: np.ndarray,
                   level: int) -> float:
    """Lower bound used while enumerating level `level` (1-based from the
    bottom; 2 <= level <= M). s_tail holds the assigned values of levels
    level..M, i.e. coordinates level-1 .. M-1."""
    if not 2 <= level <= problem.M:
        raise ValueError("level must be in [2, M]")
    head = level - 1
    s = np.zeros(problem.M)
    s[head:] = np.asarray(s_tail, dtype=float)
    return _lb_value(problem, s, head)


@dataclass
class SdResult:
    s: np.ndarray
    objective: float
    nodes: int
    radius_trace: List[float]
    found: bool
    variant: str = "plain"
    n_fixed: int = 0
    fallback: bool = False        # set by callers substituting another solver


# state machine labels
_BOUND_OBTAIN, _BOUND_CHECK, _NEXT_NODE, _MOVE_UP, _MOVE_DOWN, _SOLUTION = range(6)


def sd_search(problem: SdProblem, r0_sq: float, use_lb: bool = False,
              shrink: bool = True,
              deadline: Optional[float] = None) -> SdResult:
    """Depth-first search of {-1,+1}^M within squared radius r0_sq.

    Returns found=False when no point lies strictly inside the initial
    radius. The node counter is the number of (level, value) tests that pass
    the per-level interval bound.
    """
    C, d = problem.C, problem.d
    M = problem.M
    fixed_mask = problem.fixed_mask()
    s = -np.ones(M)
    for k, v in problem.fixed.items():
        s[k] = v
    objective = lambda vec: binary_objective(problem.qf, vec)
    if fixed_mask.all():
        return SdResult(s=s, objective=objective(s), nodes=0,
                        radius_trace=[], found=True, n_fixed=M)
    if use_lb:
        problem.lb_cache()  # build eagerly, off the per-node path
    lb_slack = 1e-9 * (1.0 + abs(r0_sq))

    ghat = np.zeros(M)
    rhat2 = np.zeros(M)
    lo_arr = np.zeros(M)
    hi_arr = np.zeros(M)
    nabla = 0.0
    best: Optional[np.ndarray] = None
    best_dist2 = r0_sq
    nodes = 0
    steps = 0
    radius_trace: List[float] = []

    def descend_to(j: int) -> None:
        ghat[j] = C[j, j + 1:] @ s[j + 1:] - d[j]
        rhat2[j] = rhat2[j + 1] - (ghat[j + 1] + C[j + 1, j + 1] * s[j + 1]) ** 2

    k = M - 1
    ghat[k] = -d[k]
    rhat2[k] = r0_sq
    while fixed_mask[k]:
        k -= 1
        descend_to(k)
    state = _BOUND_OBTAIN

    while True:
        steps += 1
        if deadline is not None and steps % 1024 == 0:
            if time.monotonic() > deadline:
                raise TimeBudgetExceeded(
                    f"sphere search exceeded its budget after {nodes} nodes")
        if state == _BOUND_OBTAIN:
            budget = rhat2[k] - nabla
            if budget >= 0.0:
                root = np.sqrt(budget)
                lo_arr[k] = (-root - ghat[k]) / C[k, k]
                hi_arr[k] = (root - ghat[k]) / C[k, k]
            else:
                lo_arr[k] = 1.0
                hi_arr[k] = -1.0
            state = _BOUND_CHECK
        elif state == _BOUND_CHECK:
            if lo_arr[k] <= s[k] <= hi_arr[k]:
                nodes += 1
                descend = True
                if use_lb and k >= 1:
                    rem = rhat2[k] - nabla - (ghat[k] + C[k, k] * s[k]) ** 2
                    if rem < 0.0:
                        descend = False
                    elif rem < _lb_value(problem, s, k) - lb_slack:
                        descend = False
                state = _MOVE_DOWN if descend else _NEXT_NODE
            else:
                state = _NEXT_NODE
        elif state == _NEXT_NODE:
            if s[k] == -1.0 and not fixed_mask[k]:
                s[k] = 1.0
                state = _BOUND_CHECK
            else:
                state = _MOVE_UP
        elif state == _MOVE_UP:
            while k + 1 < M and fixed_mask[k + 1]:
                k += 1
            if k == M - 1:
                break
            k += 1
            state = _NEXT_NODE
        elif state == _MOVE_DOWN:
            while k - 1 >= 0 and fixed_mask[k - 1]:
                k -= 1
                descend_to(k)
            if k == 0:
                state = _SOLUTION
            else:
                k -= 1
                descend_to(k)
                s[k] = -1.0
                state = _BOUND_OBTAIN
        else:  # _SOLUTION
            res = C @ s - d
            dist2 = float(res @ res)
            if dist2 < best_dist2:
                best_dist2 = dist2
                best = s.copy()
                if shrink:
                    nabla = r0_sq - dist2
                radius_trace.append(float(np.sqrt(dist2)))
            state = _NEXT_NODE

    if best is None:
        return SdResult(s=s, objective=np.inf, nodes=nodes,
                        radius_trace=radius_trace, found=False,
                        n_fixed=int(fixed_mask.sum()))
    return SdResult(s=best, objective=objective(best), nodes=nodes,
                    radius_trace=radius_trace, found=True,
                    n_fixed=int(fixed_mask.sum()))


def initial_radius_sq(problem: SdProblem,
                      s_hint: Optional[np.ndarray] = None) -> float:
    """Squared search radius seeded from the relaxation-based binary solve,
    inflated so the seeding point itself lies strictly inside."""
    hc = hc_solve(problem.qf, s_hint)
    base = hc.objective + float(problem.d @ problem.d) + problem.zeta * problem.M
    base = max(base, 0.0)
    return base * (1.0 + 1e-9) + 1e-12 * (1.0 + base + float(problem.d @ problem.d))


def solve_binary_exact(qf: QuadraticForm, variant: str = "accelerated",
                       s_hint: Optional[np.ndarray] = None,
                       time_limit: Optional[float] = None) -> SdResult:
    """Globally minimize F over {-1,+1}^M with the chosen search variant."""
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    fix = variant in ("optimal-condition", "accelerated")
    use_lb = variant in ("lower-bound", "accelerated")
    problem = build_sd_problem(qf, fix_coordinates=fix)
    r0_sq = initial_radius_sq(problem, s_hint)
    deadline = time.monotonic() + time_limit if time_limit is not None else None
    result = None
    for _ in range(64):
        result = sd_search(problem, r0_sq, use_lb=use_lb, deadline=deadline)
        if result.found:
            break
        r0_sq *= 4.0  # empty sphere: enlarge and retry
    if result is None or not result.found:
        raise RuntimeError("sphere search failed to locate any point")
    result.variant = variant
    return result
