"""Experiment harness: block-coordinate descent runs, sweeps and reports.

One outer iteration updates, in order: receive filters, MSE weights, digital
precoders (per-RF-chain closed form), element responses (per-cell, by the
solver variant under test). Element updates keep the previous responses
whenever a candidate would increase the surrogate objective, so recorded
sum-rate traces are non-decreasing for every solver.

Solver variants
---------------
WMMSE-HC        binary elements, sphere relaxation + rounding + local search
WMMSE-SD        binary elements, exact sphere-decoder solve (HC fallback on
                wall-time expiry or oversized arrays, with a warning)
WMMSE-BiProj    binary elements, unconstrained optimum thresholded
WMMSE-MM        Lorentzian grayscale elements, majorize-minimize
WMMSE-GrayProj  Lorentzian elements, unconstrained optimum projected
FullyDigital    one RF chain per element, unit responses (upper baseline)
HybridDA        sub-connected phase shifters, uniform feed, unit-modulus MM
"""

from __future__ import annotations

import csv
import hashlib
import json
import platform
import time
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import __version__ as _pkg_version
from .channels import generate_channels
from .config import ScenarioConfig, dbm_to_watt
from .constraints import BinaryConstraint, LorentzianConstraint
from .element_problem import (assemble_element_problem, projection_baseline,
                              quadratic_objective, levels_from_signs,
                              signs_from_levels, to_real_binary)
from .hidden_convexity import hc_solve
from .lorentzian_mm import mm_solve, mm_solve_unit_modulus
from .precoding import update_precoders
from .sphere_decoder import TimeBudgetExceeded, solve_binary_exact
from .waveguide import build_all_waveguides, uniform_propagation_matrix
from .wmmse import (BeamformerState, effective_channels, init_state,
                    per_user_rates_nats, power_feasible, update_decoders,
                    update_weights, wmmse_objective, LN2)

SOLVERS = ("WMMSE-HC", "WMMSE-SD", "WMMSE-BiProj", "WMMSE-MM",
           "WMMSE-GrayProj", "FullyDigital", "HybridDA")

_BINARY_SOLVERS = ("WMMSE-HC", "WMMSE-SD", "WMMSE-BiProj")
_LORENTZIAN_SOLVERS = ("WMMSE-MM", "WMMSE-GrayProj")


@dataclass(frozen=True)
class ExperimentSpec:
    """A scenario plus solver and loop controls."""

    scenario: ScenarioConfig
    solver: str = "WMMSE-HC"
    max_iters: int = 100
    rate_tol: float = 1e-4        # relative sum-rate change to declare done
    sd_variant: str = "accelerated"
    sd_time_limit: float = 10.0   # seconds per element-design solve
    sd_max_elements: int = 32     # larger arrays fall back to WMMSE-HC
    monotone_guard: bool = True
    strict_checks: bool = False   # per-block objective/power assertions

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ValueError(f"solver must be one of {SOLVERS}")

    def constraint(self):
        if self.solver in _BINARY_SOLVERS:
            return BinaryConstraint(self.scenario.varpi)
        if self.solver in _LORENTZIAN_SOLVERS:
            return LorentzianConstraint()
        return None


@dataclass
class RunRecord:
    solver: str
    seed: int
    iterations: int
    converged: bool
    sum_rate_trace: List[float]          # weighted sum rate [bit/cu] per round
    objective_trace: List[float]         # surrogate objective [nats]
    per_user_trace: List[np.ndarray]     # (L, U) rates [bit/cu] per round
    per_user_bits: np.ndarray            # (L, U) final rates
    final_sum_rate: float
    q: np.ndarray                        # (L, M) final element responses
    sd_nodes: List[int] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    wall_time: float = 0.0


def _setup(spec: ExperimentSpec, cfg: ScenarioConfig):
    """Channels, feed matrices and a seeded starting state for one run."""
    channels = generate_channels(cfg)
    solver = spec.solver
    if solver == "FullyDigital":
        cfg_run = cfg.replace(M_y=cfg.M, M_x=1)
        T = np.tile(np.eye(cfg.M, dtype=complex), (cfg.L, 1, 1))
    elif solver == "HybridDA":
        cfg_run = cfg
        T = np.tile(uniform_propagation_matrix(cfg), (cfg.L, 1, 1))
    else:
        cfg_run = cfg
        T = build_all_waveguides(cfg)
    rng = np.random.default_rng(np.random.SeedSequence([cfg.rng_seed, 1]))
    state = init_state(cfg_run, rng, spec.constraint())
    if solver == "HybridDA":
        phases = rng.uniform(0.0, 2.0 * np.pi, size=state.q.shape)
        state = state.replace(q=np.exp(1j * phases))
    return cfg_run, channels, T, state


def _element_step(spec: ExperimentSpec, state: BeamformerState,
                  H: np.ndarray, T: np.ndarray, weights: np.ndarray,
                  varpi: float, record: RunRecord) -> BeamformerState:
    """Per-cell element-response update; cells are independent given the
    other blocks."""
    solver = spec.solver
    if solver == "FullyDigital":
        return state
    L = state.q.shape[0]
    q_new = state.q.copy()
    for cell in range(L):
        problem = assemble_element_problem(state, H, T, weights, cell)
        q_prev = state.q[cell]
        if solver in _BINARY_SOLVERS:
            qf = to_real_binary(problem, varpi)
            s_prev = signs_from_levels(q_prev, varpi)
            if solver == "WMMSE-SD" and qf.M <= spec.sd_max_elements:
                try:
                    res = solve_binary_exact(qf, spec.sd_variant,
                                             s_hint=s_prev,
                                             time_limit=spec.sd_time_limit)
                    record.sd_nodes.append(res.nodes)
                    q_new[cell] = levels_from_signs(res.s, varpi)
                    continue
                except TimeBudgetExceeded:
                    record.warnings.append(
                        f"cell {cell}: sphere search over budget, "
                        "relaxation solve substituted")
            elif solver == "WMMSE-SD":
                record.warnings.append(
                    f"cell {cell}: {qf.M} elements exceed the exact-search "
                    "cap, relaxation solve substituted")
            if solver == "WMMSE-BiProj":
                cand = projection_baseline(
                    problem, BinaryConstraint(varpi))
                if (spec.monotone_guard
                        and quadratic_objective(problem, cand)
                        > quadratic_objective(problem, q_prev)):
                    cand = q_prev
                q_new[cell] = cand
            else:  # WMMSE-HC and every SD fallback path
                res = hc_solve(qf, s_prev)
                q_new[cell] = levels_from_signs(res.s, varpi)
        elif solver in _LORENTZIAN_SOLVERS:
            if solver == "WMMSE-MM":
                q_hat_prev = 2.0 * q_prev - 1j
                res = mm_solve(problem.A_o, problem.b_o, q_hat_prev)
                q_new[cell] = res.responses
            else:
                cand = projection_baseline(problem, LorentzianConstraint())
                if (spec.monotone_guard
                        and quadratic_objective(problem, cand)
                        > quadratic_objective(problem, q_prev)):
                    cand = q_prev
                q_new[cell] = cand
        elif solver == "HybridDA":
            res = mm_solve_unit_modulus(problem.A_o, problem.b_o, q_prev)
            q_new[cell] = res.q_hat
        else:
            raise ValueError(f"unhandled solver {solver}")
    return state.replace(q=q_new)


def run_bcd(spec: ExperimentSpec, seed: Optional[int] = None) -> RunRecord:
    """One full block-coordinate run. Deterministic in (spec, seed)."""
    cfg = spec.scenario if seed is None \
        else spec.scenario.replace(rng_seed=seed)
    t0 = time.monotonic()
    cfg_run, channels, T, state = _setup(spec, cfg)
    H = channels.H
    weights = cfg_run.user_weights()
    sigma2 = cfg_run.sigma2
    record = RunRecord(solver=spec.solver, seed=cfg.rng_seed, iterations=0,
                       converged=False, sum_rate_trace=[],
                       objective_trace=[], per_user_trace=[],
                       per_user_bits=None, final_sum_rate=np.nan, q=None)

    def objective(st):
        return wmmse_objective(st, effective_channels(H, T, st.q), sigma2,
                               weights)

    prev_rate = None
    for it in range(1, spec.max_iters + 1):
        Heff = effective_channels(H, T, state.q)
        state = update_decoders(state, Heff, sigma2)
        state = update_weights(state, Heff, sigma2)
        obj_after_weights = objective(state)
        state = update_precoders(state, H, T, weights, cfg_run.p_rf)
        if spec.strict_checks:
            obj_w = objective(state)
            slack = 1e-9 * max(1.0, abs(obj_after_weights))
            assert obj_w <= obj_after_weights + slack, \
                "precoder sweep increased the surrogate objective"
            assert power_feasible(state, cfg_run.p_rf), \
                "precoder sweep violated a per-RF power cap"
            obj_after_weights = obj_w
        state = _element_step(spec, state, H, T, weights,
                              cfg_run.varpi, record)
        if spec.strict_checks:
            obj_q = objective(state)
            slack = 1e-9 * max(1.0, abs(obj_after_weights))
            assert obj_q <= obj_after_weights + slack, \
                "element step increased the surrogate objective"
        Heff = effective_channels(H, T, state.q)
        rates_nats = per_user_rates_nats(state, Heff, sigma2)
        wsr_bits = float(np.sum(weights * rates_nats)) / LN2
        record.sum_rate_trace.append(wsr_bits)
        record.objective_trace.append(objective(state))
        record.per_user_trace.append(rates_nats / LN2)
        record.iterations = it
        if prev_rate is not None:
            if abs(wsr_bits - prev_rate) <= spec.rate_tol * max(1.0, abs(prev_rate)):
                record.converged = True
                prev_rate = wsr_bits
                break
        prev_rate = wsr_bits

    # final audits: power feasibility and a from-scratch rate recomputation
    if not power_feasible(state, cfg_run.p_rf):
        raise AssertionError("final state violates a per-RF power cap")
    Heff = effective_channels(H, T, state.q)
    rates_nats = per_user_rates_nats(state, Heff, sigma2)
    final_wsr = float(np.sum(weights * rates_nats)) / LN2
    if abs(final_wsr - record.sum_rate_trace[-1]) > 1e-8 * max(1.0, abs(final_wsr)):
        raise AssertionError("recomputed final rate disagrees with the trace")
    record.per_user_bits = rates_nats / LN2
    record.final_sum_rate = final_wsr
    record.q = state.q
    record.wall_time = time.monotonic() - t0
    return record


# -- sweeps -------------------------------------------------------------------

def sweep_power(spec: ExperimentSpec, p_dbm_list: Sequence[float],
                realizations: int = 10) -> List[dict]:
    """Average converged sum rate per total-power level (per-chain caps track
    p_tot/M)."""
    rows = []
    base_seed = spec.scenario.rng_seed
    for p_dbm in p_dbm_list:
        finals = []
        for r in range(realizations):
            cfg = spec.scenario.replace(p_tot=dbm_to_watt(p_dbm), p_rf=None,
                                        rng_seed=base_seed + r)
            rec = run_bcd(replace(spec, scenario=cfg))
            finals.append(rec.final_sum_rate)
        rows.append({"solver": spec.solver, "p_tot_dbm": float(p_dbm),
                     "mean_sum_rate": float(np.mean(finals)),
                     "std_sum_rate": float(np.std(finals)),
                     "n_realizations": realizations})
    return rows


def sweep_antennas(spec: ExperimentSpec, M_list: Sequence[int],
                   realizations: int = 10) -> List[dict]:
    """Average converged sum rate per element count (microstrip count M_y
    fixed, elements-per-strip M_x = M / M_y; per-chain caps track p_tot/M)."""
    rows = []
    base_seed = spec.scenario.rng_seed
    M_y = spec.scenario.M_y
    for M in M_list:
        if M % M_y != 0:
            raise ValueError(f"M={M} not divisible by M_y={M_y}")
        finals, nodes = [], []
        for r in range(realizations):
            cfg = spec.scenario.replace(M_x=M // M_y, p_rf=None,
                                        rng_seed=base_seed + r)
            rec = run_bcd(replace(spec, scenario=cfg))
            finals.append(rec.final_sum_rate)
            nodes.extend(rec.sd_nodes)
        row = {"solver": spec.solver, "M": int(M),
               "mean_sum_rate": float(np.mean(finals)),
               "std_sum_rate": float(np.std(finals)),
               "n_realizations": realizations,
               "mean_sd_nodes": float(np.mean(nodes)) if nodes else ""}
        rows.append(row)
    return rows


def compare_feeding(spec: ExperimentSpec, realizations: int = 10) -> List[dict]:
    """Paired edge-feed vs center-feed runs on identical seeds/channels."""
    rows = []
    base_seed = spec.scenario.rng_seed
    for r in range(realizations):
        seed = base_seed + r
        finals = {}
        for feeding in ("edge", "center"):
            cfg = spec.scenario.replace(feeding=feeding, rng_seed=seed)
            finals[feeding] = run_bcd(replace(spec, scenario=cfg)).final_sum_rate
        rows.append({"solver": spec.solver, "seed": seed,
                     "edge_rate": finals["edge"],
                     "center_rate": finals["center"],
                     "delta": finals["center"] - finals["edge"]})
    return rows


# -- delimited output and manifests -------------------------------------------

def trace_rows(record: RunRecord, cfg: ScenarioConfig) -> List[dict]:
    rows = []
    L, U = cfg.L, cfg.U_per_cell
    for it in range(record.iterations):
        row = {"solver": record.solver, "iteration": it + 1,
               "objective": record.objective_trace[it],
               "sum_rate": record.sum_rate_trace[it]}
        per_user = record.per_user_trace[it]
        for i in range(L):
            for k in range(U):
                row[f"rate_c{i}u{k}"] = float(per_user[i, k])
        rows.append(row)
    return rows


def write_csv(path, rows: List[dict]) -> None:
    if not rows:
        raise ValueError("refusing to write an empty table")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        writer.writerows(rows)


def config_hash(cfg: ScenarioConfig) -> str:
    blob = json.dumps(cfg.to_dict(), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def write_manifest(path, command: str, cfg: ScenarioConfig,
                   outputs: Sequence[str], wall_time: float,
                   extra: Optional[dict] = None) -> None:
    manifest = {
        "command": command,
        "created_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "config": cfg.to_dict(),
        "config_sha256": config_hash(cfg),
        "versions": {"hmimo": _pkg_version, "numpy": np.__version__,
                     "python": platform.python_version()},
        "wall_time_s": wall_time,
        "outputs": [str(o) for o in outputs],
    }
    if extra:
        manifest.update(extra)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def render_figure(kind: str, csv_paths: Sequence[str], out_path,
                  enabled: bool = True) -> Optional[str]:
    """Render a figure next to the delimited output when the figures package
    is installed; otherwise print a notice and carry on."""
    if not enabled:
        return None
    try:
        from hmimo_figures.render import render_figure as _render
    except ImportError:
        print("figure rendering skipped (hmimo-figures not installed)")
        return None
    return str(_render(kind, [str(p) for p in csv_paths], str(out_path)))
