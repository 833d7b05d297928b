"""Waveguide-fed holographic MIMO downlink: weighted-sum-rate maximization
with per-RF-chain power caps and hardware-constrained element responses."""

__version__ = "0.1.0"

from .config import ScenarioConfig, dbm_to_watt, watt_to_dbm
from .constraints import (BinaryConstraint, LorentzianConstraint,
                          project_element)
from .waveguide import (WaveguideModel, build_waveguide, build_all_waveguides,
                        feed_distances, microstrip_coefficients)
from .channels import ChannelSet, generate_channels
from .wmmse import (BeamformerState, RateReport, effective_channels,
                    init_state, per_user_rates_nats, update_decoders,
                    update_weights, weighted_sum_rate_nats, wmmse_objective)
from .precoding import update_precoders
from .element_problem import (ElementDesignProblem, QuadraticForm,
                              assemble_element_problem, make_random_quadratic,
                              projection_baseline, to_real_binary)
from .hidden_convexity import HcResult, hc_solve, solve_sphere_quadratic
from .sphere_decoder import (SdResult, TimeBudgetExceeded, VARIANTS,
                             build_sd_problem, solve_binary_exact)
from .lorentzian_mm import MmResult, mm_solve, mm_solve_unit_modulus
from .miso import ARCHITECTURES, MisoConfig, snr_closed_form, snr_sweep
from .harness import (ExperimentSpec, RunRecord, SOLVERS, compare_feeding,
                      run_bcd, sweep_antennas, sweep_power)

__all__ = [
    "ScenarioConfig", "dbm_to_watt", "watt_to_dbm",
    "BinaryConstraint", "LorentzianConstraint", "project_element",
    "WaveguideModel", "build_waveguide", "build_all_waveguides",
    "feed_distances", "microstrip_coefficients",
    "ChannelSet", "generate_channels",
    "BeamformerState", "RateReport", "effective_channels", "init_state",
    "per_user_rates_nats", "update_decoders", "update_weights",
    "weighted_sum_rate_nats", "wmmse_objective", "update_precoders",
    "ElementDesignProblem", "QuadraticForm", "assemble_element_problem",
    "make_random_quadratic", "projection_baseline", "to_real_binary",
    "HcResult", "hc_solve", "solve_sphere_quadratic",
    "SdResult", "TimeBudgetExceeded", "VARIANTS", "build_sd_problem",
    "solve_binary_exact",
    "MmResult", "mm_solve", "mm_solve_unit_modulus",
    "ARCHITECTURES", "MisoConfig", "snr_closed_form", "snr_sweep",
    "ExperimentSpec", "RunRecord", "SOLVERS", "compare_feeding", "run_bcd",
    "sweep_antennas", "sweep_power",
]
