import itertools

import numpy as np
import pytest

from hmimo.channels import generate_channels
from hmimo.config import ScenarioConfig
from hmimo.constraints import BinaryConstraint, LorentzianConstraint, contains
from hmimo.element_problem import (assemble_element_problem, binary_objective,
                                   binary_objective_batch, levels_from_signs,
                                   load_text, make_random_quadratic,
                                   projection_baseline, quadratic_objective,
                                   save_text, signs_from_levels,
                                   to_real_binary, unconstrained_optimum)
from hmimo.waveguide import build_all_waveguides
from hmimo.wmmse import (effective_channels, init_state, update_decoders,
                         update_weights, wmmse_objective)

import oracles


def prepared(seed=0):
    cfg = ScenarioConfig(L=2, M_y=4, M_x=2, rng_seed=seed, sigma2=0.05,
                         pathloss_ref_db=0.0, pathloss_exp=0.0)
    H = generate_channels(cfg).H
    T = build_all_waveguides(cfg)
    rng = np.random.default_rng(seed + 30)
    state = init_state(cfg, rng, BinaryConstraint(cfg.varpi))
    Heff = effective_channels(H, T, state.q)
    state = update_decoders(state, Heff, cfg.sigma2)
    state = update_weights(state, Heff, cfg.sigma2)
    return cfg, H, T, state


def full_objective_of_q(state, H, T, cfg, cell, q_cell):
    q_mod = state.q.copy()
    q_mod[cell] = q_cell
    mod = state.replace(q=q_mod)
    Heff = effective_channels(H, T, mod.q)
    return wmmse_objective(mod, Heff, cfg.sigma2, cfg.user_weights())


def test_assembled_quadratic_reproduces_objective_differences():
    # the surrogate restricted to one cell's responses must equal
    # q^H A_o q - 2Re{b_o q} + const
    cfg, H, T, state = prepared(seed=1)
    rng = np.random.default_rng(5)
    for cell in range(cfg.L):
        problem = assemble_element_problem(state, H, T, cfg.user_weights(),
                                           cell)
        residuals = []
        for _ in range(6):
            q = rng.standard_normal(cfg.M) + 1j * rng.standard_normal(cfg.M)
            quad = quadratic_objective(problem, q)
            residuals.append(
                full_objective_of_q(state, H, T, cfg, cell, q) - quad)
        residuals = np.array(residuals)
        spread = np.max(np.abs(residuals - residuals[0]))
        assert spread < 1e-8 * max(1.0, np.max(np.abs(residuals)))


def test_assembled_matrix_hermitian_psd():
    cfg, H, T, state = prepared(seed=2)
    problem = assemble_element_problem(state, H, T, cfg.user_weights(), 0)
    A = problem.A_o
    assert np.allclose(A, A.conj().T)
    assert np.linalg.eigvalsh(A).min() > -1e-9


def test_real_reduction_matches_complex_objective():
    # on the binary set, F(s) and the complex quadratic agree up to one
    # constant; exhaustive over all sign patterns
    cfg, H, T, state = prepared(seed=3)
    problem = assemble_element_problem(state, H, T, cfg.user_weights(), 1)
    qf = to_real_binary(problem, cfg.varpi)
    assert qf.M == cfg.M
    offsets = []
    for bits in itertools.product((-1.0, 1.0), repeat=cfg.M):
        s = np.array(bits)
        q = levels_from_signs(s, cfg.varpi)
        offsets.append(binary_objective(qf, s)
                       - quadratic_objective(problem, q))
    offsets = np.array(offsets)
    assert np.max(np.abs(offsets - offsets[0])) < 1e-9 * max(
        1.0, np.max(np.abs(offsets)))


def test_reduction_matrix_symmetric_real():
    rng = np.random.default_rng(0)
    qf = make_random_quadratic(6, rng)
    assert qf.A.dtype.kind == "f"
    assert np.allclose(qf.A, qf.A.T)
    assert qf.b.dtype.kind == "f"


def test_sign_level_round_trip():
    varpi = 0.8
    s = np.array([1.0, -1.0, 1.0, -1.0])
    q = levels_from_signs(s, varpi)
    assert set(np.unique(q.real)) == {0.0, varpi}
    assert np.array_equal(signs_from_levels(q, varpi), s)


def test_batch_objective_matches_scalar():
    rng = np.random.default_rng(1)
    qf = make_random_quadratic(8, rng)
    S = rng.choice([-1.0, 1.0], size=(32, 8))
    vals = binary_objective_batch(qf, S)
    for row, val in zip(S, vals):
        assert val == pytest.approx(binary_objective(qf, row), rel=1e-12)


def test_unconstrained_optimum_is_stationary():
    cfg, H, T, state = prepared(seed=4)
    problem = assemble_element_problem(state, H, T, cfg.user_weights(), 0)
    q_star, flagged = unconstrained_optimum(problem)
    # gradient of q^H A q - 2Re{b q} is 2(A q - conj(b)); near zero at the top
    grad = 2.0 * (problem.A_o @ q_star - np.conj(problem.b_o))
    assert np.linalg.norm(grad) < 1e-6 * max(1.0, np.linalg.norm(problem.b_o))
    base = quadratic_objective(problem, q_star)
    rng = np.random.default_rng(2)
    for _ in range(10):
        bump = (rng.standard_normal(cfg.M)
                + 1j * rng.standard_normal(cfg.M)) * 0.1
        assert quadratic_objective(problem, q_star + bump) >= base - 1e-9


def test_projection_baseline_lands_in_constraint_set():
    cfg, H, T, state = prepared(seed=5)
    problem = assemble_element_problem(state, H, T, cfg.user_weights(), 0)
    for c in (BinaryConstraint(cfg.varpi), LorentzianConstraint()):
        q = projection_baseline(problem, c)
        assert contains(q, c)


def test_save_load_round_trip_exact(tmp_path):
    rng = np.random.default_rng(3)
    qf = make_random_quadratic(7, rng, varpi=0.8)
    path = tmp_path / "instance.txt"
    save_text(qf, path)
    back = load_text(path)
    assert np.array_equal(back.A, qf.A)
    assert np.array_equal(back.b, qf.b)
    assert back.varpi == qf.varpi


def test_brute_force_oracles_agree():
    # the vectorized enumeration and the loop enumeration are the same oracle
    rng = np.random.default_rng(4)
    qf = make_random_quadratic(6, rng)
    _, val = oracles.brute_force_binary_min(qf)
    vals = oracles.brute_force_binary_values(qf)
    assert val == pytest.approx(vals.min(), rel=1e-12)
    signs = np.array(list(itertools.product((-1.0, 1.0), repeat=6)))
    assert np.allclose(binary_objective_batch(qf, signs), vals)
