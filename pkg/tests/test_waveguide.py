import numpy as np
import pytest

from hmimo.config import ScenarioConfig
from hmimo.waveguide import (build_all_waveguides, build_waveguide,
                             feed_distances, los_steering,
                             microstrip_coefficients,
                             uniform_propagation_matrix)


def test_edge_feed_distances_are_multiples_of_spacing():
    delta = 0.25
    rho = feed_distances(5, delta, "edge")
    assert np.allclose(rho, delta * np.arange(1, 6))


def test_index_from_zero_starts_at_the_feed():
    rho = feed_distances(4, 0.5, "edge", index_from_zero=True)
    assert np.allclose(rho, 0.5 * np.arange(4))


def test_center_feed_distances_symmetric():
    delta = 0.3
    rho = feed_distances(6, delta, "center")
    assert np.allclose(rho, rho[::-1])
    assert rho.max() == pytest.approx(delta * 2.5)
    # odd count puts one element right at the feed point
    rho_odd = feed_distances(5, delta, "center")
    assert rho_odd.min() == pytest.approx(0.0)


def test_coefficient_formula_direct_transcription():
    delta, alpha, beta = 0.004, 0.6, 827.68
    t = microstrip_coefficients(8, delta, alpha, beta)
    for m in range(1, 9):
        rho = m * delta
        expected = np.exp(-rho * (alpha + 1j * beta))
        assert t[m - 1] == pytest.approx(expected, rel=1e-12)


def test_attenuation_decays_along_edge_fed_strip():
    t = microstrip_coefficients(10, 0.01, 0.6, 100.0)
    mags = np.abs(t)
    assert np.all(np.diff(mags) < 0)


def test_center_feed_magnitudes_symmetric():
    t = microstrip_coefficients(8, 0.01, 0.6, 50.0, feeding="center")
    assert np.allclose(np.abs(t), np.abs(t)[::-1])


def test_propagation_matrix_block_structure():
    cfg = ScenarioConfig(L=1, M_y=3, M_x=4, U_per_cell=1, d=2, N=2)
    model = build_waveguide(cfg, 0)
    T = model.matrix
    assert T.shape == (12, 3)
    for chain in range(3):
        col = T[:, chain]
        live = np.nonzero(col)[0]
        assert np.array_equal(live, np.arange(chain * 4, chain * 4 + 4))
        assert np.allclose(col[live], model.coeffs[chain])
    # each element is driven by exactly one microstrip
    assert np.all(np.count_nonzero(T, axis=1) == 1)


def test_all_waveguides_identical_across_cells():
    cfg = ScenarioConfig(L=3)
    T = build_all_waveguides(cfg)
    assert T.shape == (3, 32, 4)
    assert np.array_equal(T[0], T[1]) and np.array_equal(T[1], T[2])


def test_uniform_matrix_is_unit_gain_pattern():
    cfg = ScenarioConfig(L=1, M_y=2, M_x=3, U_per_cell=1, d=2, N=2)
    T = uniform_propagation_matrix(cfg)
    assert T.shape == (6, 2)
    assert np.all((T == 0) | (T == 1))
    assert np.count_nonzero(T) == 6


def test_los_steering_unit_modulus_and_phase():
    wavelength = 0.0107
    delta = wavelength / 8
    angle = 0.3
    a = los_steering(6, delta, wavelength, angle)
    assert np.allclose(np.abs(a), 1.0)
    step = 2 * np.pi * delta * np.sin(angle) / wavelength
    phases = np.unwrap(np.angle(a))
    assert np.allclose(np.diff(phases), step)
    assert a[0] == pytest.approx(1.0 + 0j)
