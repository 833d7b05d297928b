import math

import numpy as np
import pytest

from hmimo.config import ScenarioConfig, dbm_to_watt, watt_to_dbm


def test_dbm_round_trip():
    for p in (1e-6, 1.0, 37.5):
        assert watt_to_dbm(dbm_to_watt(watt_to_dbm(p))) == pytest.approx(
            watt_to_dbm(p))
    assert dbm_to_watt(30.0) == pytest.approx(1.0)
    assert dbm_to_watt(0.0) == pytest.approx(1e-3)


def test_default_scenario_values():
    cfg = ScenarioConfig()
    assert cfg.L == 3 and cfg.U_per_cell == 2 and cfg.N == 2 and cfg.d == 2
    assert cfg.M_y == 4 and cfg.M_x == 8 and cfg.M == 32
    assert cfg.p_tot == pytest.approx(1.0)          # 30 dBm
    assert cfg.p_rf == pytest.approx(cfg.p_tot / cfg.M)
    assert cfg.sigma2 == pytest.approx(dbm_to_watt(-104.0))
    assert cfg.f == pytest.approx(28e9)
    assert cfg.alpha == pytest.approx(0.6)
    assert cfg.beta == pytest.approx(29.56 * 28.0)
    lam = cfg.wavelength
    assert lam == pytest.approx(299792458.0 / 28e9)
    assert cfg.delta_x == pytest.approx(lam / 8)
    assert cfg.delta_y == pytest.approx(lam / 2)
    assert cfg.varpi == pytest.approx(0.8)
    assert cfg.inter_cell_distance == pytest.approx(400.0)
    assert cfg.feeding == "edge"
    assert cfg.n_users == 6


def test_weights_default_to_one():
    cfg = ScenarioConfig(L=2, U_per_cell=3, M_y=6)
    w = cfg.user_weights()
    assert w.shape == (2, 3)
    assert np.all(w == 1.0)


def test_explicit_weights_round_trip():
    cfg = ScenarioConfig(L=2, U_per_cell=2, weights=(1.0, 2.0, 0.5, 3.0))
    w = cfg.user_weights()
    assert w.shape == (2, 2)
    assert w[1, 1] == 3.0


def test_replace_keeps_frozen_original():
    cfg = ScenarioConfig()
    cfg2 = cfg.replace(p_tot=2.0, p_rf=None)
    assert cfg.p_tot == pytest.approx(1.0)
    assert cfg2.p_rf == pytest.approx(2.0 / cfg2.M)
    with pytest.raises(Exception):
        cfg.p_tot = 5.0


def test_replace_carries_materialized_p_rf_unless_reset():
    cfg = ScenarioConfig()
    bumped = cfg.replace(M_x=16)
    # cap was materialized from the old element count and travels along
    assert bumped.p_rf == pytest.approx(cfg.p_tot / 32)
    fresh = cfg.replace(M_x=16, p_rf=None)
    assert fresh.p_rf == pytest.approx(cfg.p_tot / 64)


def test_validation_rejects_bad_shapes():
    with pytest.raises(ValueError):
        ScenarioConfig(L=0)
    with pytest.raises(ValueError):
        ScenarioConfig(M_y=2, U_per_cell=2, d=2)   # fewer chains than streams
    with pytest.raises(ValueError):
        ScenarioConfig(feeding="sideways")
    with pytest.raises(ValueError):
        ScenarioConfig(varpi=0.0)


def test_file_round_trip(tmp_path):
    cfg = ScenarioConfig(L=2, M_x=4, rng_seed=11, feeding="center")
    path = tmp_path / "scenario.cfg"
    cfg.to_file(path)
    back = ScenarioConfig.from_file(path)
    assert back.to_dict() == cfg.to_dict()


def test_file_parser_ignores_comments(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("# comment line\nL = 2\n\nM_x = 4  # trailing\n")
    cfg = ScenarioConfig.from_file(path)
    assert cfg.L == 2 and cfg.M_x == 4


def test_cell_radius_is_half_spacing():
    cfg = ScenarioConfig(inter_cell_distance=400.0)
    assert cfg.cell_radius == pytest.approx(200.0)
