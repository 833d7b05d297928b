import csv
import json
from pathlib import Path

import numpy as np
import pytest

from hmimo.cli import main
from hmimo.element_problem import make_random_quadratic, save_text


@pytest.fixture
def tiny_cfg_file(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text("L = 2\nM_y = 4\nM_x = 2\nrng_seed = 7\n")
    return str(path)


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_run_command_outputs(tmp_path, tiny_cfg_file, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--config", tiny_cfg_file, "--solvers",
               "WMMSE-HC,FullyDigital", "--max-iters", "4",
               "--out-dir", str(out), "--no-figures"])
    assert rc == 0
    rows = read_csv(out / "trace.csv")
    assert {r["solver"] for r in rows} == {"WMMSE-HC", "FullyDigital"}
    assert "rate_c1u1" in rows[0]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["command"] == "run"
    assert manifest["config"]["L"] == 2
    captured = capsys.readouterr().out
    assert "sum rate" in captured


def test_sweep_power_command(tmp_path, tiny_cfg_file):
    out = tmp_path / "out"
    rc = main(["sweep-power", "--config", tiny_cfg_file, "--solvers",
               "WMMSE-BiProj", "--p-dbm", "25,35", "--realizations", "2",
               "--max-iters", "3", "--out-dir", str(out), "--no-figures"])
    assert rc == 0
    rows = read_csv(out / "sweep_power.csv")
    assert [float(r["p_tot_dbm"]) for r in rows] == [25.0, 35.0]


def test_sweep_antennas_command(tmp_path, tiny_cfg_file):
    out = tmp_path / "out"
    rc = main(["sweep-antennas", "--config", tiny_cfg_file, "--solvers",
               "WMMSE-HC", "--m-list", "8,16", "--realizations", "2",
               "--max-iters", "3", "--out-dir", str(out), "--no-figures"])
    assert rc == 0
    rows = read_csv(out / "sweep_antennas.csv")
    assert [int(r["M"]) for r in rows] == [8, 16]


def test_snr_scaling_command(tmp_path, capsys):
    out = tmp_path / "out"
    rc = main(["snr-scaling", "--m-list", "16,64", "--out-dir", str(out),
               "--no-figures"])
    assert rc == 0
    rows = read_csv(out / "snr_scaling.csv")
    assert len(rows) == 8
    assert "worst simulated/theory deviation" in capsys.readouterr().out


def test_sd_bench_with_problem_files(tmp_path, monkeypatch):
    rng = np.random.default_rng(0)
    for i in range(2):
        save_text(make_random_quadratic(6, rng), tmp_path / f"inst{i}.txt")
    monkeypatch.chdir(tmp_path)
    rc = main(["sd-bench", "--problems", "inst*.txt", "--variants",
               "plain,accelerated", "--out-dir", "out", "--no-figures"])
    assert rc == 0
    rows = read_csv(Path("out") / "sd_bench.csv")
    assert len(rows) == 4                   # 2 files x 2 variants
    by_inst = {}
    for r in rows:
        by_inst.setdefault(r["instance"], []).append(float(r["objective"]))
    for vals in by_inst.values():
        assert vals[0] == pytest.approx(vals[1])


def test_sd_bench_random_instances(tmp_path):
    out = tmp_path / "out"
    rc = main(["sd-bench", "--random", "2", "--m-list", "5", "--variants",
               "accelerated", "--out-dir", str(out), "--no-figures"])
    assert rc == 0
    rows = read_csv(out / "sd_bench.csv")
    assert len(rows) == 2
    assert all(int(r["M"]) == 5 for r in rows)


def test_compare_feeding_command(tmp_path, tiny_cfg_file, capsys):
    out = tmp_path / "out"
    rc = main(["compare-feeding", "--config", tiny_cfg_file, "--solver",
               "WMMSE-HC", "--realizations", "2", "--max-iters", "3",
               "--out-dir", str(out), "--no-figures"])
    assert rc == 0
    rows = read_csv(out / "feeding.csv")
    assert len(rows) == 2
    assert "center minus edge" in capsys.readouterr().out


def test_figure_request_degrades_without_figures_package(
        tmp_path, tiny_cfg_file, capsys):
    out = tmp_path / "out"
    rc = main(["run", "--config", tiny_cfg_file, "--solvers", "WMMSE-HC",
               "--max-iters", "2", "--out-dir", str(out), "--figures"])
    assert rc == 0
    assert (out / "trace.csv").exists()
    captured = capsys.readouterr().out
    has_figures = True
    try:
        import hmimo_figures  # noqa: F401
    except ImportError:
        has_figures = False
    if not has_figures:
        assert "figure rendering skipped" in captured
    else:
        assert (out / "convergence.png").exists()


def test_unknown_solver_rejected(tmp_path, tiny_cfg_file):
    with pytest.raises(SystemExit):
        main(["run", "--config", tiny_cfg_file, "--solvers", "Adam",
              "--out-dir", str(tmp_path / "out"), "--no-figures"])
