import json

import numpy as np
import pytest

from qpebench.cli import main
from qpebench.experiment import (
    RECORD_COLUMNS,
    ConfigError,
    ExperimentConfig,
    check_summary,
    load_config,
    quadratic_fit,
    read_csv,
    run_experiment,
    summarize,
    write_outputs,
)
from qpebench.hamiltonian import random_pauli_sum

SMALL_TOML = """
hamiltonian = { preset = "h2" }
k = [3, 5]
shots = 50
seeds = [0, 1]
noise = { p2 = 1e-3 }
[scales]
global = [0, 1, 10]
"""


def test_toml_and_json_configs_agree(tmp_path):
    (tmp_path / "a.toml").write_text(SMALL_TOML)
    data = {
        "hamiltonian": {"preset": "h2"},
        "k": [3, 5],
        "shots": 50,
        "seeds": [0, 1],
        "noise": {"p2": 1e-3},
        "scales": {"global": [0, 1, 10]},
    }
    (tmp_path / "a.json").write_text(json.dumps(data))
    a, b = load_config(tmp_path / "a.toml"), load_config(tmp_path / "a.json")
    assert a.config_hash() == b.config_hash()
    assert a.scales_global == (0.0, 1.0, 10.0)


@pytest.mark.parametrize(
    "bad",
    [{"k": []}, {"k": [0]}, {"shots": 0}, {"t": -1}, {"bogus": 1}, {"noise": {"p5": 0.1}}, {"scales": {"global": [-1]}}],
)
def test_config_validation(bad):
    with pytest.raises((ConfigError, ValueError)):
        ExperimentConfig.from_mapping(bad)


def test_hash_ignores_output_location():
    a = ExperimentConfig(output_dir="x", workers=1)
    b = ExperimentConfig(output_dir="y", workers=4)
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != ExperimentConfig(shots=10).config_hash()


def test_sweep_is_byte_reproducible(tmp_path):
    cfg = ExperimentConfig.from_mapping({"k": [3, 4], "seeds": [0, 1], "noise": {}, "scales": {"global": [0, 1]}})
    one = write_outputs(cfg, *run_experiment(cfg), tmp_path / "one")
    cfg4 = ExperimentConfig.from_mapping({**cfg.to_mapping(), "workers": 2})
    two = write_outputs(cfg4, *run_experiment(cfg4), tmp_path / "two")
    for name in ("records.csv", "resources.csv"):
        assert (one / name).read_bytes() == (two / name).read_bytes()
    rows = read_csv(one / "records.csv")
    assert list(rows[0]) == list(RECORD_COLUMNS)
    assert len(rows) == 2 * 2 * 2
    assert {r["status"] for r in rows} == {"ok"}


def test_failed_point_is_recorded_not_raised():
    cfg = ExperimentConfig.from_mapping({"k": [3, 26], "shots": 5})
    records, resources = run_experiment(cfg)
    assert len(resources) == 2
    status = {int(r["k"]): r["status"] for r in records}
    assert status[3] == "ok"
    assert status[26].startswith("error: SimulationError")
    assert summarize(records, resources)["errors"] == 1


def test_quadratic_fit_recovers_polynomial():
    ks = np.arange(5, 60, 5)
    fit = quadratic_fit(ks, 3 + 2 * ks + 0.5 * ks**2)
    assert fit["c"] == pytest.approx(0.5) and fit["b"] == pytest.approx(2) and fit["r2"] == pytest.approx(1)
    assert fit["r2_linear"] < 1


def test_summary_checks_on_synthetic_rows():
    base = {"n_trotter": 1, "p2_scale": 1.0, "mem_scale": 1.0, "status": "ok", "error": 0.0, "error_fci": 0.0}
    zero = {"eff_p1": 0, "eff_p2": 0, "eff_p_meas": 0, "eff_p_mem": 0}
    some = {"eff_p1": 1e-4, "eff_p2": 1e-3, "eff_p_meas": 1e-3, "eff_p_mem": 1e-4}
    records = [
        {**base, **zero, "k": 4, "noise_scale": 0.0, "p_max": 0.9, "p_top3": 1.0, "within_bound": 1},
        {**base, **some, "k": 4, "noise_scale": 1.0, "p_max": 0.95, "p_top3": 1.0, "within_bound": 1},
    ]
    checks = {name: ok for name, ok, _ in check_summary(summarize(records, []))}
    assert checks["noiseless precision bound"]
    assert not checks["P_max non-increasing in noise scale"]


# ------------------------------------------------------------ command line


def test_cli_build_and_run(tmp_path, capsys):
    circ = tmp_path / "c.json"
    assert main(["build", "--k", "4", "-o", str(circ)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["two_qubit_gates"] > 0
    out = tmp_path / "r.json"
    assert main(["run", "--k", "4", "--circuit", str(circ), "--noiseless", "--shots", "64", "-o", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["counts"]["shots"] == 64
    assert abs(result["estimate"]["energy"] - result["e_ref_trotter"]) <= result["estimate"]["bound"]


def test_cli_run_with_noise_and_custom_hamiltonian(tmp_path, capsys):
    h = tmp_path / "h.json"
    h.write_text(random_pauli_sum(2, np.random.default_rng(0)).to_json())
    assert main(["run", "--hamiltonian", str(h), "--k", "3", "--shots", "20", "--scale", "2"]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["counts"]["noise"]["scale_global"] == 2.0


def test_cli_sweep_and_report(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text(SMALL_TOML)
    out = tmp_path / "out"
    assert main(["sweep", str(cfg), "-o", str(out)]) == 0
    assert "12 records" in capsys.readouterr().out
    assert main(["report", str(out), "--check"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert len(summary["points"]) == 2 * 3


def test_cli_report_check_fails_on_errors(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text("k = [26]\nshots = 5\n")
    out = tmp_path / "out"
    assert main(["sweep", str(cfg), "-o", str(out)]) == 0
    assert main(["report", str(out), "--check"]) == 1
    assert "FAIL no failed points" in capsys.readouterr().err


def test_cli_reports_bad_input(tmp_path, capsys):
    assert main(["sweep", str(tmp_path / "missing.toml")]) == 2
    bad = tmp_path / "bad.toml"
    bad.write_text("k = [3]\nfoo = 1\n")
    assert main(["sweep", str(bad)]) == 2
    assert "error:" in capsys.readouterr().err
