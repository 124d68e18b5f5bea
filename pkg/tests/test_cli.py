"""CLI behaviour: exit codes, artifact layout, overrides, determinism."""

import json
import os
import subprocess
import sys

import pytest

import coevo
from coevo import main, parse_config
from coevo.cli import WORKERS_ENV

SMALL = {
    "eta_grid": [0.2, 0.8],
    "lambda_grid": [0.5],
    "runs_per_cell": 2,
    "master_seed": 3,
    "max_generations": 30,
    "endowment0": 10.0,
}


@pytest.fixture(scope="module", autouse=True)
def _compiled():
    coevo.warmup()


@pytest.fixture()
def config_file(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps(SMALL), encoding="utf-8")
    return str(path)


@pytest.fixture(autouse=True)
def _no_worker_env(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)


def run_main(argv):
    return main(argv)


# ---------------------------------------------------------------- run


def test_run_writes_artifacts(tmp_path, config_file, capsys):
    out = tmp_path / "out"
    code = run_main(["run", "--config", config_file, "--out", str(out)])
    assert code == 0
    assert (out / "config.json").exists()
    assert (out / "trajectory.csv").exists()
    line = capsys.readouterr().out
    assert "halt=" in line and "generations=" in line


def test_run_defaults_without_config(tmp_path, capsys):
    out = tmp_path / "out"
    code = run_main(["run", "--out", str(out), "--max-generations", "20",
                     "--seed", "5"])
    assert code == 0
    echoed = json.loads((out / "config.json").read_text())
    assert echoed["max_generations"] == 20
    assert echoed["seed"] == 5


def test_run_flag_overrides_config(tmp_path, config_file):
    out = tmp_path / "out"
    code = run_main(["run", "--config", config_file, "--out", str(out),
                     "--eta", "0.9"])
    assert code == 0
    echoed = json.loads((out / "config.json").read_text())
    assert echoed["eta"] == 0.9
    assert echoed["max_generations"] == 30  # file value retained


def test_config_echo_reparses_identically(tmp_path, config_file):
    out = tmp_path / "out"
    assert run_main(["run", "--config", config_file, "--out", str(out)]) == 0
    params, sweep = parse_config(config_file)
    params2, sweep2 = parse_config(str(out / "config.json"))
    assert params2 == params
    assert sweep2 == sweep


# -------------------------------------------------------------- sweep


def test_sweep_writes_artifacts(tmp_path, config_file, capsys):
    out = tmp_path / "sweep"
    code = run_main(["sweep", "--config", config_file, "--out", str(out)])
    assert code == 0
    for name in ("config.json", "summary.json", "trajectories.csv"):
        assert (out / name).exists(), name
    doc = json.loads((out / "summary.json").read_text())
    assert len(doc["cells"]) == 2
    assert doc["overall"]["runs"] == 4
    assert "barrier_fraction=" in capsys.readouterr().out


def test_sweep_worker_count_leaves_no_trace(tmp_path, config_file):
    outs = []
    for tag, workers in (("w1", "1"), ("w3", "3")):
        out = tmp_path / tag
        code = run_main(["sweep", "--config", config_file, "--out", str(out),
                         "--workers", workers])
        assert code == 0
        outs.append(out)
    a, b = outs
    for name in ("summary.json", "trajectories.csv", "config.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_sweep_cli_grid_overrides(tmp_path, config_file):
    out = tmp_path / "cell"
    code = run_main(["sweep", "--config", config_file, "--out", str(out),
                     "--eta", "0.4", "--lambda", "0.6", "--runs", "3"])
    assert code == 0
    doc = json.loads((out / "summary.json").read_text())
    assert len(doc["cells"]) == 1
    assert doc["cells"][0]["eta"] == 0.4
    assert doc["cells"][0]["lambda"] == 0.6
    assert doc["cells"][0]["runs"] == 3


def test_workers_env_var_used_when_flag_absent(tmp_path, config_file,
                                               monkeypatch):
    from coevo.cli import _resolve_workers

    monkeypatch.setenv(WORKERS_ENV, "2")
    assert _resolve_workers(None, 1) == 2
    assert _resolve_workers(4, 1) == 4  # explicit flag wins
    out = tmp_path / "env"
    assert run_main(["sweep", "--config", config_file, "--out", str(out)]) == 0
    solo = tmp_path / "solo"
    monkeypatch.delenv(WORKERS_ENV)
    assert run_main(["sweep", "--config", config_file, "--out", str(solo)]) == 0
    assert (out / "summary.json").read_bytes() == \
        (solo / "summary.json").read_bytes()


def test_workers_flag_beats_env_var(tmp_path, config_file, monkeypatch):
    monkeypatch.setenv(WORKERS_ENV, "0")  # invalid, must be ignored
    out = tmp_path / "flag"
    assert run_main(["sweep", "--config", config_file, "--out", str(out),
                     "--workers", "1"]) == 0


def test_workers_env_var_rejected_when_garbage(tmp_path, config_file,
                                               monkeypatch, capsys):
    monkeypatch.setenv(WORKERS_ENV, "many")
    out = tmp_path / "bad"
    assert run_main(["sweep", "--config", config_file, "--out", str(out)]) == 1
    assert WORKERS_ENV in capsys.readouterr().err


# --------------------------------------------------------------- plot


def test_plot_from_sweep_artifacts(tmp_path, config_file, capsys):
    out = tmp_path / "sweep"
    assert run_main(["sweep", "--config", config_file, "--out", str(out)]) == 0
    capsys.readouterr()
    code = run_main(["plot", "--in", str(out)])
    assert code == 0
    assert (out / "heatmap_log2_survival.svg").exists()
    assert (out / "trajectories_c_t.svg").exists()
    assert capsys.readouterr().out.count("wrote ") == 2


def test_plot_metric_and_field_choices(tmp_path, config_file):
    out = tmp_path / "sweep"
    assert run_main(["sweep", "--config", config_file, "--out", str(out)]) == 0
    plots = tmp_path / "figs"
    code = run_main(["plot", "--in", str(out), "--out", str(plots),
                     "--metric", "barrier_fraction", "--field",
                     "effectiveness", "--log-y"])
    assert code == 0
    assert (plots / "heatmap_barrier_fraction.svg").exists()
    assert (plots / "trajectories_effectiveness.svg").exists()


def test_plot_single_run_trajectory(tmp_path, config_file):
    out = tmp_path / "single"
    assert run_main(["run", "--config", config_file, "--out", str(out)]) == 0
    assert run_main(["plot", "--in", str(out)]) == 0
    assert (out / "trajectories_c_t.svg").exists()


def test_plot_empty_dir_fails(tmp_path, capsys):
    empty = tmp_path / "nothing"
    empty.mkdir()
    assert run_main(["plot", "--in", str(empty)]) == 1
    assert "nothing to plot" in capsys.readouterr().err


# ----------------------------------------------------------- bad input


def test_missing_config_file(tmp_path, capsys):
    code = run_main(["run", "--config", str(tmp_path / "absent.json"),
                     "--out", str(tmp_path / "out")])
    assert code == 1
    assert "cannot read config" in capsys.readouterr().err


def test_malformed_json_names_position(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"eta": 0.5,,}', encoding="utf-8")
    assert run_main(["run", "--config", str(path),
                     "--out", str(tmp_path / "out")]) == 1
    err = capsys.readouterr().err
    assert "line 1" in err and "column" in err


def test_unknown_key_named(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"efa": 0.5}), encoding="utf-8")
    assert run_main(["run", "--config", str(path),
                     "--out", str(tmp_path / "out")]) == 1
    assert "efa" in capsys.readouterr().err


def test_wrong_type_names_field(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"eta": "high"}), encoding="utf-8")
    assert run_main(["run", "--config", str(path),
                     "--out", str(tmp_path / "out")]) == 1
    assert "eta" in capsys.readouterr().err


def test_out_of_range_flag_value(tmp_path, capsys):
    assert run_main(["run", "--eta", "1.5",
                     "--out", str(tmp_path / "out")]) == 1
    assert "eta" in capsys.readouterr().err


def test_bad_remove_policy_lists_choices(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"remove_at_min": "explode"}), encoding="utf-8")
    assert run_main(["run", "--config", str(path),
                     "--out", str(tmp_path / "out")]) == 1
    err = capsys.readouterr().err
    assert "resample" in err and "reject" in err


def test_bad_charge_policy_lists_choices(tmp_path, capsys):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"charge": "credit_card"}), encoding="utf-8")
    assert run_main(["run", "--config", str(path),
                     "--out", str(tmp_path / "out")]) == 1
    err = capsys.readouterr().err
    assert "deficit_plus_funding" in err and "deficit" in err


def test_charge_key_accepted(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps(dict(SMALL, charge="deficit")), encoding="utf-8")
    params, _ = parse_config(str(path))
    assert params.charge.value == "deficit"


def test_unknown_flag_exits_one(capsys):
    assert run_main(["run", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err


def test_no_output_on_config_error(tmp_path, capsys):
    out = tmp_path / "never"
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"eta": 7}), encoding="utf-8")
    assert run_main(["run", "--config", str(path), "--out", str(out)]) == 1
    capsys.readouterr()
    assert not out.exists()


# ------------------------------------------------------------ installed


def test_console_script_smoke(tmp_path):
    out = tmp_path / "out"
    proc = subprocess.run(
        [sys.executable, "-m", "coevo.cli", "run", "--max-generations", "10",
         "--out", str(out)],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert "halt=" in proc.stdout
    assert (out / "trajectory.csv").exists()
