import csv
import json
import subprocess
import sys

import pytest

from commsle.cli import ConfigError, build_config, read_config_file, run


def test_classify_rho(capsys):
    assert run(["classify-rho"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("PASS classification")
    assert out.count("kappat=") == 3


def test_pde_rank_prints_catalan(capsys):
    assert run(["pde-rank", "--n", "3"]) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1] == "5"


@pytest.mark.parametrize("sub", ["verify-commutation", "check-h", "check-elementary", "cocycle-check"])
def test_exact_subcommands_pass(sub):
    assert run([sub]) == 0


def test_usage_errors_exit_2(tmp_path, capsys):
    assert run(["classify-rho", "--bogus"]) == 2
    assert run(["no-such-command"]) == 2
    assert run(["simulate", "--samples", "0"]) == 2
    assert run(["simulate", "--dt", "-1"]) == 2
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("kappa = 2\nwhatever = 3\n")
    assert run(["simulate", "--config", str(cfg)]) == 2
    assert "unknown configuration key" in capsys.readouterr().err
    assert run(["simulate", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_failed_check_exits_1():
    assert run(["cocycle-check", "--tolerance", "1e-30"]) == 1


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# a manifest\nkappa = 2.5\nsamples = 40  # inline\n\nt-end = 0.1\nrho = 2, -1\n")
    values = read_config_file(cfg)
    assert values == {"kappa": "2.5", "samples": "40", "t_end": "0.1", "rho": "2, -1"}
    c = build_config("simulate", values, {"samples": 7, "seed": None})
    assert c.kappa == 2.5 and c.samples == 7 and c.seed == 1 and c.rho == [2.0, -1.0]
    with pytest.raises(ConfigError):
        build_config("simulate", {"format": "xml"}, {})
    with pytest.raises(ConfigError):
        build_config("simulate", {"kappa": "0"}, {})
    bad = tmp_path / "nokey.cfg"
    bad.write_text("kappa 2\n")
    with pytest.raises(ConfigError):
        read_config_file(bad)


def _strip_wall_time(text):
    d = json.loads(text)
    d.pop("wall_time", None)
    return d


def test_same_config_gives_identical_json(tmp_path):
    cfg = tmp_path / "mc.cfg"
    cfg.write_text("samples = 150\nseed = 9\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        assert run(["mc-restriction", "--config", str(cfg), "--out", str(out)]) in (0, 1)
        outs.append(out.read_text())
    a, b = _strip_wall_time(outs[0]), _strip_wall_time(outs[1])
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert {"name", "estimate", "stderr", "reference", "reference_source", "tolerance", "verdict",
            "n_samples", "excluded_runs", "seed"} <= set(a)


def test_simulate_csv(tmp_path):
    out = tmp_path / "paths.csv"
    assert run(["simulate", "--samples", "25", "--rho", "2", "--points", "1", "--t-end", "0.05",
                "--format", "csv", "--out", str(out)]) == 0
    rows = list(csv.reader(out.open()))
    assert rows[0] == ["W", "z0"] and len(rows) == 26
    assert all(float(w) < float(z) for w, z in rows[1:])
    # csv needs a sample dump
    assert run(["classify-rho", "--format", "csv"]) == 2


def test_tolerance_override(tmp_path):
    out = tmp_path / "r.json"
    assert run(["mc-restriction", "--samples", "100", "--tolerance", "1", "--out", str(out)]) == 0
    assert json.loads(out.read_text())["tolerance"] == 1


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "commsle.cli", "pde-rank", "--n", "2"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip().endswith("2")
