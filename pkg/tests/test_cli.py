import json
import subprocess
import sys

import pytest

from estimandsim import cli
from estimandsim.cli import format_table, main, parse_table
from estimandsim.errors import EmptyArm


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_simulate_json_byte_identical(capsys):
    args = ("simulate", "--preset", "scenario1-calibrated", "--reps", "30", "--format", "json")
    code1, out1, _ = run(capsys, *args)
    code2, out2, _ = run(capsys, *args)
    assert code1 == code2 == 0
    assert out1 == out2
    assert json.loads(out1)["summary"]["n_reps"] == 30


def test_simulate_out_dir(tmp_path, capsys):
    code, _, _ = run(capsys, "simulate", "--preset", "no-defect", "--reps", "20", "--seed", "99",
                     "--out", str(tmp_path), "--format", "csv")
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["seed"] == 99
    assert "timestamp" in manifest
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["config"]["seed"] == 99
    assert (tmp_path / "reps.csv").read_text().count("\n") == 21


def test_table_and_json_agree(capsys):
    base = ("simulate", "--preset", "scenario2-calibrated", "--reps", "25")
    _, table, _ = run(capsys, *base)
    _, js, _ = run(capsys, *base, "--format", "json")
    rows = parse_table(table)
    s = json.loads(js)["summary"]
    for name, err in (("mean_rd", "mcse_rd"), ("rejection_fraction", "mcse_rej"), ("mean_excess", "mcse_excess")):
        assert rows[name][0] == pytest.approx(s[name], abs=1e-12)
        assert rows[name][1] == pytest.approx(s[err], abs=1e-12)


def test_format_table_round_trip():
    rows = [("a", 0.1 + 0.2, 1e-17), ("bb", -3.0, None)]
    assert parse_table(format_table("t", rows)) == {"a": (0.1 + 0.2, 1e-17), "bb": (-3.0, None)}


def test_oracle_independence(capsys):
    code, out, _ = run(capsys, "oracle", "--preset", "scenario1-independence")
    assert code == 0
    doc = json.loads(out)["oracle"]
    assert doc["true_rd"] == pytest.approx(-0.09, abs=1e-12)
    assert doc["expected_excess"] == pytest.approx(45.0, abs=1e-9)


def test_oracle_table(capsys):
    code, out, _ = run(capsys, "oracle", "--preset", "scenario1-calibrated", "--format", "table")
    assert code == 0
    assert parse_table(out)["true_rd"][0] == pytest.approx(-0.1, abs=1e-12)


@pytest.mark.parametrize("name, code", [
    ("table1-row1.json", 3), ("table1-row2.json", 3), ("table1-row3.json", 3), ("table1-row4.json", 3),
    ("rescue-medication.json", 0), ("hypothetical-row1.json", 0),
])
def test_check_exit_codes(capsys, fixtures_dir, name, code):
    got, out, _ = run(capsys, "check", "--estimand", str(fixtures_dir / name))
    assert got == code
    assert "outcome definitions by arm" in out


def test_check_json(capsys, fixtures_dir):
    code, out, _ = run(capsys, "check", "--estimand", str(fixtures_dir / "table1-row1.json"), "--format", "json")
    assert code == 3
    assert json.loads(out)["offending"][0]["category"] == "disc-6-12"


def test_config_errors_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": 1000, "p_ya_control": 0.4, "p_ya_treat": 0.4, "p_disc_first": 0.15,
                               "p_disc_second": 0.15, "alpha": 1.5}))
    code, _, err = run(capsys, "oracle", "--config", str(bad))
    assert code == 1 and "alpha" in err
    bad.write_text('{"n": 1000} x')
    code, _, err = run(capsys, "oracle", "--config", str(bad))
    assert code == 1 and "1:13" in err
    assert run(capsys, "oracle", "--config", str(tmp_path / "missing.json"))[0] == 1
    assert run(capsys, "simulate", "--preset", "nope")[0] == 1
    assert run(capsys, "simulate")[0] == 1
    assert run(capsys, "simulate", "--preset", "no-defect", "--seed", "-4")[0] == 1


def test_infeasible_config_exit_1(tmp_path, capsys):
    cfg = tmp_path / "infeasible.json"
    cfg.write_text(json.dumps({"n": 100, "p_ya_control": 0.05, "p_ya_treat": 0.05, "p_disc_first": 0.1,
                               "p_disc_second": 0.5, "q612": 0.9, "n_reps": 4}))
    assert run(capsys, "simulate", "--config", str(cfg), "--workers", "1")[0] == 1


def test_runtime_error_exit_2(monkeypatch, capsys):
    def boom(*args, **kwargs):
        raise EmptyArm("no patients")

    monkeypatch.setattr(cli, "run_simulation", boom)
    code, _, err = run(capsys, "simulate", "--preset", "no-defect", "--reps", "2")
    assert code == 2 and "no patients" in err


def test_decompose(capsys):
    code, out, _ = run(capsys, "decompose", "--preset", "scenario1-calibrated", "--cohort-size", "20000", "--seed", "3")
    assert code == 0
    doc = json.loads(out)
    assert {"preset", "cohort_size", "seed", "d_a", "d_b06", "m_b612", "implied_rd_gap"} <= set(doc)
    assert doc["seed"] == 3 and doc["cohort_size"] == 20000


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "estimandsim.cli", "oracle", "--preset", "no-defect"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["oracle"]["true_rd"] == 0.0
