"""Command-line interface: exit codes, JSON shape, determinism."""

import json
import subprocess
import sys

import pytest

from algpot.cli import main

RUN = [sys.executable, "-m", "algpot.cli"]


def run_cli(args, **kw):
    return subprocess.run(RUN + list(args), capture_output=True, text=True,
                          **kw)


def test_check_table_exact_match(capsys):
    code = main(["check-table", "--k", "3", "--lambda", "1"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["mode"] == "exact"
    assert out["matched"] is True
    assert out["obstruction_if_hypotheses_hold"] is False
    assert any(w["row"] == "family A" for w in out["witnesses"])


def test_check_table_negative_lambda(capsys):
    # the equals form keeps argparse from eating the leading minus sign
    code = main(["check-table", "--k=-1", "--lambda=-1/2"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["matched"] is False
    assert out["obstruction_if_hypotheses_hold"] is True


def test_check_table_numeric_mode(capsys):
    code = main(["check-table", "--k", "3", "--lambda", "0.123456789",
                 "--numeric"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["mode"] == "numeric"
    assert out["matched"] is False
    assert "not a certificate" in out["note"]


def test_check_table_rejects_k_zero(capsys):
    code = main(["check-table", "--k", "0", "--lambda", "1"])
    assert code == 2


def test_ve_reports_exact_fractions(capsys):
    code = main(["ve", "--k", "3", "--lambda", "1"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["coefficients"] == {"a1": "7/6", "a0": "-2/3", "b0": "-1/6"}
    assert out["exponents"]["0"] == ["0", "1/3"]
    assert out["exponents"]["1"] == ["0", "1/2"]
    assert out["fuchs_residual"] == "0"
    assert "monodromy" not in out


def test_ve_monodromy_flag(capsys):
    code = main(["ve", "--k", "3", "--lambda", "1", "--monodromy"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    mono = out["monodromy"]
    assert mono["product_error"] <= 1e-6
    for name in ("0", "1", "inf"):
        assert mono["eigen_errors"][name] <= 1e-6


def test_simulate_cone(cone_file, capsys):
    code = main(["simulate", str(cone_file), "--q0", "0.6,0.8",
                 "--p0", "0.1,-0.2", "--w0", "1.0",
                 "--t0", "0", "--t1", "1", "--samples", "9"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["terminated"] == "completed"
    assert out["energy_drift"] <= 1e-9
    assert len(out["samples"]) == 9


def test_nbody_emit_round_trip(capsys, tmp_path):
    code = main(["nbody", "--n", "3", "--dim", "2"])
    text = capsys.readouterr().out
    assert code == 0
    path = tmp_path / "generated.prob"
    path.write_text(text)
    code = main(["darboux", str(path), "--n-random", "4"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["label"] == str(path)
    assert "accepted" in out and "rejected" in out


def test_analyze_cone_exit_zero(cone_file, capsys):
    code = main(["analyze", str(cone_file), "--n-random", "12"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert out["certificate"]["status"] == "no_obstruction"
    assert out["exit_code"] == 0
    assert out["homogeneity"]["degree"] == "3"


def test_nbody_analyze_exit_ten(capsys):
    code = main(["nbody", "--n", "3", "--dim", "2", "--analyze",
                 "--n-random", "0"])
    out = json.loads(capsys.readouterr().out)
    assert code == 10
    assert out["certificate"]["status"] == "obstruction"
    assert out["certificate"]["witnesses"]


def test_missing_file_is_an_error(capsys):
    code = main(["analyze", "/nonexistent/missing.prob"])
    assert code == 1


def test_parse_error_is_an_error(tmp_path, capsys):
    bad = tmp_path / "bad.prob"
    bad.write_text("vars q1\npotential q1 +\n")
    code = main(["analyze", str(bad)])
    assert code == 1


def test_analyze_deterministic_output(cone_file, tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    for out in (out1, out2):
        code = main(["analyze", str(cone_file), "--n-random", "8",
                     "--seed", "3", "--out", str(out)])
        assert code == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_timings_flag_adds_key(cone_file, capsys):
    code = main(["analyze", str(cone_file), "--n-random", "4", "--timings"])
    out = json.loads(capsys.readouterr().out)
    assert code == 0
    assert "timings" in out


def test_console_entry_point():
    proc = run_cli(["--version"])
    assert proc.returncode == 0
    assert "algpot" in proc.stdout


def test_golden_report_structure(cone_file, trap_file, capsys):
    code = main(["analyze", str(cone_file), "--n-random", "8"])
    cone = json.loads(capsys.readouterr().out)
    assert code == 0
    for key in ("tool", "label", "validation", "homogeneity", "darboux",
                "points", "certificate", "warnings", "exit_code"):
        assert key in cone, key

    code = main(["analyze", str(trap_file), "--n-random", "16"])
    trap = json.loads(capsys.readouterr().out)
    assert code == 0
    assert trap["certificate"]["status"] == "not_applicable"
    assert any("not weighted homogeneous" in w for w in trap["warnings"])
    rejected = trap["darboux"]["rejected"]
    assert any(r.get("in_critical_set") for r in rejected)
