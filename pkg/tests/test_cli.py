import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from qframes.cli import main
from qframes.report import ReportEnvelope

SAMPLES = Path(__file__).parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out), err


def test_equal_couplings_all_valid(capsys):
    code, rep, _ = run_json(capsys, "model", "clock-network", "--param", "lambda1=1",
                            "--param", "lambda2=1", "analyze")
    assert code == 0 and rep["status"] == "ok"
    verdicts = {r["candidate"]: r["verdict"] for r in rep["results"]["reports"]}
    assert verdicts == {"qA": "valid-on-invertibility-domain", "qB": "valid-on-invertibility-domain",
                        "qC": "valid"}


def test_unequal_couplings_invalidate_qB(capsys):
    code, rep, _ = run_json(capsys, "model", "clock-network", "--param", "lambda1=1",
                            "--param", "lambda2=2", "analyze")
    assert code == 1 and rep["status"] == "verdict-failure"
    verdicts = {r["candidate"]: r["verdict"] for r in rep["results"]["reports"]}
    assert verdicts["qB"] == "invalid"
    assert verdicts["qA"] != "invalid" and verdicts["qC"] != "invalid"


def test_toy_model_json(capsys):
    code, rep, _ = run_json(capsys, "model", "toy-nonfactorizable", "analyze")
    assert code == 1
    (r,) = rep["results"]["reports"]
    assert r["right_factor_hermitian"] is False
    assert r["right_factor"] and r["right_factor"] != r["right_factor_adjoint"]
    assert ReportEnvelope.from_json(json.dumps(rep)).to_dict() == rep


def test_file_analysis_matches_model(capsys):
    code, rep, _ = run_json(capsys, "analyze", SAMPLES / "toy.qf")
    assert code == 1
    assert rep["inputs"]["file"] == "toy.qf" and len(rep["inputs"]["sha256"]) == 64


def test_clocks(capsys):
    code, rep, _ = run_json(capsys, "clocks", SAMPLES / "two_time.qf")
    assert code == 0
    frames = rep["results"]["constraints"][0]["frames"]
    classes = {(f["frame"], c["clock"]): c["classification"] for f in frames for c in f["clocks"]}
    assert classes[("q0", "q1")] == "ideal" and classes[("q1", "q0")] == "ideal"


def test_model_clocks_and_show(capsys):
    code, out, _ = run(capsys, "model", "clock-network", "clocks")
    assert code == 0 and "good" in out
    code, out, _ = run(capsys, "model", "relativistic-clocks", "reduce")
    assert code == 0
    code, out, _ = run(capsys, "model", "relativistic-clocks", "--param", "flag=formal", "reduce")
    assert code == 1
    code, out, _ = run(capsys, "model", "two-time", "show")
    assert code == 0 and "constraint" in out


def test_check_state(capsys):
    code, rep, _ = run_json(capsys, "check-state", SAMPLES / "oscillator.qf")
    assert code == 0 and rep["results"]["conditions"]["pass"]
    assert rep["results"]["nonpositivity_witness"] == {"re": 0.0, "im": -0.5}
    code, rep, _ = run_json(capsys, "check-state", SAMPLES / "oscillator.qf", "--hbar", "0.5")
    assert rep["results"]["nonpositivity_witness"]["im"] == pytest.approx(-0.25)


def test_check_state_failure(tmp_path, capsys):
    f = tmp_path / "bad.qf"
    f.write_text("pair t E; pair q p; constraint C = E + (1/2)*p^2;\n"
                 "state { reference: t; moments: q*q = -1; }\n")
    code, rep, _ = run_json(capsys, "check-state", f)
    assert code == 1 and not rep["results"]["conditions"]["positivity"]["pass"]


def test_evolve_with_csv(tmp_path, capsys):
    out = tmp_path / "traj.csv"
    code, rep, _ = run_json(capsys, "evolve", SAMPLES / "free_particle.qf", "--tau", "1",
                            "--out", out)
    assert code == 0
    res = rep["results"]
    assert res["samples"] == 1000 and res["positivity_preserved"]
    assert res["time_residual"] <= 1e-12
    with out.open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1000
    assert {"tau", "t_Z", "min_eigenvalue", "re<q>", "im<q>", "re<q*p>"} <= set(rows[0])
    assert float(rows[-1]["tau"]) == pytest.approx(1.0)


def test_evolve_truncation_warning(capsys):
    code, rep, err = run_json(capsys, "evolve", SAMPLES / "quartic.qf", "--tau", "0.05")
    assert code == 0 and rep["status"] == "warning"
    assert "warning:" in err and rep["results"]["notes"]


def test_identities(capsys):
    code, out, _ = run(capsys, "identities")
    assert code == 0
    assert out.count("PASS") >= 15 and "FAIL" not in out


@pytest.mark.parametrize("argv,code", [
    ([], 2),
    (["frobnicate"], 2),
    (["model", "no-such-model", "analyze"], 2),
    (["model", "clock-network", "--param", "lambda3=1", "analyze"], 2),
    (["model", "clock-network", "--param", "lambda1", "analyze"], 2),
    (["analyze", "does-not-exist.qf"], 2),
    (["evolve", str(SAMPLES / "toy.qf")], 2),
    (["analyze", str(SAMPLES / "toy.qf"), "--tol", "abc"], 2),
])
def test_usage_errors(capsys, argv, code):
    got, out, err = run(capsys, *argv)
    assert got == code
    assert not out
    assert err


def test_parse_error_position(tmp_path, capsys):
    f = tmp_path / "broken.qf"
    f.write_text("pair q p;\nconstraint = ;\n")
    code, out, err = run(capsys, "analyze", f)
    assert code == 2 and "2:12" in err and not out


def test_algebra_error_exit_three(tmp_path, capsys):
    f = tmp_path / "nc.qf"
    f.write_text("hermitian g invertible; hermitian w invertible; hermitian h;\n"
                 "commutator [g, w] = h;\nconstraint C = inv(w)*inv(g);\n")
    code, out, err = run(capsys, "analyze", f)
    assert code == 3 and "NonClosedCommutator" in err and "3:" in err


def test_out_writes_report(tmp_path, capsys):
    target = tmp_path / "rep.json"
    code, out, _ = run(capsys, "model", "toy-nonfactorizable", "analyze", "--json", "--out", target)
    assert code == 1 and not out
    assert json.loads(target.read_text())["task"] == "model"


def test_reports_byte_stable_across_processes():
    cmd = [sys.executable, "-m", "qframes", "check-state", str(SAMPLES / "two_time.qf"), "--json"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout and a.stdout
