import json

import pytest

import drforms.eisenstein
from drforms.cinfty import CInftyValue, theta_power
from drforms.cli import EXIT_CONFIG, EXIT_FAILED, EXIT_OK, EXIT_PRECISION, RunConfig, main
from fractions import Fraction


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def _strip_time(doc):
    doc["meta"].pop("timestamp")
    return doc


def test_compute_pi_is_deterministic(capsys):
    code, a, _ = _run(capsys, ["compute", "pi", "--q", "3", "-P", "30"])
    assert code == EXIT_OK
    _, b, _ = _run(capsys, ["compute", "pi", "--q", "3", "-P", "30"])
    assert _strip_time(json.loads(a)) == _strip_time(json.loads(b))
    doc = json.loads(a)
    assert doc["object"] == "pi"
    assert doc["value"]["q"] == 3


def test_compute_e_reports_certified_digits(capsys):
    code, out, _ = _run(capsys, ["compute", "E", "--route", "det", "-P", "40", "-N", "12"])
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["route"] == "det"
    assert Fraction(doc["certified_digits"]) > 0


def test_verify_passes_and_prints_text(capsys):
    code, out, _ = _run(capsys, ["verify", "pdet", "--suite", "omega", "-P", "40", "-N", "12", "--output", "text"])
    assert code == EXIT_OK
    lines = out.strip().splitlines()
    assert lines and all(line.startswith("PASS ") for line in lines)
    assert any(" pdet " in line for line in lines)


@pytest.mark.parametrize("argv", [
    ["compute", "h", "--q", "6"],
    ["compute", "E", "--r", "1"],
    ["verify", "nosuchsuite"],
    ["compute", "h", "-P", "2"],
    ["compute", "h", "--point", "elsewhere"],
])
def test_invalid_configuration_exits_1(capsys, argv):
    code, _, err = _run(capsys, argv)
    assert code == EXIT_CONFIG
    assert json.loads(err)["error"] == "config"


def test_uncertifiable_u_expansion_exits_2_with_recommendation(capsys):
    # deg z_1 is an integer, so z_1 is not orthogonal to A and |u_a| cannot be bounded
    z1 = theta_power(2, Fraction(1)) + theta_power(2, Fraction(-1, 2))
    one = CInftyValue.constant(2, 1)
    point = json.dumps([z1.to_json(), one.to_json()])
    code, _, err = _run(capsys, ["compute", "u", "--point", point, "-P", "30"])
    assert code == EXIT_PRECISION
    doc = json.loads(err)
    assert doc["error"] == "precision"
    assert doc["recommended"]["theta_precision"] > 30


def test_failed_identity_exits_3(capsys, monkeypatch):
    orig = drforms.eisenstein.canonical_beta
    monkeypatch.setattr(drforms.eisenstein, "canonical_beta", lambda q: -orig(q))
    code, out, _ = _run(capsys, ["verify", "pdet", "--q", "3", "-P", "40", "-N", "12"])
    assert code == EXIT_FAILED
    (rep,) = json.loads(out)["reports"]
    assert rep["pass"] is False
    assert rep["first_failure"] is not None


def test_config_file_precedence(capsys, monkeypatch, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"q": 3, "theta_precision": 30, "output": "text"}))
    monkeypatch.setenv("DRFORMS_CONFIG", str(path))
    code, out, _ = _run(capsys, ["compute", "pi"])
    assert code == EXIT_OK
    assert '"q": 3' in out
    code, out, _ = _run(capsys, ["compute", "pi", "--q", "2", "--output", "json"])
    doc = json.loads(out)
    assert doc["meta"]["config"]["q"] == 2
    assert doc["meta"]["config"]["theta_precision"] == 30


def test_bad_config_file_is_a_config_error(capsys, monkeypatch, tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"colour": "blue"}))
    monkeypatch.setenv("DRFORMS_CONFIG", str(path))
    code, _, err = _run(capsys, ["compute", "pi"])
    assert code == EXIT_CONFIG
    assert "colour" in err


def test_run_config_defaults_validate():
    cfg = RunConfig()
    cfg.validate("verify")
    assert cfg.D == 3
