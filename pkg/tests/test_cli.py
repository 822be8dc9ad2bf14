import json
import math
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from siegel_runge import cli


def schema(name):
    return json.loads(resources.files("siegel_runge").joinpath(f"schemas/{name}.schema.json").read_text())


def run(capsys, *argv):
    code = cli.run([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


@pytest.fixture
def nine_prime_curve(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"J": [1, 0, 0, 0, math.prod([2, 3, 5, 7, 11, 13, 17, 19, 23])]}))
    return p


def test_verify_identities_printed_fails(capsys):
    code, out, _ = run(capsys, "verify-identities", "--order", 16)
    jsonschema.validate(out, schema("verify_identities"))
    assert code == 2 and not out["all_pass"]
    failing = {e["identity"] for e in out["identities"] if e["status"] == "fail"}
    assert failing == {"Sigma_3", "Sigma_7"}


def test_verify_identities_corrected_passes(capsys):
    code, out, _ = run(capsys, "verify-identities", "--order", 16, "--table", "corrected")
    jsonschema.validate(out, schema("verify_identities"))
    assert code == 0 and out["all_pass"]
    assert all(e["status"] == "pass" for e in out["identities"])


def test_eval(capsys, fixtures):
    code, out, _ = run(capsys, "eval", "--tau", fixtures / "tau_diag.json", "--eps", 1e-12)
    jsonschema.validate(out, schema("eval"))
    assert code == 0 and out["in_F2"]
    assert len(out["theta"]) == 10 and len(out["psi"]) == 10


def test_reduce(capsys, tmp_path):
    p = tmp_path / "tau.json"
    p.write_text(json.dumps({"tau1": [3.3, 0.5], "tau2": [0.1, 0.05], "tau4": [-2.2, 0.7]}))
    code, out, _ = run(capsys, "reduce", "--tau", p)
    jsonschema.validate(out, schema("reduce"))
    assert code == 0 and out["in_F2"]


def test_polygon(capsys, fixtures):
    code, out, _ = run(capsys, "polygon", "--points", fixtures / "points_example.json")
    jsonschema.validate(out, schema("polygon"))
    assert code == 0


def test_classify(capsys, fixtures):
    code, out, _ = run(capsys, "classify", "--curve", fixtures / "curve_x5p1.json")
    jsonschema.validate(out, schema("classify"))
    assert code == 0 and out["s_P"] == 0
    assert [p["prime"] for p in out["places"]] == [2, 5]


def test_audit_true(capsys, fixtures):
    code, out, _ = run(capsys, "audit", "--curve", fixtures / "j_trivial.json", "--mode", "a",
                       "--tau", fixtures / "tau_diag.json")
    jsonschema.validate(out, schema("audit"))
    assert code == 0 and out["verdict"] is True and out["s_P"] == 0
    assert any("theta divisor" in w for w in out["warnings"])


def test_audit_mode_b_false(capsys, nine_prime_curve):
    code, out, _ = run(capsys, "audit", "--curve", nine_prime_curve, "--mode", "b")
    jsonschema.validate(out, schema("audit"))
    assert code == 2 and out["verdict"] is False
    assert out["condition"]["lhs"] == 10


def test_audit_conservative_constant(capsys, fixtures):
    code, out, _ = run(capsys, "audit", "--curve", fixtures / "j_trivial.json", "--mode", "b", "--c-b", 1.22)
    assert code == 0 and out["bound"]["constant"] == 1.22


def test_bounds(capsys):
    code, out, _ = run(capsys, "bounds", "--mode", "a")
    jsonschema.validate(out, schema("bounds"))
    assert code == 0 and out == {"h_psi_bound": 10.75, "faltings_bound": 1070}
    code, out, _ = run(capsys, "bounds", "--mode", "b", "--t", 1)
    jsonschema.validate(out, schema("bounds"))
    assert abs(out["h_psi_bound"] - (4 * math.pi + 6.14)) < 1e-9


@pytest.mark.parametrize("argv", [
    ["bounds", "--mode", "a", "--bogus"],
    ["bounds"],
    ["frobnicate"],
    ["bounds", "--mode", "b", "--t", "0.1"],
    ["eval", "--tau", "/nonexistent.json"],
    ["audit", "--curve", "/nonexistent.json", "--mode", "a"],
])
def test_errors_exit_1(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 1 and out is None
    assert "error" in err


def test_bad_config(capsys, tmp_path):
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps({"eps": 1e-10, "colour": "blue"}))
    code, _, _ = run(capsys, "--config", p, "bounds", "--mode", "a")
    assert code == 1


def test_output_file_byte_identical(tmp_path, fixtures):
    outs = []
    for k in range(2):
        o = tmp_path / f"out{k}.json"
        args = ["--output", o, "audit", "--curve", fixtures / "curve_x5p1.json", "--mode", "b",
                "--tau", fixtures / "tau_diag.json", "--t", 1.2]
        assert cli.run([str(a) for a in args]) == 0
        outs.append(o.read_bytes())
    assert outs[0] == outs[1]


def test_console_script():
    res = subprocess.run([sys.executable, "-m", "siegel_runge.cli", "bounds", "--mode", "a"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert json.loads(res.stdout)["faltings_bound"] == 1070
