import json
import subprocess
import sys
from importlib import resources

import jsonschema
import pytest

from conftest import FIXTURES
from qgx.cli import main
from qgx.rtensor import IndexedTensor, build_r

SCHEMA = json.loads(resources.files("qgx").joinpath("schema/report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_ybe_json_validates(capsys):
    code, out, _ = run(capsys, "check", "ybe", "--n", "2", "--format", "json")
    assert code == 0
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["passed"] and report["results"][0]["equation"] == "(95)"


def test_failing_report_validates_and_exits_1(capsys):
    code, out, _ = run(capsys, "check", "hecke", "--n", "2", "--format", "json", "--r-file", str(FIXTURES / "r_lambda_entry_doubled.json"))
    assert code == 1
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert not report["passed"]
    assert any(r["status"] == "fail" and r["witness"] for r in report["results"])


def test_text_report(capsys):
    code, out, _ = run(capsys, "check", "hecke", "--n", "1")
    assert code == 0
    assert out.splitlines()[0] == "PASS (96)"
    assert out.rstrip().endswith("hecke: all checks passed (3/3)")


def test_constants_round_trip(capsys):
    code, out, _ = run(capsys, "constants", "R", "--n", "2")
    assert code == 0
    assert IndexedTensor.from_json(out) == build_r(2)


def test_constants_d(capsys):
    code, out, _ = run(capsys, "constants", "D", "--n", "1")
    assert code == 0 and json.loads(out)["entries"] == [{"idx": [1, 1], "val": "q^-1"}]


@pytest.mark.parametrize("which", ["sigma", "sigmaTilde", "C", "CTilde", "Rtilde"])
def test_every_constant_exports(capsys, which):
    code, out, _ = run(capsys, "constants", which, "--n", "1")
    assert code == 0 and json.loads(out)["n"] == 1


@pytest.mark.parametrize(
    "expr,n,want",
    [
        ("w[1,1]*t[1,1]", "2", "q^-2*t[1,1]*w[1,1]"),
        ("t[1,1]", "2", "t[1,1]"),
        ("w[1,1]*w[1,1]", "1", "0"),
        ("t[2,1]*t[1,2]", "2", "t[1,2]*t[2,1]"),
        ("d(d(t[1,2]))", "2", "0"),
        ("i[1,1](w[1,1])", "2", "1"),
    ],
)
def test_nf(capsys, expr, n, want):
    code, out, _ = run(capsys, "nf", expr, "--n", n)
    assert code == 0 and out.strip() == want


def test_nf_x_presentation(capsys):
    code, out, _ = run(capsys, "nf", "X[1,2]*X[1,1]", "--n", "2")
    assert code == 0 and "X[" in out and "Y[" not in out


def test_nf_parse_error_shows_caret(capsys):
    code, _, err = run(capsys, "nf", "t[1,1] $ 2", "--n", "2")
    assert code == 2
    lines = err.splitlines()
    assert lines[0].startswith("parse error: unexpected character '$'")
    assert lines[2].index("^") == lines[1].index("$")


def test_nf_mixing_presentations_is_refused(capsys):
    code, _, err = run(capsys, "nf", "X[1,1]*Y[1,1]", "--n", "2")
    assert code == 2 and "mix" in err


def test_nf_fuel_exhaustion(capsys):
    code, _, err = run(capsys, "nf", "t[2,2]*t[2,1]*t[1,2]*t[1,1]", "--n", "2", "--fuel", "2")
    assert code == 1 and "fuel exhausted" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["check", "nosuch"],
        ["check", "ybe", "--n", "0"],
        ["check", "ybe", "--grade-cap", "4"],
        ["check", "ybe", "--format", "xml"],
        ["constants", "E"],
        [],
    ],
)
def test_usage_errors_exit_2(argv):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_missing_r_file_exits_2(capsys, tmp_path):
    code, _, err = run(capsys, "check", "ybe", "--r-file", str(tmp_path / "absent.json"))
    assert code == 2 and "error" in err


def test_r_file_dimension_mismatch(capsys, tmp_path):
    p = tmp_path / "r1.json"
    p.write_text(build_r(1).to_json())
    code, _, err = run(capsys, "check", "ybe", "--n", "2", "--r-file", str(p))
    assert code == 2 and "n=1" in err


def test_singular_r_is_a_failed_check_not_a_crash(capsys, tmp_path):
    p = tmp_path / "zero.json"
    p.write_text(json.dumps({"n": 1, "legs": 4, "entries": []}))
    code, out, _ = run(capsys, "check", "woronowicz", "--n", "1", "--format", "json", "--r-file", str(p))
    assert code == 1
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert report["results"][-1]["witness"]


def test_entry_point_is_deterministic():
    cmd = [sys.executable, "-m", "qgx.cli", "check", "overlaps", "--n", "2", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=False)
    b = subprocess.run(cmd, capture_output=True, check=False)
    assert a.returncode == 0 and a.stdout == b.stdout
    jsonschema.validate(json.loads(a.stdout), SCHEMA)


def test_fuel_from_environment():
    cmd = [sys.executable, "-m", "qgx.cli", "nf", "t[2,2]*t[2,1]*t[1,2]*t[1,1]", "--n", "2"]
    r = subprocess.run(cmd, capture_output=True, text=True, env={**__import__("os").environ, "QGX_FUEL": "2"}, check=False)
    assert r.returncode == 1 and "2 steps" in r.stderr
