"""CLI contract: subcommands, report schema, exit codes, determinism."""

import json

import pytest

from bgnf.cli import EXIT_INPUT, EXIT_OK, EXIT_PRECONDITION, EXIT_TOLERANCE, main
from bgnf.poly import write_polynomial
from bgnf.models import henon_heiles


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_normalize_henon_heiles_json(capsys):
    code, out, _ = run(capsys, "normalize", "--model", "henon-heiles",
                       "--order", "4", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["coefficients"]["2 0 2 0"]["re"] == "-5/48"
    assert doc["gauge"] == "im-D"
    assert doc["resonance"] == "(-1,1)"
    assert doc["version"]


def test_normalize_from_input_file(tmp_path, capsys):
    h = henon_heiles(order=4).poly
    path = tmp_path / "hh.poly"
    path.write_text(write_polynomial(h))
    code, out, _ = run(capsys, "normalize", "--input", str(path),
                       "--order", "4", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["coefficients"]["2 0 2 0"]["re"] == "-5/48"


def test_analyze_hill_schema_and_values(capsys):
    code, out, _ = run(capsys, "analyze", "--model", "hill", "--order", "6",
                       "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"]["theorem"] == "1.3"
    assert doc["verdict"]["clause"] == "ii"
    assert doc["series"]["product"]["coefficients"] == ["1", "0", "36"]
    assert doc["Omega"] == {"nu1": "1", "nu2": "-1", "nu": "0"}
    assert doc["beta"] == {"beta1": "13/4", "beta2": "13/4"}
    assert doc["nu"] == 2


def test_analyze_isosceles_verdict(capsys):
    code, out, _ = run(capsys, "analyze", "--model", "isosceles",
                       "--alpha", "3", "--varpi", "1", "--order", "4",
                       "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["verdict"]["theorem"] == "1.2"
    assert doc["verdict"]["clause"] == "v"


def test_analyze_quadratic_inconclusive(capsys):
    code, out, _ = run(capsys, "analyze", "--model", "quadratic",
                       "--alpha1", "1", "--alpha2", "2", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["nu"] is None
    assert not doc["verdict"]["satisfied"]


def test_analyze_hill_averaged_route(capsys):
    code, out, _ = run(capsys, "analyze", "--model", "hill", "--order", "6",
                       "--route", "rotate", "--format", "json")
    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["gauge"] == "averaged"
    assert doc["series"]["rho1"]["coefficients"] == ["2", "4", "26"]


def test_malformed_input_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.poly"
    path.write_text("chart: real\nfield: rational\norder: 4\noops\n")
    code, _, err = run(capsys, "normalize", "--input", str(path))
    assert code == EXIT_INPUT
    assert "line 4" in err


def test_missing_file_exit_2(capsys):
    code, _, err = run(capsys, "normalize", "--input", "/nonexistent.poly")
    assert code == EXIT_INPUT


def test_precondition_violation_exit_3(tmp_path, capsys):
    # a Hamiltonian without the diagonal quadratic part
    path = tmp_path / "nodiag.poly"
    path.write_text("chart: real\nfield: rational\norder: 4\n"
                    "1 : 1 1 0 0\n")
    code, _, err = run(capsys, "normalize", "--input", str(path),
                       "--order", "4")
    assert code in (EXIT_INPUT, EXIT_PRECONDITION)


def test_determinism_byte_identical(capsys):
    _, out1, _ = run(capsys, "analyze", "--model", "henon-heiles",
                     "--order", "4", "--format", "json")
    _, out2, _ = run(capsys, "analyze", "--model", "henon-heiles",
                     "--order", "4", "--format", "json")
    assert out1 == out2


@pytest.mark.slow
def test_verify_quadratic_roundoff_and_ci(capsys):
    code, out, _ = run(capsys, "verify", "--model", "quadratic",
                       "--alpha1", "1", "--alpha2", "2",
                       "--energies", "1e-3,2e-3", "--horizon", "5",
                       "--format", "json", "--ci")
    assert code == EXIT_OK
    doc = json.loads(out)
    cols = doc["columns"]
    assert cols[:2] == ["E", "rho1_num"]
    for row in doc["rows"]:
        r = dict(zip(cols, row))
        assert abs(r["rho1_num"] - r["rho1_series"]) < 1e-8


@pytest.mark.slow
def test_verify_ci_mode_flags_breach(capsys):
    # an unreasonably tight CI tolerance must trip the nonzero exit
    code, _, err = run(capsys, "verify", "--model", "hill",
                       "--energies", "1e-3", "--horizon", "5",
                       "--ci", "--ci-tol", "1e-12")
    assert code == EXIT_TOLERANCE
    assert "CI failure" in err
