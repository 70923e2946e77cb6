"""Tests for the command-line interface."""

import json

import numpy as np
import pytest

from gnsharp.cli import ACCEPTANCE, CliError, parse_metric, run
from gnsharp.geometry import CONFORMAL, EUCLIDEAN, SPACE_FORM


def _run_json(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, json.loads(captured.out), captured


# ---------------------------------------------------------------------------
# happy paths


def test_ranges_reports_found_root_endpoint(capsys):
    code, payload, _ = _run_json(capsys, ["ranges", "--n", "7", "--json"])
    assert code == 0
    assert payload["schema"] == 1
    assert payload["command"] == "ranges"
    assert payload["pass"] is True
    b3 = next(r for r in payload["results"] if r["label"] == "B3")
    assert abs(b3["hi"] - 1.3727524434686968) < 1e-12
    assert b3["provenance"] == "root-found"
    kappas = [r for r in payload["results"] if r["kind"] == "kappa"]
    assert {r["label"] for r in kappas} == {"minus", "plus"}
    assert all(r["kappa"] > 0.0 for r in kappas)


def test_constants_row_values(capsys):
    code, payload, _ = _run_json(
        capsys, ["constants", "--n", "4", "--alpha", "0.5", "--json"]
    )
    assert code == 0
    (row,) = payload["results"]
    assert abs(row["interp"] - 4.0 / 9.0) < 1e-15
    assert abs(row["sharp"] - 26.8711016924) < 1e-9
    assert row["regime"] == "minus"


def test_moments_verify_passes(capsys):
    code, payload, _ = _run_json(
        capsys, ["moments", "verify", "--n", "3", "--alpha", "0.5", "--json"]
    )
    assert code == 0
    assert payload["pass"] is True
    assert all(row["ok"] for row in payload["results"])
    assert max(row["rel_err"] for row in payload["results"]) <= 1e-8


def test_minimize_euclidean_hits_sharp_constant(capsys):
    code, payload, _ = _run_json(
        capsys,
        ["minimize", "--n", "3", "--alpha", "0.5", "--grid", "256",
         "--init", "extremal", "--json"],
    )
    assert code == 0
    (row,) = payload["results"]
    assert row["converged"] is True
    assert row["rel_gap"] <= 1e-3


def test_json_output_is_byte_deterministic(capsys):
    argv = ["symmetrize", "--count", "2", "--seed", "3", "--json"]
    code_a = run(argv)
    out_a = capsys.readouterr().out
    code_b = run(argv)
    out_b = capsys.readouterr().out
    assert code_a == code_b == 0
    assert out_a == out_b


def test_out_flag_writes_file(capsys, tmp_path):
    path = tmp_path / "ranges.json"
    code = run(["ranges", "--n", "3", "--json", "--out", str(path)])
    assert code == 0
    assert capsys.readouterr().out == ""
    payload = json.loads(path.read_text())
    assert payload["command"] == "ranges"


def test_csv_output_has_header(capsys):
    code = run(["ranges", "--n", "3", "--csv"])
    out = capsys.readouterr().out
    assert code == 0
    header = out.splitlines()[0].split(",")
    assert header[:3] == ["n", "kind", "label"]
    assert "provenance" in header


# ---------------------------------------------------------------------------
# exit codes


def test_verification_failure_exits_one(capsys):
    # An impossible tolerance flips the same computation to a clean failure.
    code, payload, _ = _run_json(
        capsys,
        ["moments", "verify", "--n", "3", "--alpha", "0.5", "--tol", "1e-18", "--json"],
    )
    assert code == 1
    assert payload["pass"] is False


@pytest.mark.parametrize(
    "argv,needle",
    [
        (["minimize", "--alpha", "0.5", "--metric", "torus"], "unknown metric"),
        (["constants", "--alpha", "1.0"], "--regime"),
        (["constants", "--alpha", "0.5", "--regime", "plus"], ""),
        (["minimize", "--alpha", "0.5", "--metric", "spaceform:K=abc"], "could not parse"),
        (["constants", "--n", "2", "--alpha", "0.5"], ""),
    ],
)
def test_config_errors_exit_two_with_json_error(capsys, argv, needle):
    code = run(argv)
    captured = capsys.readouterr()
    assert code == 2
    err = json.loads(captured.err)
    assert err["schema"] == 1
    assert needle in err["error"]["message"]


def test_unknown_flag_exits_two_with_json_error(capsys):
    code = run(["ranges", "--bogus"])
    captured = capsys.readouterr()
    assert code == 2
    err = json.loads(captured.err)
    assert "error" in err


# ---------------------------------------------------------------------------
# metric parsing


def test_parse_metric_forms(tmp_path):
    assert parse_metric("euclidean", 3).kind == EUCLIDEAN
    sf = parse_metric("spaceform:K=-0.7", 4)
    assert sf.kind == SPACE_FORM and sf.K == -0.7
    cm = parse_metric("conformal:schwarzschild:m=1.5", 3)
    assert cm.kind == CONFORMAL and cm.r_max == 60.0

    table = tmp_path / "factor.csv"
    rows = ["r,factor"] + [f"{r},{1.0 + 0.1 * r}" for r in np.linspace(0.5, 8.0, 40)]
    table.write_text("\n".join(rows) + "\n")
    tm = parse_metric(f"conformal:{table}", 3)
    assert tm.kind == CONFORMAL
    assert abs(float(tm.conformal_factor(np.array([2.0]))[0]) - 1.2) < 1e-6


@pytest.mark.parametrize(
    "text",
    ["spaceform:J=1", "conformal:schwarzschild:q=1", "conformal:/no/such/file.csv",
     "spaceform:K=", "torus"],
)
def test_parse_metric_rejects_bad_syntax(text):
    with pytest.raises(CliError):
        parse_metric(text, 3)


def test_parse_metric_rejects_bad_tables(tmp_path):
    bad_header = tmp_path / "a.csv"
    bad_header.write_text("radius,u\n1,1\n2,1\n3,1\n4,1\n")
    with pytest.raises(CliError, match="header"):
        parse_metric(f"conformal:{bad_header}", 3)
    too_short = tmp_path / "b.csv"
    too_short.write_text("r,factor\n1,1\n2,1\n")
    with pytest.raises(CliError, match="at least 4"):
        parse_metric(f"conformal:{too_short}", 3)
    bad_row = tmp_path / "c.csv"
    bad_row.write_text("r,factor\n1,1\n2,x\n3,1\n4,1\n")
    with pytest.raises(CliError, match="bad row"):
        parse_metric(f"conformal:{bad_row}", 3)


# ---------------------------------------------------------------------------
# acceptance battery plumbing


def test_acceptance_registry_shape():
    assert len(ACCEPTANCE) == 10
    names = [check.__name__ for check in ACCEPTANCE]
    assert len(set(names)) == 10
    assert all(name.startswith("check_") for name in names)


def test_quick_suite_passes(capsys):
    code = run(["suite", "--quick"])
    out = capsys.readouterr().out
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith("PASS")]
    assert len(lines) == 10
    assert out.strip().endswith("suite: pass")
