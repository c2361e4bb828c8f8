import csv
import json
import pathlib

import pytest

from resmeta.cli import main

SCEN = pathlib.Path(__file__).resolve().parent.parent / "scenarios"


def _bound(capsys, *argv):
    assert main(["bound", *argv]) == 0
    return json.loads(capsys.readouterr().out)


def test_bound_examples(capsys):
    assert _bound(capsys, "sigma1", "--set", "A=2m", "--set", "M=4")["value"] == 7
    assert _bound(capsys, "rho_error", "--set", "A=0")["value"] == 3
    assert _bound(capsys, "rho_error", "--set", "A=2m", "--set", "M=1")["value"] == 19
    rec = _bound(capsys, "mu4", "--k", "0", "--f", "identity")
    assert rec["value"] == "⊤"
    assert rec["lower_bound"] >= 24 * 15001**2
    assert rec["provenance"] and rec["inputs"]


def test_bound_list(capsys):
    assert main(["bound", "list"]) == 0
    names = capsys.readouterr().out.split()
    assert "mu4" in names and "sigma1" in names


def test_bound_unknown_rate(capsys):
    assert main(["bound", "nope"]) == 3
    assert main(["bound", "sigma1", "--set", "A=banana"]) == 3


def test_usage_errors():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 3
    with pytest.raises(SystemExit) as exc:
        main(["bound", "sigma1", "--k", "x"])
    assert exc.value.code == 3


def test_bad_config_exit(tmp_path):
    p = tmp_path / "bad.toml"
    p.write_text("[scenario]\ndim = 0x1\n")
    assert main(["run", "--config", str(p), "--out", str(tmp_path)]) == 3
    assert main(["run", "--config", str(tmp_path / "missing.toml")]) == 3


def test_verify_exit_codes(tmp_path, capsys):
    assert main(["verify", "--suite", "operators", "--out", str(tmp_path)]) == 0
    payload = json.loads((tmp_path / "verify-operators.json").read_text())
    assert payload["suite"] == "operators"
    assert main(["verify", "--suite", "nope"]) == 3
    assert main(["check", "--out", str(tmp_path)]) == 0
    assert main(["verify", "--suite", "metastability", "--cap", "0", "--out", str(tmp_path)]) == 2


def test_verify_transfer_reports_identity_residual(tmp_path):
    assert main(["verify", "--suite", "transfer", "--out", str(tmp_path)]) == 0
    text = (tmp_path / "verify-transfer.json").read_text()
    assert "identity" in text


def _run(tmp_path, name, extra=()):
    out = tmp_path / name
    assert main(["run", "--config", str(SCEN / name), "--out", str(out), *extra]) == 0
    return out


def test_run_line_scenario(tmp_path):
    out = _run(tmp_path, "r1-linear.toml")
    report = json.loads((out / "r1-linear.report.json").read_text())
    assert report["stats"]["final_dist_to_ref"] <= 1e-3
    assert all(v["verdict"] == "pass" for v in report["verdicts"])
    with open(out / "r1-linear.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][:2] == ["n", "coord_0"]


def test_run_is_deterministic(tmp_path):
    a = _run(tmp_path / "a", "r1-linear.toml")
    b = _run(tmp_path / "b", "r1-linear.toml")
    for name in ("r1-linear.csv", "r1-linear.report.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_zero_scenario_rows_are_zero(tmp_path):
    out = _run(tmp_path, "zero.toml")
    csv_path = next(out.glob("*.csv"))
    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    for row in rows[1:]:
        assert all(float(x) == 0.0 for x in row[1:])


def test_errors_scenario_emits_gap(tmp_path):
    out = _run(tmp_path, "r1-linear-errors.toml")
    with open(out / "r1-linear-errors.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0][-1] == "gap"
    assert float(rows[2][-1]) > 0
    assert float(rows[-1][-1]) < 1e-2


def test_witness_and_export(tmp_path, capsys):
    assert main(["witness", "--k", "9", "--f", "affine(1,5)", "--cap", "1000"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["n_star"] == 5
    assert main(["witness", "--k", "1", "--quasi", "--metric", "residual-both"]) == 0
    assert main(["witness", "--k", "1", "--metric", "nope"]) == 3
    assert main(["witness", "--k", "1000", "--f", "affine(1,5)", "--cap", "2"]) == 2
    assert main(["export", "--steps", "20", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "r1-linear.csv").read_text().splitlines()
    assert len(lines) == 22
