"""CLI: reports, verdicts, exit codes, determinism."""

import json

import pytest

from cspi.cli import main


def test_order_command_prints_weyl_symbol(capsys):
    code = main(["order", "--expr", "ad_0*a_0", "--target", "weyl"])
    out = capsys.readouterr()
    assert code == 0
    assert "zbar_0*z_0 - 0.5" in out.out
    assert out.out.startswith("expr,target,symbol\n")


def test_order_trivial_and_quartic(capsys):
    assert main(["order", "--expr", "1", "--target", "normal"]) == 0
    assert "1.0" in capsys.readouterr().out
    assert main(["order", "--expr", "ad_0^2*a_0^2", "--target", "weyl"]) == 0
    out = capsys.readouterr().out
    assert "zbar_0^2*z_0^2 - 2.0*zbar_0*z_0 + 0.5" in out


def test_order_verify_residual(capsys):
    code = main(["order", "--expr", "ad_0^2*a_0^2", "--target", "weyl", "--verify"])
    out = capsys.readouterr()
    assert code == 0
    header, row = out.out.strip().splitlines()
    assert header.endswith(",residual")
    assert float(row.split(",")[-1]) <= 1e-10


def test_order_parse_error_exit_2(capsys):
    assert main(["order", "--expr", "ad_0*", "--target", "weyl"]) == 2
    assert "position" in capsys.readouterr().err


def test_order_unknown_target_exit_2():
    assert main(["order", "--expr", "a_0", "--target", "sideways"]) == 2


def test_free_energy_sweep_and_even_N_warning(tmp_path, capsys):
    out = tmp_path / "fe.csv"
    code = main(
        ["free-energy", "--A", "1.0", "--beta", "1.0", "--N", "101,1001,2000", "--out", str(out)]
    )
    captured = capsys.readouterr()
    assert code == 0
    assert "refused: even N" in captured.err
    lines = out.read_text().strip().splitlines()
    assert lines[0] == "N,method,dFdA,abs_error,note"
    exact_row = lines[1].split(",")
    assert exact_row[1] == "exact" and exact_row[3] == "0"
    refused = [line for line in lines if "refused: even N" in line]
    assert len(refused) == 1 and refused[0].startswith("2000,weyl-discrete")


def test_csv_determinism_across_runs_and_threads(tmp_path, monkeypatch):
    args = ["free-energy", "--N", "101,201,301", "--tol", "1e-2", "--out", None]
    outputs = []
    for name, threads in [("a.csv", "1"), ("b.csv", "1"), ("c.csv", "4")]:
        path = tmp_path / name
        args[-1] = str(path)
        monkeypatch.setenv("CSPI_THREADS", threads)
        assert main(args) == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_json_report_mirrors_csv(tmp_path):
    csv_path = tmp_path / "cut.csv"
    json_path = tmp_path / "cut.json"
    base = ["cutoff", "--b", "10,100", "--ordering", "normal,weyl"]
    assert main(base + ["--out", str(csv_path)]) == 0
    assert main(base + ["--out", str(json_path)]) == 0
    doc = json.loads(json_path.read_text())
    assert doc["verdict"] == "pass"
    assert doc["config"]["command"] == "cutoff"
    assert doc["config"]["b"] == [10, 100]
    csv_lines = csv_path.read_text().strip().splitlines()
    assert doc["columns"] == csv_lines[0].split(",")
    assert [",".join(row) for row in doc["rows"]] == csv_lines[1:]


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"A": 2.0, "beta": 1.0, "N": [101], "tol": 1e-2}))
    code = main(["free-energy", "--config", str(cfg), "--N", "501"])
    out = capsys.readouterr().out
    assert code == 0
    assert "\n501,normal-discrete" in out
    assert "101," not in out


def test_bad_config_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("{not json")
    assert main(["free-energy", "--config", str(cfg)]) == 2
    cfg.write_text(json.dumps({"N": []}))
    assert main(["free-energy", "--config", str(cfg)]) == 2
    assert main(["free-energy", "--config", str(tmp_path / "missing.json")]) == 2


def test_verdict_failure_exit_1(capsys):
    code = main(["cutoff", "--b", "10,100", "--tol", "1e-30"])
    captured = capsys.readouterr()
    assert code == 1
    assert "verdict: fail" in captured.err


def test_flow_report(capsys):
    # the -2 scaling window [50, 500] needs pi*shell/N well inside the
    # small-angle regime, hence the large lattice
    code = main(["flow", "--N", "10001", "--b-floor", "40"])
    out = capsys.readouterr()
    assert code == 0
    assert "correction_slope" in out.out
    assert "verdict: pass" in out.err


def test_identity_check_report(capsys):
    code = main(["identity-check"])
    out = capsys.readouterr()
    assert code == 0
    assert out.out.startswith("n_max,radial,angular,margin,deviation\n")


def test_prefactor_report(capsys):
    code = main(["prefactor", "--N", "1001,10001", "--b", "4"])
    out = capsys.readouterr()
    assert code == 0
    assert out.out.startswith("N,b,log_empirical,log_closed,rel_difference\n")
