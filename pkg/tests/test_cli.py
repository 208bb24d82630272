import json
import subprocess
import sys

import numpy as np
import pytest

from krylovsvd.cli import main
from krylovsvd.harness.mmio import read_matrix_market, write_matrix_market
from oracles import lapack_sigma


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_budget_command(capsys):
    code, out, _ = run(["budget", "--method", "lanczos", "--n", "1000", "--p", "20", "--k", "10",
                        "--epsilon", "0.1", "--alpha", "1"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["count"] == 57 and d["theorem"] == "T3.1-random"


def test_budget_variants(capsys):
    assert json.loads(run(["budget", "--beta", "8", "--epsilon", "0.5"], capsys)[1])["count"] == 12
    d = json.loads(run(["budget", "--method", "power", "--n", "100", "--p", "25", "--k", "5",
                        "--epsilon", "0.1", "--gap", "2"], capsys)[1])
    assert d["count"] == 4 and d["theorem"] == "T6.1-power"
    code, _, err = run(["budget", "--n", "100"], capsys)
    assert code == 2 and "p: required" in err


def test_spectrum_and_svd(tmp_path, capsys):
    path = tmp_path / "m.mtx"
    code, _, _ = run(["spectrum", "--m", "40", "--n", "30", "--spectrum-kind", "geometric",
                      "--ratio", "0.7", "--seed", "3", "--out", str(path)], capsys)
    assert code == 0
    M = read_matrix_market(path)
    np.testing.assert_allclose(lapack_sigma(M), 0.7 ** np.arange(30), rtol=1e-8)
    code, out, _ = run(["svd", str(path), "--k", "3", "--p", "8", "--alpha", "0.5",
                        "--epsilon", "0.5"], capsys)
    assert code == 0
    d = json.loads(out)
    np.testing.assert_allclose(d["singular_values"], [1.0, 0.7, 0.49], rtol=1e-6)
    assert d["budget_rule"] == "T3.1-random"


def test_svd_fixed_iterations_and_config(tmp_path, capsys):
    path = tmp_path / "m.mtx"
    write_matrix_market(np.diag([5.0, 4.0, 3.0, 2.0, 1.0]), path)
    cfg = tmp_path / "c.toml"
    cfg.write_text('method = "power"\nk = 2\np = 3\niterations = 10\n')
    out_path = tmp_path / "o.json"
    code, _, _ = run(["svd", str(path), "--config", str(cfg), "--out", str(out_path)], capsys)
    assert code == 0
    d = json.loads(out_path.read_text())
    assert d["method"] == "power" and d["iterations"] == 10 and d["budget_rule"] == "fixed"


def test_svd_bad_alpha_is_config_error(tmp_path, capsys):
    path = tmp_path / "m.mtx"
    write_matrix_market(np.eye(6), path)
    code, _, err = run(["svd", str(path), "--k", "2", "--p", "3"], capsys)
    assert code == 2 and "alpha" in err


def test_verify_exit_codes(tmp_path, capsys):
    base = ["verify", "lanczos-random", "--m", "30", "--n", "24", "--k", "3", "--p", "10",
            "--trials", "4", "--alpha", "0.5", "--epsilon", "0.5", "--ratio", "0.8"]
    code, out, err = run(base, capsys)
    assert code == 0 and err.startswith("PASS")
    assert json.loads(out)["aggregate"]["overall_pass"] is True
    csv_path = tmp_path / "r.csv"
    code, out, _ = run(base + ["--format", "csv", "--out", str(csv_path)], capsys)
    assert out == "" and len(csv_path.read_text().splitlines()) == 5


def test_verify_failure_exit_code(capsys):
    # the initialization campaign misses its target at these sizes (see README)
    code, _, err = run(["verify", "initialization", "--m", "100", "--n", "100", "--k", "5",
                        "--p", "25", "--trials", "20", "--alpha", "2"], capsys)
    assert code == 1 and err.startswith("FAIL")


def test_verify_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('campaign = "power-random"\nm = 30\nn = 24\nk = 3\np = 10\ntrials = 3\n'
                   'alpha = 0.5\nepsilon = 0.5\n[spectrum]\nkind = "polynomial"\nexponent = 1.0\n')
    code, out, _ = run(["verify", "--config", str(cfg)], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["config"]["spectrum"]["kind"] == "polynomial" and len(d["trials"]) == 3


def test_verify_config_error(capsys):
    code, _, err = run(["verify", "lanczos-random", "--epsilon", "0"], capsys)
    assert code == 2 and "epsilon" in err


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text("this is = = not toml")
    assert run(["budget", "--config", str(cfg)], capsys)[0] == 2
    assert run(["budget", "--config", str(tmp_path / "missing.toml")], capsys)[0] == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "krylovsvd.cli", "budget", "--beta", "1",
                          "--epsilon", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and json.loads(res.stdout)["count"] == 3


def test_missing_subcommand():
    with pytest.raises(SystemExit):
        main([])
