import json

import pytest

from hhfrac.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr()


def test_sweep_writes_report(tmp_path, capsys):
    cfg = tmp_path / "sweep.cfg"
    cfg.write_text("g_count = 3\npsi_count = 2\nmu_grid = 0.5, 1\nq_grid = 1, 2\n"
                   "intervals = 0:1\nchecks = lemma31, thm31\n")
    out = tmp_path / "rows.json"
    code, cap = run(capsys, "verify", "sweep", "--config", str(cfg), "--out", str(out))
    summary = json.loads(cap.out)
    assert code == 0 and summary["ok"]
    assert len(json.loads(out.read_text())) == summary["total"]
    csv_out = tmp_path / "rows.csv"
    assert main(["verify", "sweep", "--config", str(cfg), "--out", str(csv_out), "--format", "csv"]) == 0
    assert csv_out.read_text().startswith("check,g,psi")


def test_sweep_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("mu_grid = 2\nq_grid = 0.5\n")
    code, cap = run(capsys, "verify", "sweep", "--config", str(cfg))
    assert code == 2 and cap.err.count("config error") == 2


def test_lemma(capsys):
    code, cap = run(capsys, "verify", "lemma", "--g", "pow:n=3", "--psi", "psi=exp:lam=1",
                    "--mu", "0.5", "--u", "1", "--v", "2")
    assert code == 0 and json.loads(cap.out)["disagreement"] < 1e-8


@pytest.mark.parametrize("which, q", [("thm31", "1"), ("thm32", "2"), ("cor34", "2")])
def test_bound(capsys, which, q):
    code, cap = run(capsys, "verify", "bound", "--which", which, "--g", "pow:n=4", "--mu", "0.5",
                    "--q", q, "--u", "0", "--v", "1")
    (row,) = json.loads(cap.out)
    assert code == 0 and row["check"] == which and row["holds"]


def test_means(capsys):
    code, cap = run(capsys, "means", "check", "--prop", "1", "--n", "3", "--u", "1", "--v", "2", "--q", "1")
    assert code == 0 and json.loads(cap.out)[0]["lhs"] == 0.375
    code, cap = run(capsys, "means", "check", "--prop", "3", "--n", "3", "--u", "1", "--v", "2", "--q", "1")
    assert len(json.loads(cap.out)) == 2
    code, cap = run(capsys, "means", "check", "--prop", "1", "--u", "1", "--v", "2", "--q", "1")
    assert code == 2
    code, cap = run(capsys, "means", "check", "--prop", "4", "--u", "2", "--v", "1", "--q", "1")
    assert code == 2


def test_quad(capsys):
    code, cap = run(capsys, "quad", "run", "--g", "sq", "--u", "0", "--v", "1", "--target", "1e-4")
    res = json.loads(cap.out)
    assert code == 0 and set(res) == {"value", "certificate", "cells", "true_error"}
    assert res["certificate"] <= 1e-4


def test_bessel(capsys):
    code, cap = run(capsys, "bessel", "check", "--p", "0.5", "--u", "1", "--v", "2")
    summary = json.loads(cap.out)
    assert code == 0 and summary["anomalies"]
