import csv
import io
import json
import math

import pytest

from hhfrac.bounds import BoundReport
from hhfrac.funcs import Interval
from hhfrac.verify import (
    REPORT_KEYS,
    ConfigError,
    SweepConfig,
    emit_report,
    is_gated,
    parse_config,
    render_report,
    run_bessel_check,
    run_sweep,
    summarize,
)

SMALL = dict(g_count=5, psi_count=3, mu_grid=(0.5, 1.0), q_grid=(1.0, 2.0),
             intervals=((0.0, 1.0), (1.0, 2.0)), means_draws=50, partitions=5,
             bessel_p=(0.5, 2.5), bessel_intervals=((1.0, 2.0),))


def small(**kw):
    return SweepConfig(**(SMALL | kw))


def test_validation_lists_every_problem():
    with pytest.raises(ConfigError) as err:
        SweepConfig(mu_grid=(), q_grid=(0.5,), checks=("bogus",)).validate()
    probs = err.value.problems
    assert any("mu_grid" in p for p in probs)
    assert any("q=0.5" in p for p in probs)
    assert any("bogus" in p for p in probs)
    with pytest.raises(ConfigError):
        run_sweep(SweepConfig(mu_grid=()))
    with pytest.raises(ConfigError):
        SweepConfig(mu_grid=(1.5,)).validate()
    with pytest.raises(ConfigError):
        SweepConfig(bessel_intervals=((0.0, 1.0),)).validate()


def test_parse_config():
    cfg = parse_config("""
        # comment
        seed = 3
        mu_grid = 0.5, 1
        intervals = 0:1, 0.5:3
        checks = lemma31, thm31
        quad_abs = 1e-10
    """)
    assert cfg.seed == 3 and cfg.mu_grid == (0.5, 1.0)
    assert cfg.intervals == ((0.0, 1.0), (0.5, 3.0))
    assert cfg.checks == ("lemma31", "thm31")
    for bad in ("nonsense", "colour = red", "seed = x", "mu_grid ="):
        with pytest.raises(ConfigError):
            parse_config(bad)


def test_lemma_rows_all_pass():
    summary, rows = run_sweep(small(checks=("lemma31",)))
    assert summary.total == 5 * 3 * 2 * 2
    assert summary.passed == summary.hypothesis_met == summary.total
    assert not summary.anomalies and summary.observations


def test_tightness_row():
    _, rows = run_sweep(small(checks=("thm31",), psi_count=1))
    row = next(r for r in rows if r.g == "sq" and r.mu == 1.0 and r.q == 1.0 and r.u == 0.0)
    assert abs(row.slack) <= 1e-10 and row.holds


def test_summary_invariants():
    summary, rows = run_sweep(small(checks=("thm31", "thm32", "hh12", "hh13", "cor34")))
    assert summary.passed <= summary.hypothesis_met <= summary.total
    assert summary.reported == sum(1 for r in rows if r.check == "hh13")
    described = summary.worst_case.split()[0]
    assert any(r.check == described for r in rows)
    assert [r.check for r in rows] == sorted(r.check for r in rows)


def test_reported_checks_do_not_gate():
    assert not is_gated("hh13") and not is_gated("prop6") and is_gated("thm31")
    rows = [BoundReport("hh13", 2.0, 1.0), BoundReport("thm31", 0.5, 1.0)]
    s = summarize(rows)
    assert s.ok and s.total == 2 and s.hypothesis_met == 1 and s.reported == 1


def test_determinism():
    cfg = small(checks=("lemma31", "prop1", "prop5"))
    a, rows_a = run_sweep(cfg)
    b, rows_b = run_sweep(cfg)
    assert a == b
    assert render_report(rows_a) == render_report(rows_b)


def test_anomalies_name_their_items():
    summary, _ = run_sweep(small(checks=("hh13", "thm32", "prop1", "prop4", "prop6")))
    heads = sorted(a.split(":")[0].split(" ")[0] for a in summary.anomalies)
    assert heads == ["hh13", "prop1", "prop4", "prop62", "prop64", "thm32"]


def test_bessel_examples():
    summary, rows = run_bessel_check([1.0], [Interval(0.5, 1.5)], 1e-4)
    main = [r for r in rows if r.check == "prop6"][0]
    assert main.extra["lhs_routes_agree"]
    assert math.isnan(main.bound) and main.notes.startswith("pole")
    _, rows = run_bessel_check([0.5], [Interval(1.0, 2.0)], 1e-4)
    assert [r for r in rows if r.check == "prop6"][0].hypothesis_met
    with pytest.raises(ConfigError):
        run_bessel_check([-1.0], [Interval(1.0, 2.0)])


def test_bessel_coincidence_limit():
    def one(eps):
        _, rows = run_bessel_check([0.5], [Interval(1.0, 1.0 + eps)], 1e-4)
        return [r for r in rows if r.check == "prop6"][0]

    a, b = one(1e-1), one(1e-2)
    assert b.lhs == pytest.approx(a.lhs / 100, rel=0.1)
    assert b.extra["series_bound"] == pytest.approx(a.extra["series_bound"] / 100, rel=0.1)


def _rows():
    return [BoundReport("thm31", 0.1, 1 / 3, True, g="sq", psi="id", mu=0.5, q=2.0, u=0.0, v=1.0,
                        notes='a "quoted", note', extra={"x": 1e-300, "flag": True}),
            BoundReport("prop6", 0.2, math.nan, False, g="bessel", psi="id", u=1.0, v=2.0)]


def test_emit_json_roundtrip(tmp_path):
    path = tmp_path / "r.json"
    emit_report([], "json", path)
    assert json.loads(path.read_text()) == []
    emit_report(_rows(), "json", path)
    data = json.loads(path.read_text())
    assert [tuple(d) for d in data] == [REPORT_KEYS] * 2
    assert data[0]["bound"] == 1 / 3 and data[0]["lhs"] == 0.1
    assert data[0]["holds"] is True and data[1]["bound"] is None and data[1]["mu"] is None
    assert data[0]["notes"].startswith('a "quoted", note')


def test_emit_csv_roundtrip(tmp_path):
    path = tmp_path / "r.csv"
    emit_report([], "csv", path)
    assert path.read_bytes() == (",".join(REPORT_KEYS) + "\r\n").encode()
    emit_report(_rows(), "csv", path)
    rows = list(csv.DictReader(io.StringIO(path.read_bytes().decode())))
    assert float(rows[0]["bound"]) == 1 / 3
    assert rows[0]["notes"].startswith('a "quoted", note')
    assert rows[1]["bound"] == "" and rows[1]["holds"] == "false"
    with pytest.raises(ValueError):
        render_report([], "xml")
