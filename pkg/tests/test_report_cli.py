import json

import pytest

from tubebergman import cli
from tubebergman.report import (CheckReport, dumps_report, emit_report, make_check, parse_report,
                                tolerance)
from tubebergman.suites import SuiteConfig, run_suite
from tubebergman.errors import ConfigError


def sample_reports():
    return [
        make_check("a.real", "K(i,i) = c_alpha", 0.25, 0.2500001, "PAPER", stderr=1e-7),
        make_check("a.complex", "f = P f", 1 + 2j, 1.01 + 1.99j, "DERIVED", stderr=0.002),
        make_check("a.count", "violations", 0, 3, "TRIVIAL", tol=0, diagnostic=True, note="x, y"),
    ]


def test_tolerance_rule():
    assert tolerance(10.0, 0.5, 0.02) == 1.5
    assert tolerance(10.0, 0.01, 0.02) == pytest.approx(0.2)
    assert tolerance(0.0, 0.0, 0.02, abs_tol=1e-12) == 1e-12
    r = make_check("x", "a", 1.0, 1.05, "PAPER")
    assert not r.passed and r.tol == pytest.approx(0.02)
    assert make_check("x", "a", 1.0, float("nan"), "PAPER").passed is False


def test_provenance_validated():
    with pytest.raises(ValueError):
        CheckReport("x", "a", 1.0, "GUESS", 1.0)
    assert make_check("x", "a", 1, 1, "DERIVED: corrected").passed


@pytest.mark.parametrize("fmt", ["json", "csv"])
def test_round_trip(fmt):
    reps = sample_reports()
    back = parse_report(dumps_report(reps, fmt, "s", {"n": 1}), fmt)
    assert back == reps


def test_json_and_csv_agree_and_empty():
    reps = sample_reports()
    assert parse_report(dumps_report(reps, "json"), "json") == parse_report(dumps_report(reps, "csv"), "csv")
    doc = json.loads(dumps_report([], "json", "empty"))
    assert doc["checks"] == [] and doc["all_pass"] is True
    assert parse_report(dumps_report([], "csv"), "csv") == []
    with pytest.raises(ValueError):
        dumps_report(reps, "xml")


def test_all_pass_ignores_diagnostics():
    doc = json.loads(dumps_report(sample_reports()[:1] + sample_reports()[2:], "json"))
    assert doc["all_pass"] is True


def test_emit_report_error_names_path(tmp_path):
    bad = tmp_path / "missing" / "r.json"
    with pytest.raises(OSError, match="missing"):
        emit_report(sample_reports(), "json", bad)
    good = tmp_path / "r.csv"
    emit_report(sample_reports(), "csv", good)
    assert parse_report(good.read_text(), "csv") == sample_reports()


def test_suite_config_validation():
    with pytest.raises(ConfigError):
        SuiteConfig("nope")
    with pytest.raises(ConfigError):
        SuiteConfig("metric", alpha=-1.0)
    with pytest.raises(ConfigError):
        SuiteConfig("metric", n=0)
    with pytest.raises(ConfigError):
        SuiteConfig("metric", samples=0)


def test_cli_exit_codes(tmp_path, capsys, monkeypatch):
    out = tmp_path / "id.json"
    assert cli.main(["identities", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["suite"] == "identities" and doc["all_pass"] is True
    assert cli.main(["metric", "--alpha", "-2"]) == 2
    assert cli.main(["identities", "--out", str(tmp_path / "no" / "x.json")]) == 2
    assert cli.main(["metric", "--rel-tol", "0"]) == 2
    capsys.readouterr()
    monkeypatch.setattr(cli, "run_suite", lambda c: sample_reports())
    assert cli.main(["identities", "--out", str(out)]) == 0
    monkeypatch.setattr(cli, "run_suite", lambda c: sample_reports()[:1] + [
        make_check("bad", "x", 1.0, 2.0, "PAPER")])
    assert cli.main(["identities", "--out", str(out)]) == 1
    assert "FAIL bad" in capsys.readouterr().err
    assert json.loads(out.read_text())["all_pass"] is False


def test_unknown_suite_rejected_before_work(monkeypatch, capsys):
    called = []
    monkeypatch.setattr(cli, "run_suite", lambda c: called.append(c) or [])
    assert cli.main(["bogus"]) == 2
    assert not called
    assert "bogus" in capsys.readouterr().err


def test_seed_precedence(monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    assert cli.resolve_seed(None) == cli.DEFAULT_SEED
    monkeypatch.setenv(cli.SEED_ENV, "17")
    assert cli.resolve_seed(None) == 17
    assert cli.resolve_seed(5) == 5
    monkeypatch.setenv(cli.SEED_ENV, "abc")
    with pytest.raises(ConfigError):
        cli.resolve_seed(None)
    assert cli.main(["identities"]) == 2


def test_byte_identical_reports(tmp_path, monkeypatch):
    monkeypatch.delenv(cli.SEED_ENV, raising=False)
    paths = []
    for k in range(2):
        p = tmp_path / f"r{k}.csv"
        cli.main(["metric", "--samples", "4000", "--no-timing", "--format", "csv", "--out", str(p)])
        paths.append(p.read_bytes())
    assert paths[0] == paths[1]
    p = tmp_path / "jobs.csv"
    cli.main(["metric", "--samples", "4000", "--no-timing", "--format", "csv", "--jobs", "4",
              "--out", str(p)])
    assert p.read_bytes() == paths[0]
    other = tmp_path / "s.csv"
    cli.main(["metric", "--samples", "4000", "--no-timing", "--format", "csv", "--seed", "1",
              "--out", str(other)])
    assert other.read_bytes() != paths[0]


def test_jobs_keep_order():
    one = run_suite(SuiteConfig("identities", jobs=1))
    many = run_suite(SuiteConfig("identities", jobs=4))
    assert [r.id for r in one] == [r.id for r in many]
    assert [r.observed for r in one] == [r.observed for r in many]


def test_errors_become_failed_checks(monkeypatch):
    from tubebergman import suites

    def broken():
        raise RuntimeError("broken")

    monkeypatch.setitem(suites.SUITES, "identities", lambda c: [("identities.ok", lambda: []),
                                                                ("identities.boom", broken)])
    reps = run_suite(SuiteConfig("identities"))
    assert len(reps) == 1 and not reps[0].passed and "broken" in reps[0].note
    assert reps[0].id == "identities.boom"

    def bad_builder(config):
        raise RuntimeError("no setup")

    monkeypatch.setitem(suites.SUITES, "identities", bad_builder)
    reps = run_suite(SuiteConfig("identities"))
    assert len(reps) == 1 and "no setup" in reps[0].note
