import pytest

import run_checks as script
from heatkernel.checks import CHECKS, CheckResult, run_checks
from heatkernel.checks import constant_a


def test_script_lists_the_registry(capsys):
    assert script.main(["--list"]) == 0
    assert capsys.readouterr().out.split() == list(CHECKS)


def test_script_exit_status_follows_the_results(monkeypatch, capsys):
    monkeypatch.setattr(script, "run_checks", lambda names, suite, progress: [CheckResult("a", True, "ok"),
                                                                                CheckResult("b", False, "off")])
    assert script.main(["--only", "constant_a"]) == 1
    monkeypatch.setattr(script, "run_checks", lambda names, suite, progress: [CheckResult("a", True, "ok")])
    assert script.main([]) == 0
    assert "1 passed, 0 failed" in capsys.readouterr().err


def test_summary_goes_to_stderr(capsys):
    script.main(["--only", "constant_a"])
    captured = capsys.readouterr()
    assert captured.out == ""
    assert "constant_a" in captured.err


def test_constant_a_large_time_value_is_exact():
    res = constant_a.run()
    assert res.passed
    assert res.metrics["large_time_limit"] == pytest.approx(1.02, rel=1e-10)
    assert res.metrics["small_time_limit"] == pytest.approx(1.0, abs=5e-3)


def test_raising_check_is_reported_as_failed(monkeypatch):
    def boom(suite="fast"):
        raise RuntimeError("no convergence")
    monkeypatch.setattr(constant_a, "run", boom)
    [res] = run_checks(["constant_a"])
    assert not res.passed
    assert "RuntimeError" in res.detail
