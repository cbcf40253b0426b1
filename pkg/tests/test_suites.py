from __future__ import annotations

import re

import pytest

from fracfield import suites
from fracfield.errors import ConfigurationError, ConvergenceError
from fracfield.suites import SUITES, SuiteResult, run_suites

SUMMARY = re.compile(r"^SUITE (\w+) (PASS|FAIL) max_err=\S+$")

FAST_SUITES = ["fundamental_theorem", "axioms", "el_on_shell", "breaking_term", "commutation", "time_reversal"]


def test_summary_line_format():
    line = SuiteResult("axioms", True, 1.5e-12, 1e-9).summary_line()
    assert SUMMARY.match(line)
    assert line == "SUITE axioms PASS max_err=1.5e-12"


@pytest.mark.parametrize("name", FAST_SUITES)
def test_fast_suites_pass(name):
    (result,) = run_suites([name], seed=0)
    assert result.name == name
    assert result.passed, result.detail
    assert result.max_err < result.threshold


def test_action_variation_suite_passes():
    (result,) = run_suites(["action_variation"])
    assert result.passed, result.detail
    for label in ("off-shell scaling", "on-shell scaling", "on-shell translation", "on-shell classical translation"):
        assert label in result.detail


def test_seeded_runs_are_reproducible():
    first = run_suites(["axioms", "commutation"], seed=7)
    second = run_suites(["commutation", "axioms"], seed=7)
    assert [r.to_dict() for r in first] == [r.to_dict() for r in second]


def test_subset_does_not_shift_other_suites():
    alone = run_suites(["commutation"], seed=3)[0]
    together = [r for r in run_suites(["axioms", "commutation"], seed=3) if r.name == "commutation"][0]
    assert alone.max_err == together.max_err


def test_unknown_suite_rejected():
    with pytest.raises(ConfigurationError):
        run_suites(["no_such_suite"])


def test_numeric_failure_becomes_fail(monkeypatch):
    def broken(rng):
        raise ConvergenceError("ladder diverged", estimate=1.0)

    monkeypatch.setitem(SUITES, "axioms", broken)
    (result,) = suites.run_suites(["axioms"])
    assert not result.passed
    assert result.summary_line().startswith("SUITE axioms FAIL")
    assert "ConvergenceError" in result.detail
