"""Suite bookkeeping and the fixed criterion battery."""

import math

import pytest

from thinfilm_lab.core.errors import ConfigInvalidError
from thinfilm_lab.lab.verify import SUITES, SuiteReport, closed_form_checks, criterion_battery, run_suite


def test_report_status_and_markdown():
    report = SuiteReport("demo", quick=True)
    report.add("first", 1e-12, "<= 1e-10", True)
    assert report.passed
    report.add("second", 0.5, "<= 0.1", False, "too large")
    assert not report.passed
    assert [c.name for c in report.failures] == ["second"]
    text = report.to_markdown()
    assert text.startswith("# verify demo (quick): FAIL")
    assert "- second: too large" in text
    assert "| second" in text


def test_closed_form_values_pass():
    report = SuiteReport("identities")
    closed_form_checks(report)
    assert len(report.checks) == 6
    assert report.passed


def test_criterion_battery_shape():
    battery = criterion_battery()
    assert len(battery) == 12
    assert sum(1 for *_, blowup in battery if blowup) == 6
    assert len({name for name, *_ in battery}) == 12
    assert {a for _, a, *_ in battery} == {math.pi, 2 * math.pi}
    assert {p for _, _, p, *_ in battery} == {2.0, 3.0}


def test_unknown_suite(tmp_path):
    assert set(SUITES) == {"identities", "criterion", "crosscheck", "welldepth"}
    with pytest.raises(ConfigInvalidError):
        run_suite("everything", tmp_path)
