"""Quick runs of the numerical verification suites end to end."""

import json

import pytest

from thinfilm_lab.lab.verify import run_suite


def _assert_suite_passes(name, out_dir):
    report = run_suite(name, out_dir, quick=True)
    assert report.passed, [f"{c.name}: {c.value}" for c in report.failures]
    assert (out_dir / f"verify_{name}.md").exists()
    assert json.loads((out_dir / f"verify_{name}.json").read_text())
    return report


@pytest.mark.slow
def test_crosscheck_suite_passes(tmp_path):
    report = _assert_suite_passes("crosscheck", tmp_path)
    names = {c.name for c in report.checks}
    assert {"decaying: J rel diff", "A=2: blow-up time rel diff"} <= names


@pytest.mark.slow
def test_criterion_suite_passes(tmp_path):
    report = _assert_suite_passes("criterion", tmp_path)
    triggers = [c for c in report.checks if c.name.endswith(": trigger")]
    assert triggers
    assert any(c.name == "blow-up battery runtime" for c in report.checks)


@pytest.mark.slow
def test_welldepth_suite_passes(tmp_path):
    report = _assert_suite_passes("welldepth", tmp_path)
    assert any(c.name == "N=32 vs N=64" for c in report.checks)
