"""The thinfilm-lab command line, driven through click's CliRunner."""

import json

import pytest
import yaml
from click.testing import CliRunner

from thinfilm_lab.lab.cli import main

SIMULATE = {
    "name": "cli_decay",
    "domain": {"a": "pi", "p": 3, "n_modes": 16},
    "datum": {"family": "cosine_combo", "terms": [[1, 0.5]]},
    "stepper": {"t_horizon": 0.2},
    "classification": {
        "lambda_alpha": False,
        "optimizer": {"n_single_modes": 2, "n_random_seeds": 0, "max_iter": 400},
    },
}


@pytest.fixture
def runner():
    return CliRunner()


def write_config(tmp_path, data, name="run.yaml"):
    data = {**data, "outputs": {"directory": str(tmp_path / "out"), "plot": False}}
    path = tmp_path / name
    path.write_text(yaml.safe_dump(data))
    return path


def test_simulate(runner, tmp_path):
    result = runner.invoke(main, ["simulate", str(write_config(tmp_path, SIMULATE))])
    assert result.exit_code == 0, result.output
    assert "GlobalHorizonReached" in result.output
    summary = json.loads((tmp_path / "out" / "summary.json").read_text())
    assert summary["name"] == "cli_decay"


def test_invalid_config_exits_with_usage_code(runner, tmp_path):
    path = write_config(tmp_path, {**SIMULATE, "stepper": {"t_horizon": -1.0}})
    result = runner.invoke(main, ["simulate", str(path)])
    assert result.exit_code == 2
    assert "ConfigInvalidError" in result.output


def test_missing_config(runner, tmp_path):
    result = runner.invoke(main, ["simulate", str(tmp_path / "nope.yaml")])
    assert result.exit_code == 2


def test_invalid_datum(runner, tmp_path):
    path = write_config(tmp_path, {**SIMULATE, "datum": {"family": "cosine_combo", "terms": [[40, 1.0]]}})
    result = runner.invoke(main, ["simulate", str(path)])
    assert result.exit_code == 2
    assert "InvalidDescriptorError" in result.output


def test_classify(runner, tmp_path):
    data = {**SIMULATE, "datum": {"family": "cosine_combo", "terms": [[1, 2.0]]}}
    result = runner.invoke(main, ["classify", str(write_config(tmp_path, data))])
    assert result.exit_code == 0, result.output
    assert "LowEnergyBlowUp" in result.output


def test_welldepth(runner):
    result = runner.invoke(main, ["welldepth", "--a", "pi", "--p", "3", "--modes", "16", "--seeds", "0"])
    assert result.exit_code == 0, result.output
    assert "d_hat" in result.output


def test_welldepth_rejects_bad_domain(runner):
    result = runner.invoke(main, ["welldepth", "--a", "-1", "--p", "3", "--modes", "16"])
    assert result.exit_code == 2


def test_unknown_suite(runner, tmp_path):
    result = runner.invoke(main, ["verify", "everything", "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_sweep(runner, tmp_path):
    base = write_config(tmp_path, SIMULATE, name="base.yaml")
    sweep = tmp_path / "sweep.yaml"
    sweep.write_text(
        yaml.safe_dump(
            {
                "base": base.name,
                "grid": {"datum.terms": [[[1, 0.5]], [[1, 0.25]]]},
                "directory": str(tmp_path / "sweep"),
            }
        )
    )
    result = runner.invoke(main, ["sweep", str(sweep), "--workers", "1"])
    assert result.exit_code == 0, result.output
    assert (tmp_path / "sweep" / "sweep_index.csv").is_file()


@pytest.mark.slow
def test_verify_identities_quick(runner, tmp_path):
    result = runner.invoke(main, ["verify", "identities", "--quick", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    assert "identities: PASS" in result.output
    assert (tmp_path / "verify_identities.md").is_file()
    report = json.loads((tmp_path / "verify_identities.json").read_text())
    assert report["passed"] is True
