"""End-to-end runs through run_experiment and run_sweep."""

import json
import math

import numpy as np
import pandas as pd
import pytest

from thinfilm_lab.core.domain import DomainSpec, Outcome
from thinfilm_lab.integrator.adaptive import StepperConfig
from thinfilm_lab.lab.config import (
    ClassificationConfig,
    ExperimentConfig,
    OracleConfig,
    OutputsConfig,
    SweepConfig,
)
from thinfilm_lab.lab.datum import cosine_combo
from thinfilm_lab.lab.results_index import INDEX_COLUMNS, ResultsIndex
from thinfilm_lab.lab.runner import run_experiment
from thinfilm_lab.lab.sweep import SWEEP_INDEX_CSV, run_sweep
from thinfilm_lab.nehari.classify import Branch, Prediction
from thinfilm_lab.nehari.well_depth import OptimizerConfig
from thinfilm_lab.oracle.fd_solver import FDConfig

LIGHT_CLASSIFICATION = ClassificationConfig(
    lambda_alpha=False,
    optimizer=OptimizerConfig(n_single_modes=2, n_random_seeds=0, max_iter=400),
)


def experiment(tmp_path, amplitude, horizon, **overrides):
    values = dict(
        name=f"cos_A{amplitude}",
        domain=DomainSpec(a=math.pi, p=3.0, n_modes=32),
        datum=cosine_combo((1, amplitude)),
        stepper=StepperConfig(t_horizon=horizon, u_max=1e6),
        outputs=OutputsConfig(directory=str(tmp_path), plot=False),
        classification=LIGHT_CLASSIFICATION,
    )
    values.update(overrides)
    return ExperimentConfig(**values)


def test_twice_cosine_blows_up(tmp_path):
    result = run_experiment(experiment(tmp_path, 2.0, 10.0))
    traj = result.trajectory
    assert traj.outcome.kind is Outcome.BLOW_UP
    assert traj.s_minus_entry == 0.0
    assert traj.outcome.t_end < 10.0
    assert result.classification.branch is Branch.LOW_ENERGY_BLOW_UP
    assert result.consistent

    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["schema"] == 1
    assert summary["outcome"]["kind"] == "BlowUp"
    assert summary["s_minus_entry"] == 0.0
    assert summary["prediction_consistent"] is True
    assert summary["entry_bound"]["t0"] == 0.0
    assert summary["artifacts"]["csv"] == "trajectory.csv"


def test_half_cosine_decays(tmp_path):
    result = run_experiment(experiment(tmp_path, 0.5, 10.0))
    traj = result.trajectory
    assert traj.outcome.kind is Outcome.GLOBAL_HORIZON_REACHED
    assert traj.t_end == 10.0
    assert np.all(traj.column("I") >= 0)
    assert result.classification.predicted is Prediction.GLOBAL
    assert result.summary["identities"]["necessity_bound_violations"] == 0
    assert result.summary["identities"]["energy_increase_violations"] == 0
    assert result.summary["concavity"]["eta"] == pytest.approx(0.457107, abs=1e-6)


def test_repeat_runs_write_identical_csv(tmp_path):
    first = run_experiment(experiment(tmp_path / "one", 1.0, 1.0))
    second = run_experiment(experiment(tmp_path / "two", 1.0, 1.0))
    assert first.paths["csv"] != second.paths["csv"]
    assert (tmp_path / "one" / "trajectory.csv").read_bytes() == (tmp_path / "two" / "trajectory.csv").read_bytes()


def test_timings_stay_out_of_artifacts(tmp_path):
    result = run_experiment(experiment(tmp_path, 0.5, 0.1))
    assert result.timings["calls"]["advance"] == 1
    assert result.timings["seconds"]["advance"] >= 0.0
    assert "classify" in result.timings["seconds"]
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert "timings" not in summary


def test_run_without_writing(tmp_path):
    result = run_experiment(experiment(tmp_path / "unused", 0.5, 0.1), write=False)
    assert result.paths == {}
    assert not (tmp_path / "unused").exists()


def test_oracle_and_weak_form(tmp_path):
    oracle = OracleConfig(
        enabled=True,
        fd=FDConfig(n_points=256, dt=1e-3, t_horizon=0.1, stop_times=(0.05,)),
        weak_form=True,
        n_test=2,
        n_time=2,
    )
    cfg = experiment(
        tmp_path,
        0.5,
        0.1,
        stepper=StepperConfig(t_horizon=0.1, stop_times=(0.05,)),
        oracle=oracle,
    )
    result = run_experiment(cfg)
    comparison = result.summary["oracle"]["comparison"]
    assert comparison["outcomes_agree"] is True
    assert comparison["max_state_rel_diff"] < 1e-3
    assert result.weak_form.residuals.shape == (2, 2)
    assert (tmp_path / "fd_trajectory.csv").is_file()
    assert "fd_csv" in result.paths
    assert not (tmp_path / "fd_summary.json").exists()


def test_sweep_builds_an_index(tmp_path):
    base = experiment(tmp_path, 0.5, 1.0).to_dict()
    sweep = SweepConfig.from_dict(
        {
            "base": base,
            "grid": {"datum.terms": [[[1, 0.5]], [[1, 2.0]]]},
            "directory": str(tmp_path / "sweep"),
        }
    )
    result = run_sweep(sweep)
    assert not result.failed
    assert result.index_path == tmp_path / "sweep" / SWEEP_INDEX_CSV
    index = pd.read_csv(result.index_path)
    assert list(index.columns) == INDEX_COLUMNS
    assert index["name"].tolist() == ["run_000", "run_001"]
    assert index["outcome"].tolist() == ["GlobalHorizonReached", "BlowUp"]
    assert (index["n_samples"] > 1).all()
    assert index.loc[1, "min_I"] < 0 < index.loc[0, "min_I"]


def test_results_index_queries_csv_views(tmp_path):
    result = run_experiment(experiment(tmp_path, 0.5, 0.5))
    with ResultsIndex() as index:
        index.register_csv(tmp_path / "trajectory.csv", "decay")
        count = index.execute('SELECT COUNT(*) FROM "decay"').fetchone()[0]
        last_t = index.execute('SELECT MAX(t) FROM "decay"').fetchone()[0]
    assert count == len(result.trajectory)
    assert last_t == pytest.approx(0.5)
    with pytest.raises(FileNotFoundError):
        ResultsIndex().register_csv(tmp_path / "missing.csv", "missing")
