"""Trajectory CSV, summary JSON, plot script and checkpoint archive."""

import json
import math
from dataclasses import replace

import numpy as np
import pandas as pd
import pytest

from thinfilm_lab.core.domain import Outcome
from thinfilm_lab.core.errors import VerificationFailure
from thinfilm_lab.functionals.diagnostics import CSV_COLUMNS
from thinfilm_lab.lab.artifacts import (
    ArtifactWriter,
    read_summary,
    to_jsonable,
    write_summary,
    write_trajectory_csv,
)
from thinfilm_lab.lab.config import OutputsConfig


def test_to_jsonable():
    data = {
        "nan": float("nan"),
        "inf": np.float64(np.inf),
        "value": np.float64(1.5),
        "count": np.int64(3),
        "flag": np.bool_(True),
        "kind": Outcome.BLOW_UP,
        "pair": (1, 2.0),
        "array": np.array([0.5, np.nan]),
    }
    assert to_jsonable(data) == {
        "nan": None,
        "inf": None,
        "value": 1.5,
        "count": 3,
        "flag": True,
        "kind": "BlowUp",
        "pair": [1, 2.0],
        "array": [0.5, None],
    }


def test_summary_schema_and_sorting(tmp_path):
    path = write_summary({"b": 1, "a": math.nan}, tmp_path / "summary.json")
    text = path.read_text()
    assert text.index('"a"') < text.index('"b"') < text.index('"schema"')
    assert read_summary(path) == {"schema": 1, "a": None, "b": 1}


def test_csv_keeps_full_precision(tmp_path, decay_trajectory):
    path = write_trajectory_csv(decay_trajectory, tmp_path / "trajectory.csv")
    header = path.read_text(encoding="ascii").splitlines()[0]
    assert header.split(",") == CSV_COLUMNS
    frame = pd.read_csv(path, float_precision="round_trip")
    pd.testing.assert_frame_equal(frame, decay_trajectory.to_frame(), check_dtype=False)


def test_inconsistent_rows_are_refused(tmp_path, decay_trajectory):
    samples = list(decay_trajectory.samples)
    samples[3] = replace(samples[3], I=samples[3].I + 1.0)
    broken = replace(decay_trajectory, samples=samples)
    with pytest.raises(VerificationFailure):
        write_trajectory_csv(broken, tmp_path / "trajectory.csv")
    assert not (tmp_path / "trajectory.csv").exists()


def test_writer_exports_enabled_formats(tmp_path, decay_trajectory):
    outputs = OutputsConfig(directory=str(tmp_path), plot=True, checkpoints=True)
    paths = ArtifactWriter(tmp_path, outputs).export(decay_trajectory, {"name": "decay"}, name="decay")
    assert set(paths) == {"csv", "plot", "checkpoints", "summary"}

    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["artifacts"] == {
        "csv": "trajectory.csv",
        "plot": "plot_trajectory.py",
        "checkpoints": "checkpoints.npz",
    }

    script = (tmp_path / "plot_trajectory.py").read_text()
    compile(script, "plot_trajectory.py", "exec")
    assert "trajectory.csv" in script
    assert "GlobalHorizonReached" in script

    with np.load(tmp_path / "checkpoints.npz") as archive:
        assert archive["t"].tolist() == decay_trajectory.checkpoint_times()
        assert archive["states"].shape == (len(decay_trajectory.checkpoints), decay_trajectory.spec.n_coeffs)
        assert str(archive["representation"]) == "cosine"


def test_prefix_and_no_summary(tmp_path, decay_trajectory):
    outputs = OutputsConfig(directory=str(tmp_path), plot=False)
    paths = ArtifactWriter(tmp_path, outputs).export(decay_trajectory, None, name="fd", prefix="fd_")
    assert set(paths) == {"csv"}
    assert (tmp_path / "fd_trajectory.csv").is_file()
