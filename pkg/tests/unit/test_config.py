"""YAML experiment and sweep configuration."""

import math
from pathlib import Path

import pytest
import yaml

from thinfilm_lab.core.errors import ConfigFileError, ConfigInvalidError
from thinfilm_lab.lab.config import (
    ExperimentConfig,
    SweepConfig,
    ensure_output_directory,
    load_experiment,
    load_sweep,
    set_dotted,
)

BASE = {
    "name": "decay",
    "domain": {"a": "pi", "p": 3, "n_modes": 32},
    "datum": {"family": "cosine_combo", "terms": [[1, 0.5]]},
    "stepper": {"t_horizon": 1.0},
}


def write_yaml(path: Path, data) -> Path:
    path.write_text(yaml.safe_dump(data))
    return path


class TestExperiment:
    def test_load(self, tmp_path):
        cfg = load_experiment(write_yaml(tmp_path / "run.yaml", BASE))
        assert cfg.name == "decay"
        assert cfg.domain.a == pytest.approx(math.pi)
        assert cfg.domain.n_modes == 32
        assert cfg.stepper.t_horizon == 1.0
        assert cfg.outputs.plot is True
        assert cfg.oracle.enabled is False

    def test_dict_round_trip(self, tmp_path):
        cfg = load_experiment(write_yaml(tmp_path / "run.yaml", BASE))
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_with_outputs(self, tmp_path):
        cfg = load_experiment(write_yaml(tmp_path / "run.yaml", BASE)).with_outputs(tmp_path / "out")
        assert cfg.outputs.path == tmp_path / "out"

    @pytest.mark.parametrize(
        "patch, error",
        [
            ({"colour": "red"}, ConfigFileError),
            ({"outputs": {"csv": True}}, ConfigFileError),
            ({"stepper": {"horizon": 1.0}}, ConfigInvalidError),
            ({"stepper": {"dt_init": 1.0, "dt_max": 0.1}}, ConfigInvalidError),
            ({"domain": {"a": "pi", "p": 0.5}}, ConfigInvalidError),
            ({"suite": "everything"}, ConfigInvalidError),
        ],
    )
    def test_invalid(self, tmp_path, patch, error):
        with pytest.raises(error):
            load_experiment(write_yaml(tmp_path / "run.yaml", {**BASE, **patch}))

    def test_missing_sections(self, tmp_path):
        with pytest.raises(ConfigFileError):
            load_experiment(write_yaml(tmp_path / "run.yaml", {"domain": BASE["domain"]}))

    def test_unreadable_files(self, tmp_path):
        with pytest.raises(ConfigFileError):
            load_experiment(tmp_path / "missing.yaml")
        broken = tmp_path / "broken.yaml"
        broken.write_text("domain: [unclosed\n")
        with pytest.raises(ConfigFileError):
            load_experiment(broken)
        listing = write_yaml(tmp_path / "list.yaml", [1, 2])
        with pytest.raises(ConfigFileError):
            load_experiment(listing)


class TestSweep:
    def test_expand(self, tmp_path):
        sweep = SweepConfig.from_dict(
            {
                "base": BASE,
                "grid": {"datum.terms": [[[1, 0.5]], [[1, 2.0]]], "domain.p": [2, 3]},
                "directory": str(tmp_path / "sweep"),
            }
        )
        runs = sweep.expand()
        assert [name for name, _ in runs] == ["run_000", "run_001", "run_002", "run_003"]
        assert [cfg.domain.p for _, cfg in runs] == [2.0, 3.0, 2.0, 3.0]
        assert runs[3][1].datum.terms == ((1, 2.0),)
        assert runs[1][1].outputs.path == tmp_path / "sweep" / "run_001"
        assert BASE["datum"]["terms"] == [[1, 0.5]]

    def test_base_from_relative_file(self, tmp_path):
        write_yaml(tmp_path / "base.yaml", BASE)
        path = write_yaml(tmp_path / "sweep.yaml", {"base": "base.yaml", "grid": {"domain.p": [3]}, "workers": 2})
        sweep = load_sweep(path)
        assert sweep.workers == 2
        assert len(sweep.expand()) == 1

    def test_invalid_point(self):
        sweep = SweepConfig.from_dict({"base": BASE, "grid": {"domain.p": [0.5]}})
        with pytest.raises(ConfigFileError):
            sweep.expand()

    @pytest.mark.parametrize(
        "data",
        [
            {"grid": {"domain.p": [3]}},
            {"base": BASE, "grid": {"domain.p": []}},
            {"base": BASE, "grid": ["domain.p"]},
            {"base": BASE, "seeds": 3},
        ],
    )
    def test_malformed(self, data):
        with pytest.raises(ConfigFileError):
            SweepConfig.from_dict(data)

    def test_workers(self):
        with pytest.raises(ConfigInvalidError):
            SweepConfig(base=BASE, workers=0)


def test_set_dotted():
    data = {"stepper": {"t_horizon": 1.0}, "name": "x"}
    set_dotted(data, "stepper.rel_tol", 1e-6)
    set_dotted(data, "oracle.fd.n_points", 512)
    assert data["stepper"] == {"t_horizon": 1.0, "rel_tol": 1e-6}
    assert data["oracle"] == {"fd": {"n_points": 512}}
    with pytest.raises(ConfigFileError):
        set_dotted(data, "name.first", "y")


def test_ensure_output_directory(tmp_path):
    target = ensure_output_directory(tmp_path / "a" / "b")
    assert target.is_dir()
