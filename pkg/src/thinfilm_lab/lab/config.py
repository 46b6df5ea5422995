"""Experiment and sweep configuration loaded from YAML documents.

A config file mirrors :class:`ExperimentConfig` field for field; unknown
keys at any level are rejected.
"""

import copy
import itertools
import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from ..core.domain import DomainSpec
from ..core.errors import ConfigFileError, ConfigInvalidError, InvalidDescriptorError
from ..integrator.adaptive import StepperConfig
from ..nehari.well_depth import OptimizerConfig
from ..oracle.fd_solver import FDConfig
from .datum import DatumDescriptor

logger = logging.getLogger(__name__)

SUITES = ("identities", "criterion", "crosscheck", "welldepth")


def _reject_unknown(data: Dict[str, Any], allowed, where: str) -> None:
    if not isinstance(data, dict):
        raise ConfigFileError(f"'{where}' must be a mapping, got {type(data).__name__}")
    unknown = set(data) - set(allowed)
    if unknown:
        raise ConfigFileError(f"Unknown keys in '{where}': {sorted(unknown)}")


@dataclass(frozen=True)
class OutputsConfig:
    """Run directory and optional artifact formats; the CSV is always written."""

    directory: str = "runs/run"
    parquet: bool = False
    plot: bool = True
    checkpoints: bool = False

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OutputsConfig":
        _reject_unknown(data, {f.name for f in fields(cls)}, "outputs")
        return cls(**data)

    @property
    def path(self) -> Path:
        return Path(self.directory)


@dataclass(frozen=True)
class OracleConfig:
    """Optional finite-difference cross-check and weak-form residuals."""

    enabled: bool = False
    fd: FDConfig = field(default_factory=FDConfig)
    weak_form: bool = False
    n_test: int = 8
    n_time: int = 8

    def to_dict(self) -> Dict[str, Any]:
        return {
            "enabled": self.enabled,
            "fd": self.fd.to_dict(),
            "weak_form": self.weak_form,
            "n_test": self.n_test,
            "n_time": self.n_time,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OracleConfig":
        _reject_unknown(data, {f.name for f in fields(cls)}, "oracle")
        values = dict(data)
        if "fd" in values:
            values["fd"] = FDConfig.from_dict(values["fd"] or {})
        return cls(**values)


@dataclass(frozen=True)
class ClassificationConfig:
    """Static prediction of the outcome from the initial datum."""

    enabled: bool = True
    lambda_alpha: bool = True
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "enabled": self.enabled,
            "lambda_alpha": self.lambda_alpha,
            "optimizer": self.optimizer.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ClassificationConfig":
        _reject_unknown(data, {f.name for f in fields(cls)}, "classification")
        values = dict(data)
        if "optimizer" in values:
            values["optimizer"] = OptimizerConfig.from_dict(values["optimizer"] or {})
        return cls(**values)


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation: domain, datum, stepper, outputs and optional extras."""

    domain: DomainSpec
    datum: DatumDescriptor
    stepper: StepperConfig = field(default_factory=StepperConfig)
    outputs: OutputsConfig = field(default_factory=OutputsConfig)
    suite: Optional[str] = None
    oracle: OracleConfig = field(default_factory=OracleConfig)
    classification: ClassificationConfig = field(default_factory=ClassificationConfig)
    name: str = "run"

    def __post_init__(self):
        if self.suite is not None and self.suite not in SUITES:
            raise ConfigInvalidError(f"Unknown suite {self.suite!r}; expected one of {list(SUITES)}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "domain": self.domain.to_dict(),
            "datum": self.datum.to_dict(),
            "stepper": self.stepper.to_dict(),
            "outputs": self.outputs.to_dict(),
            "suite": self.suite,
            "oracle": self.oracle.to_dict(),
            "classification": self.classification.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ExperimentConfig":
        _reject_unknown(data, {f.name for f in fields(cls)}, "experiment")
        if "domain" not in data or "datum" not in data:
            raise ConfigFileError("Experiment needs 'domain' and 'datum' sections")
        try:
            return cls(
                name=str(data.get("name", "run")),
                domain=DomainSpec.from_dict(data["domain"]),
                datum=DatumDescriptor.from_dict(data["datum"]),
                stepper=StepperConfig.from_dict(data.get("stepper") or {}),
                outputs=OutputsConfig.from_dict(data.get("outputs") or {}),
                suite=data.get("suite"),
                oracle=OracleConfig.from_dict(data.get("oracle") or {}),
                classification=ClassificationConfig.from_dict(data.get("classification") or {}),
            )
        except TypeError as e:
            raise ConfigFileError(f"Malformed experiment config: {e}") from e

    def with_outputs(self, directory: Union[str, Path]) -> "ExperimentConfig":
        return replace(self, outputs=replace(self.outputs, directory=str(directory)))


def _read_yaml(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    if not path.is_file():
        raise ConfigFileError(f"Config file not found: {path}")
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f)
    except yaml.YAMLError as e:
        raise ConfigFileError(f"Cannot parse {path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigFileError(f"{path} must contain a mapping at the top level")
    return data


def load_experiment(path: Union[str, Path]) -> ExperimentConfig:
    """Parse an experiment YAML file.

    Raises:
        ConfigFileError: for unreadable files, bad YAML or unknown keys.
        ConfigInvalidError: for values outside their valid ranges.
        InvalidDescriptorError: for a malformed datum section.
    """
    cfg = ExperimentConfig.from_dict(_read_yaml(path))
    logger.info(f"Loaded experiment '{cfg.name}' from {path}")
    return cfg


def ensure_output_directory(directory: Union[str, Path]) -> Path:
    """Create the run directory if needed and check that it is writable."""
    path = Path(directory)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigFileError(f"Cannot create output directory {path}: {e}") from e
    if not os.access(path, os.W_OK):
        raise ConfigFileError(f"Output directory is not writable: {path}")
    return path


def set_dotted(data: Dict[str, Any], dotted_key: str, value: Any) -> None:
    """Set ``data['a']['b'] = value`` for ``dotted_key='a.b'``, creating sections."""
    *parents, leaf = dotted_key.split(".")
    node = data
    for key in parents:
        child = node.get(key)
        if child is None:
            child = node[key] = {}
        if not isinstance(child, dict):
            raise ConfigFileError(f"Cannot override '{dotted_key}': '{key}' is not a section")
        node = child
    node[leaf] = value


@dataclass(frozen=True)
class SweepConfig:
    """A base experiment, a grid of dotted-key overrides and a worker count."""

    base: Dict[str, Any]
    grid: Tuple[Tuple[str, Tuple[Any, ...]], ...] = ()
    workers: int = 1
    directory: str = "runs/sweep"

    def __post_init__(self):
        if self.workers < 1:
            raise ConfigInvalidError(f"workers must be >= 1, got {self.workers}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any], base_dir: Optional[Path] = None) -> "SweepConfig":
        _reject_unknown(data, {"base", "grid", "workers", "directory"}, "sweep")
        base = data.get("base")
        if isinstance(base, str):
            base_path = Path(base)
            if base_dir is not None and not base_path.is_absolute():
                base_path = base_dir / base_path
            base = _read_yaml(base_path)
        if not isinstance(base, dict):
            raise ConfigFileError("Sweep needs a 'base' experiment (mapping or file path)")
        grid = data.get("grid") or {}
        if not isinstance(grid, dict):
            raise ConfigFileError("'grid' must map dotted keys to lists of values")
        for key, values in grid.items():
            if not isinstance(values, list) or not values:
                raise ConfigFileError(f"Grid entry '{key}' must be a non-empty list")
        return cls(
            base=base,
            grid=tuple((key, tuple(values)) for key, values in grid.items()),
            workers=int(data.get("workers", 1)),
            directory=str(data.get("directory", "runs/sweep")),
        )

    def expand(self) -> List[Tuple[str, ExperimentConfig]]:
        """One (run name, config) per point of the cartesian product of the grid."""
        keys = [key for key, _ in self.grid]
        runs = []
        for index, combo in enumerate(itertools.product(*(values for _, values in self.grid))):
            data = copy.deepcopy(self.base)
            for key, value in zip(keys, combo):
                set_dotted(data, key, value)
            name = f"run_{index:03d}"
            data["name"] = name
            set_dotted(data, "outputs.directory", str(Path(self.directory) / name))
            try:
                runs.append((name, ExperimentConfig.from_dict(data)))
            except (ConfigInvalidError, InvalidDescriptorError) as e:
                raise ConfigFileError(f"Sweep point {dict(zip(keys, combo))} is invalid: {e}") from e
        return runs


def load_sweep(path: Union[str, Path]) -> SweepConfig:
    path = Path(path)
    cfg = SweepConfig.from_dict(_read_yaml(path), base_dir=path.parent)
    logger.info(f"Loaded sweep from {path} with {len(cfg.grid)} grid axes")
    return cfg
