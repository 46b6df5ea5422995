"""Experiment configuration, initial data, artifacts, suites and the CLI."""

from .config import (
    ClassificationConfig,
    ExperimentConfig,
    OracleConfig,
    OutputsConfig,
    SweepConfig,
    load_experiment,
    load_sweep,
)
from .datum import DatumDescriptor, build_datum, cosine_combo
from .runner import RunResult, classify_experiment, run_experiment
from .verify import SuiteReport, run_suite

__all__ = [
    "ExperimentConfig",
    "OutputsConfig",
    "OracleConfig",
    "ClassificationConfig",
    "SweepConfig",
    "load_experiment",
    "load_sweep",
    "DatumDescriptor",
    "build_datum",
    "cosine_combo",
    "RunResult",
    "run_experiment",
    "classify_experiment",
    "SuiteReport",
    "run_suite",
]
