#!/usr/bin/env python3
"""Generate example experiment and sweep configurations under configs/."""

import sys
from pathlib import Path

import yaml

sys.path.append(str(Path(__file__).resolve().parents[2] / "src"))

from thinfilm_lab.core.domain import DomainSpec  # noqa: E402
from thinfilm_lab.lab.config import ExperimentConfig, OracleConfig, OutputsConfig  # noqa: E402
from thinfilm_lab.lab.datum import DatumDescriptor, cosine_combo  # noqa: E402
from thinfilm_lab.integrator.adaptive import StepperConfig  # noqa: E402
from thinfilm_lab.oracle.fd_solver import FDConfig  # noqa: E402


def create_experiments() -> dict:
    """Named example experiments on (0, pi) with p = 3."""
    spec = DomainSpec(a=3.141592653589793, p=3.0, n_modes=64)
    return {
        "decay_cos_A0.5": ExperimentConfig(
            name="decay_cos_A0.5",
            domain=spec,
            datum=cosine_combo((1, 0.5)),
            stepper=StepperConfig(t_horizon=10.0),
            outputs=OutputsConfig(directory="runs/decay_cos_A0.5", parquet=True),
        ),
        "blowup_cos_A2": ExperimentConfig(
            name="blowup_cos_A2",
            domain=spec,
            datum=cosine_combo((1, 2.0)),
            stepper=StepperConfig(t_horizon=10.0, checkpoint_stride=50),
            outputs=OutputsConfig(directory="runs/blowup_cos_A2", checkpoints=True),
        ),
        "nehari_scaled_1.2": ExperimentConfig(
            name="nehari_scaled_1.2",
            domain=spec,
            datum=DatumDescriptor(family="nehari_scaled", base=cosine_combo((1, 1.0)), multiplier=1.2),
            outputs=OutputsConfig(directory="runs/nehari_scaled_1.2"),
        ),
        "crosscheck_cos_A0.5": ExperimentConfig(
            name="crosscheck_cos_A0.5",
            domain=spec,
            datum=cosine_combo((1, 0.5)),
            stepper=StepperConfig(t_horizon=1.0, stop_times=(0.25, 0.5, 0.75)),
            outputs=OutputsConfig(directory="runs/crosscheck_cos_A0.5"),
            oracle=OracleConfig(
                enabled=True,
                fd=FDConfig(n_points=2048, dt=1e-3, t_horizon=1.0, stop_times=(0.25, 0.5, 0.75)),
            ),
        ),
    }


def create_sweep() -> dict:
    """Amplitude sweep of cos(x) across the Nehari point sqrt(4/3)."""
    return {
        "base": "decay_cos_A0.5.yaml",
        "grid": {"datum.terms": [[[1, 0.5]], [[1, 1.0]], [[1, 1.2]], [[1, 2.0]]]},
        "workers": 2,
        "directory": "runs/amplitude_sweep",
    }


def main():
    out_dir = Path("configs")
    out_dir.mkdir(exist_ok=True)
    for name, cfg in create_experiments().items():
        path = out_dir / f"{name}.yaml"
        with open(path, "w") as f:
            yaml.safe_dump(cfg.to_dict(), f, default_flow_style=False, sort_keys=False)
        print(f"Wrote {path}")
    path = out_dir / "amplitude_sweep.yaml"
    with open(path, "w") as f:
        yaml.safe_dump(create_sweep(), f, default_flow_style=False, sort_keys=False)
    print(f"Wrote {path}")


if __name__ == "__main__":
    main()
