"""Run artifacts: trajectory CSV/Parquet, summary JSON, plot script, checkpoints."""

import json
import logging
import math
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from ..core.domain import GridField
from ..core.errors import VerificationFailure
from ..integrator.trajectory import Trajectory
from .config import OutputsConfig

logger = logging.getLogger(__name__)

SUMMARY_SCHEMA = 1
CSV_FLOAT_FORMAT = "%.17g"

TRAJECTORY_CSV = "trajectory.csv"
TRAJECTORY_PARQUET = "trajectory.parquet"
SUMMARY_JSON = "summary.json"
PLOT_SCRIPT = "plot_trajectory.py"
CHECKPOINTS_NPZ = "checkpoints.npz"

PLOT_TEMPLATE = '''#!/usr/bin/env python3
"""Plot the diagnostics of run {name!r} from {csv_name}."""

from pathlib import Path

import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

HERE = Path(__file__).resolve().parent
OUT = Path(__file__).resolve().with_suffix(".html")
PANELS = [("J", "energy J"), ("I", "Nehari value I"), ("l2sq", "||u||_2^2"), ("h2sq", "||u_xx||_2^2")]


def main():
    df = pd.read_csv(HERE / "{csv_name}")
    fig = make_subplots(rows=2, cols=2, subplot_titles=[title for _, title in PANELS])
    for index, (column, title) in enumerate(PANELS):
        fig.add_trace(
            go.Scatter(x=df["t"], y=df[column], mode="lines", name=title),
            row=index // 2 + 1,
            col=index % 2 + 1,
        )
    fig.add_hline(y=0.0, line_dash="dot", row=1, col=2)
    fig.update_layout(title="{name}: {outcome}", height=700, showlegend=False)
    fig.write_html(OUT)
    print(f"Wrote {{OUT}}")


if __name__ == "__main__":
    main()
'''


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return str(value)
    return value


def check_rows(traj: Trajectory) -> None:
    """Re-validate the algebraic invariants of every sample before writing."""
    problems = []
    for sample in traj.samples:
        problems.extend(sample.invariant_violations(traj.spec.p))
    if problems:
        logger.error(f"{len(problems)} sample rows violate their invariants")
        raise VerificationFailure("Refusing to write inconsistent samples: " + "; ".join(problems[:5]))


def write_trajectory_csv(traj: Trajectory, path: Path) -> Path:
    check_rows(traj)
    traj.to_frame().to_csv(path, index=False, float_format=CSV_FLOAT_FORMAT, encoding="ascii")
    return path


def write_trajectory_parquet(traj: Trajectory, path: Path) -> Path:
    traj.to_frame().to_parquet(path, engine="pyarrow", index=False)
    return path


def write_summary(summary: Dict[str, Any], path: Path) -> Path:
    document = {"schema": SUMMARY_SCHEMA, **summary}
    with open(path, "w", encoding="ascii") as f:
        json.dump(to_jsonable(document), f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")
    return path


def read_summary(path: Path) -> Dict[str, Any]:
    with open(path, "r", encoding="ascii") as f:
        return json.load(f)


def write_plot_script(path: Path, csv_name: str, name: str, outcome: str) -> Path:
    path.write_text(PLOT_TEMPLATE.format(name=name, csv_name=csv_name, outcome=outcome))
    return path


def write_checkpoints(traj: Trajectory, path: Path) -> Optional[Path]:
    """Checkpoint times and states; grid samples for the FD solver, coefficients otherwise."""
    if not traj.checkpoints:
        logger.warning("No checkpoints stored; skipping checkpoint archive")
        return None
    is_grid = isinstance(traj.checkpoints[0].field, GridField)
    states = np.array(
        [c.field.values if is_grid else c.field.coeffs for c in traj.checkpoints]
    )
    np.savez(
        path,
        t=np.array(traj.checkpoint_times()),
        states=states,
        representation=np.array("grid" if is_grid else "cosine"),
        a=traj.spec.a,
        p=traj.spec.p,
    )
    return path


def load_trajectory_frame(path: Path) -> pd.DataFrame:
    return pd.read_csv(path)


class ArtifactWriter:
    """Writes the enabled artifact formats of one run into its directory."""

    def __init__(self, directory: Path, outputs: OutputsConfig):
        self.directory = Path(directory)
        self.outputs = outputs

    def export(self, traj: Trajectory, summary: Optional[Dict[str, Any]], name: str, prefix: str = "") -> Dict[str, str]:
        """Write every enabled format; returns artifact kind -> path."""
        written = {"csv": write_trajectory_csv(traj, self.directory / f"{prefix}{TRAJECTORY_CSV}")}
        if self.outputs.parquet:
            written["parquet"] = write_trajectory_parquet(
                traj, self.directory / f"{prefix}{TRAJECTORY_PARQUET}"
            )
        if self.outputs.checkpoints:
            archive = write_checkpoints(traj, self.directory / f"{prefix}{CHECKPOINTS_NPZ}")
            if archive is not None:
                written["checkpoints"] = archive
        if self.outputs.plot:
            written["plot"] = write_plot_script(
                self.directory / f"{prefix}{PLOT_SCRIPT}",
                csv_name=written["csv"].name,
                name=name,
                outcome=traj.outcome.kind.value,
            )
        paths = {kind: str(path) for kind, path in written.items()}
        if summary is not None:
            summary = {**summary, "artifacts": {kind: Path(p).name for kind, p in paths.items()}}
            paths["summary"] = str(write_summary(summary, self.directory / f"{prefix}{SUMMARY_JSON}"))
        logger.info(f"Wrote {', '.join(sorted(paths))} to {self.directory}")
        return paths
