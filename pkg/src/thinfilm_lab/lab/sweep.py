"""Parameter sweeps: one experiment per grid point, each in its own directory."""

import concurrent.futures
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from ..core.errors import LabError
from .config import ExperimentConfig, SweepConfig, ensure_output_directory
from .results_index import build_sweep_index
from .runner import run_experiment

logger = logging.getLogger(__name__)

SWEEP_INDEX_CSV = "sweep_index.csv"


@dataclass
class SweepResult:
    runs: List[Dict[str, Any]] = field(default_factory=list)
    index_path: Optional[Path] = None

    @property
    def failed(self) -> List[Dict[str, Any]]:
        return [run for run in self.runs if run.get("error")]


def run_one(name: str, cfg: ExperimentConfig) -> Dict[str, Any]:
    """Run a single sweep point; errors are captured, not raised."""
    try:
        result = run_experiment(cfg)
    except LabError as e:
        logger.error(f"Sweep run {name} failed: {e}")
        return {"name": name, "error": f"{type(e).__name__}: {e}"}
    outcome = result.trajectory.outcome
    return {
        "name": name,
        "csv": result.paths.get("csv"),
        "summary": result.paths.get("summary"),
        "outcome": outcome.kind.value,
        "t_end": outcome.t_end,
        "blowup_time_estimate": outcome.blowup_time_estimate,
        "s_minus_entry": result.trajectory.s_minus_entry,
        "consistent": result.consistent,
    }


def run_sweep(cfg: SweepConfig, workers: Optional[int] = None) -> SweepResult:
    """Expand the grid, run every point and index the results with DuckDB.

    Runs fan out over a process pool when more than one worker is requested;
    results are collected in grid order either way.
    """
    points = cfg.expand()
    workers = workers or cfg.workers
    root = ensure_output_directory(cfg.directory)
    logger.info(f"Sweep of {len(points)} runs into {root} with {workers} worker(s)")

    if workers <= 1 or len(points) <= 1:
        runs = [run_one(name, point) for name, point in points]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=min(workers, len(points))) as executor:
            runs = list(executor.map(run_one, *zip(*points)))

    result = SweepResult(runs=runs)
    if any(run.get("csv") for run in runs):
        result.index_path = root / SWEEP_INDEX_CSV
        build_sweep_index(runs, result.index_path)
    if result.failed:
        logger.warning(f"{len(result.failed)} of {len(runs)} sweep runs failed")
    return result
