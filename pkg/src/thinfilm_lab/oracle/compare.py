"""Side-by-side comparison of two trajectories of the same problem."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from ..core.domain import GridField, SpectralField
from ..core.errors import DisjointRangesError
from ..core.transforms import to_spectral
from ..integrator.trajectory import Checkpoint, Trajectory

logger = logging.getLogger(__name__)

SERIES = ("J", "I", "l2")
TIME_MATCH_RTOL = 1e-9


@dataclass
class ComparisonReport:
    """Relative differences between two runs over their common time range."""

    overlap: tuple
    series_max_rel_diff: Dict[str, float]
    state_rel_diffs: List[Dict[str, float]] = field(default_factory=list)
    outcome_a: str = ""
    outcome_b: str = ""
    blowup_time_rel_diff: Optional[float] = None

    @property
    def outcomes_agree(self) -> bool:
        return self.outcome_a == self.outcome_b

    @property
    def max_state_rel_diff(self) -> Optional[float]:
        if not self.state_rel_diffs:
            return None
        return max(entry["rel_l2"] for entry in self.state_rel_diffs)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "overlap": list(self.overlap),
            "series_max_rel_diff": dict(self.series_max_rel_diff),
            "state_rel_diffs": list(self.state_rel_diffs),
            "max_state_rel_diff": self.max_state_rel_diff,
            "outcome_a": self.outcome_a,
            "outcome_b": self.outcome_b,
            "outcomes_agree": self.outcomes_agree,
            "blowup_time_rel_diff": self.blowup_time_rel_diff,
        }


def _series(traj: Trajectory, name: str) -> np.ndarray:
    if name == "l2":
        return np.sqrt(traj.column("l2sq"))
    return traj.column(name)


def relative_difference(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a-b| / max(|a|, |b|), with 0/0 taken as 0."""
    scale = np.maximum(np.abs(a), np.abs(b))
    diff = np.abs(a - b)
    out = np.zeros_like(diff)
    nonzero = scale > 0
    out[nonzero] = diff[nonzero] / scale[nonzero]
    return out


def _checkpoint_coeffs(checkpoint: Checkpoint, traj: Trajectory) -> np.ndarray:
    state = checkpoint.field
    if isinstance(state, GridField):
        state = to_spectral(state, traj.spec)
    return np.asarray(state.coeffs, dtype=float)


def _state_differences(traj_a: Trajectory, traj_b: Trajectory, lo: float, hi: float) -> List[Dict[str, float]]:
    diffs = []
    remaining = list(traj_b.checkpoints)
    for checkpoint in traj_a.checkpoints:
        if not lo <= checkpoint.t <= hi:
            continue
        match = next(
            (
                other
                for other in remaining
                if abs(other.t - checkpoint.t) <= TIME_MATCH_RTOL * max(1.0, abs(checkpoint.t))
            ),
            None,
        )
        if match is None:
            continue
        coeffs_a = _checkpoint_coeffs(checkpoint, traj_a)
        coeffs_b = _checkpoint_coeffs(match, traj_b)
        n_modes = min(coeffs_a.size, coeffs_b.size) + 1
        coeffs_a = SpectralField(coeffs_a).resized(n_modes).coeffs
        coeffs_b = SpectralField(coeffs_b).resized(n_modes).coeffs
        reference = float(np.linalg.norm(coeffs_b))
        gap = float(np.linalg.norm(coeffs_a - coeffs_b))
        rel = gap / reference if reference > 0 else gap
        diffs.append({"t": float(checkpoint.t), "rel_l2": rel})
    return diffs


def compare(traj_a: Trajectory, traj_b: Trajectory) -> ComparisonReport:
    """Compare J, I and ‖u‖₂ series, matching checkpoints and outcomes.

    Series are compared at the sample times of the coarser run (fewer
    samples on the overlap); the finer run is interpolated onto them.

    Raises:
        DisjointRangesError: if the runs share no time interval.
    """
    traj_a.require_samples()
    traj_b.require_samples()
    times_a, times_b = traj_a.times, traj_b.times
    lo = max(times_a[0], times_b[0])
    hi = min(times_a[-1], times_b[-1])
    if lo > hi:
        raise DisjointRangesError(
            f"Time ranges [{times_a[0]}, {times_a[-1]}] and [{times_b[0]}, {times_b[-1]}] do not overlap"
        )

    in_a = (times_a >= lo) & (times_a <= hi)
    in_b = (times_b >= lo) & (times_b <= hi)
    fine, coarse, coarse_mask = (traj_a, traj_b, in_b) if in_a.sum() >= in_b.sum() else (traj_b, traj_a, in_a)
    target = coarse.times[coarse_mask]
    series_diff = {}
    for name in SERIES:
        on_coarse = _series(coarse, name)[coarse_mask]
        on_fine = np.interp(target, fine.times, _series(fine, name))
        rel = relative_difference(on_fine, on_coarse)
        series_diff[name] = float(rel.max()) if rel.size else 0.0

    blowup_diff = None
    if traj_a.outcome.is_blowup and traj_b.outcome.is_blowup:
        blowup_diff = float(
            relative_difference(
                np.array([traj_a.outcome.blowup_time_estimate]),
                np.array([traj_b.outcome.blowup_time_estimate]),
            )[0]
        )

    report = ComparisonReport(
        overlap=(float(lo), float(hi)),
        series_max_rel_diff=series_diff,
        state_rel_diffs=_state_differences(traj_a, traj_b, lo, hi),
        outcome_a=traj_a.outcome.kind.value,
        outcome_b=traj_b.outcome.kind.value,
        blowup_time_rel_diff=blowup_diff,
    )
    if not report.outcomes_agree:
        logger.warning(f"Outcome kinds disagree: {report.outcome_a} vs {report.outcome_b}")
    logger.info(
        f"Compared runs on [{lo:.6g}, {hi:.6g}]: J diff {series_diff['J']:.3e}, "
        f"state diff {report.max_state_rel_diff}"
    )
    return report
