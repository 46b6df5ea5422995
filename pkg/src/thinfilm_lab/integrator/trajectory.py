"""Time series of diagnostics with optional state checkpoints."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

from ..core.domain import DomainSpec, GridField, RunOutcome, SpectralField
from ..core.errors import EmptyTrajectoryError
from ..functionals.diagnostics import CSV_COLUMNS, DiagnosticsSample


@dataclass(frozen=True)
class Checkpoint:
    """A stored state; spectral for the main solver, grid samples for the oracle."""

    t: float
    field: Union[SpectralField, GridField]


@dataclass
class Trajectory:
    """Accepted samples of one run, its checkpoints and its outcome."""

    samples: List[DiagnosticsSample]
    outcome: RunOutcome
    spec: DomainSpec
    checkpoints: List[Checkpoint] = field(default_factory=list)
    s_minus_entry: Optional[float] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        times = [sample.t for sample in self.samples]
        if any(later <= earlier for earlier, later in zip(times, times[1:])):
            raise ValueError("Sample times must be strictly increasing")
        if self.s_minus_entry is not None:
            entry = next((s for s in self.samples if s.I < 0), None)
            if entry is None or entry.t != self.s_minus_entry:
                raise ValueError(
                    f"s_minus_entry={self.s_minus_entry} is not the first sample with I < 0"
                )

    def __len__(self) -> int:
        return len(self.samples)

    def require_samples(self) -> None:
        if not self.samples:
            raise EmptyTrajectoryError("Trajectory has no samples")

    def column(self, name: str) -> np.ndarray:
        """One diagnostic as an array, in sample order."""
        return np.array([getattr(sample, name) for sample in self.samples], dtype=float)

    @property
    def times(self) -> np.ndarray:
        return self.column("t")

    @property
    def t_end(self) -> float:
        return self.samples[-1].t if self.samples else 0.0

    def to_frame(self) -> pd.DataFrame:
        """Samples as a DataFrame with the fixed CSV column order."""
        return pd.DataFrame([sample.to_row() for sample in self.samples], columns=CSV_COLUMNS)

    def checkpoint_times(self) -> List[float]:
        return [checkpoint.t for checkpoint in self.checkpoints]
