"""Adaptive exponential time integration with blow-up detection."""

from .adaptive import StepperConfig, advance
from .blowup import (
    BlowupFit,
    EntryBoundReport,
    blowup_outcome,
    entry_bound_report,
    estimate_blowup_time,
    fit_blowup_tail,
)
from .etdrk4 import ETDCoefficients, ETDStepper, etd_coefficients, step
from .trajectory import Checkpoint, Trajectory

__all__ = [
    "StepperConfig",
    "advance",
    "step",
    "ETDStepper",
    "ETDCoefficients",
    "etd_coefficients",
    "Trajectory",
    "Checkpoint",
    "BlowupFit",
    "EntryBoundReport",
    "fit_blowup_tail",
    "estimate_blowup_time",
    "blowup_outcome",
    "entry_bound_report",
]
