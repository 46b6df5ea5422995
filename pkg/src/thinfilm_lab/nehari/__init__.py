"""Nehari projection, well depth, Λ_α bounds and the blow-up classifier."""

from .classify import (
    Branch,
    ClassificationReport,
    Prediction,
    assign_branch,
    classify_initial_datum,
    prediction_consistent,
    reconcile_with_run,
)
from .lambda_alpha import LambdaAlphaEstimate, estimate_lambda_alpha, lambda_alpha_curve
from .projection import NehariLandscape, nehari_radius, project_to_nehari, reduced_energy
from .well_depth import (
    OptimizerConfig,
    WellDepthEstimate,
    cached_well_depth,
    estimate_well_depth,
    single_mode_bound,
)

__all__ = [
    "project_to_nehari",
    "reduced_energy",
    "nehari_radius",
    "NehariLandscape",
    "OptimizerConfig",
    "WellDepthEstimate",
    "estimate_well_depth",
    "cached_well_depth",
    "single_mode_bound",
    "LambdaAlphaEstimate",
    "estimate_lambda_alpha",
    "lambda_alpha_curve",
    "Branch",
    "Prediction",
    "ClassificationReport",
    "assign_branch",
    "classify_initial_datum",
    "reconcile_with_run",
    "prediction_consistent",
]
