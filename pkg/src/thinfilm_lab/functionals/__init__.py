"""Scalar functionals of a state and monitors over trajectories."""

from .diagnostics import (
    CSV_COLUMNS,
    DiagnosticsAccumulator,
    DiagnosticsSample,
    FieldNorms,
    energy_decomposition_residual,
    energy_J,
    h2_norm_sq,
    l2_norm_sq,
    lambda_star,
    linf_norm,
    lp_norm_pow,
    mass,
    nehari_I,
    sample_diagnostics,
    spectral_norms,
)
from .monitors import (
    ConcavityReport,
    MonotonicityReport,
    concavity_exponent,
    concavity_report,
    default_epsilon,
    energy_identity_residual,
    energy_increase_violations,
    epsilon_interval,
    l2_identity_residual,
    m_second_difference_residual,
    monotonicity_monitor,
    necessity_bound_violations,
)

__all__ = [
    "CSV_COLUMNS",
    "DiagnosticsSample",
    "DiagnosticsAccumulator",
    "FieldNorms",
    "mass",
    "energy_J",
    "nehari_I",
    "lambda_star",
    "l2_norm_sq",
    "h2_norm_sq",
    "lp_norm_pow",
    "linf_norm",
    "spectral_norms",
    "sample_diagnostics",
    "energy_decomposition_residual",
    "ConcavityReport",
    "MonotonicityReport",
    "energy_identity_residual",
    "l2_identity_residual",
    "m_second_difference_residual",
    "monotonicity_monitor",
    "concavity_report",
    "epsilon_interval",
    "default_epsilon",
    "concavity_exponent",
    "energy_increase_violations",
    "necessity_bound_violations",
]
