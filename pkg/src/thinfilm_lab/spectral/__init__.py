"""Operators of the semi-discrete cosine-spectral system."""

from .operators import (
    LinearSymbol,
    dealiasing_note,
    fourth_derivative,
    nonlinear_source,
    padded_values,
    power_source,
    rhs,
    rhs_coefficients,
    second_derivative,
    source_coefficients,
)

__all__ = [
    "LinearSymbol",
    "second_derivative",
    "fourth_derivative",
    "nonlinear_source",
    "rhs",
    "rhs_coefficients",
    "source_coefficients",
    "padded_values",
    "power_source",
    "dealiasing_note",
]
