"""Finite-difference cross-check solver, weak-form residuals and run comparison."""

from .compare import ComparisonReport, compare
from .fd_solver import FDConfig, fd_advance, fd_diagnostics, grid_datum
from .weak_form import WeakFormReport, weak_form_residual

__all__ = [
    "FDConfig",
    "fd_advance",
    "fd_diagnostics",
    "grid_datum",
    "WeakFormReport",
    "weak_form_residual",
    "ComparisonReport",
    "compare",
]
