"""Time-integrated weak-form residuals of a stored trajectory.

For φ(x, s) = cos(kπx/a) ψ_m(s), with ψ_m interior hat functions that
vanish at both ends of the run, integration by parts in time turns the
weak form into

    (a/2) [ -∫ψ_m' c_k ds + ∫ψ_m (λ_k c_k - f_k) ds ] = 0

where f_k are the coefficients of the mean-free source. Checkpoint
states are interpolated linearly in time and every product is integrated
exactly on the union of checkpoint times and hat nodes, so residuals
shrink with the square of the checkpoint spacing.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List

import numpy as np

from ..core.domain import DomainSpec, GridField, SpectralField
from ..core.errors import NoCheckpointsError
from ..core.transforms import cosine_analysis, to_spectral
from ..integrator.trajectory import Trajectory
from ..spectral.operators import padded_values, power_source

logger = logging.getLogger(__name__)


@dataclass
class WeakFormReport:
    """Residual magnitudes per spatial mode k (rows) and temporal hat m (columns)."""

    residuals: np.ndarray
    reliable: List[bool]
    hat_nodes: np.ndarray

    @property
    def max_reliable_residual(self) -> float:
        rows = [row for row, ok in zip(self.residuals, self.reliable) if ok]
        return float(np.max(rows)) if rows else 0.0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "residuals": self.residuals.tolist(),
            "reliable": list(self.reliable),
            "hat_nodes": self.hat_nodes.tolist(),
            "max_reliable_residual": self.max_reliable_residual,
        }


def _coefficients(field, spec: DomainSpec) -> np.ndarray:
    if isinstance(field, GridField):
        return to_spectral(field, spec).coeffs
    return np.asarray(field.coeffs, dtype=float)


def _source_all_modes(coeffs: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """Source coefficients up to mode 2N-1 (beyond the retained band)."""
    if not np.any(coeffs):
        return np.zeros(2 * spec.n_modes - 1)
    return cosine_analysis(power_source(padded_values(coeffs, spec), spec.p))


def _hat(s: np.ndarray, nodes: np.ndarray, m: int) -> np.ndarray:
    return np.interp(s, nodes[m - 1 : m + 2], [0.0, 1.0, 0.0], left=0.0, right=0.0)


def _hat_slope(s: np.ndarray, nodes: np.ndarray, m: int) -> np.ndarray:
    """ψ_m' evaluated at interval midpoints ``s``."""
    slope = np.zeros_like(s)
    rising = (s > nodes[m - 1]) & (s < nodes[m])
    falling = (s > nodes[m]) & (s < nodes[m + 1])
    slope[rising] = 1.0 / (nodes[m] - nodes[m - 1])
    slope[falling] = -1.0 / (nodes[m + 1] - nodes[m])
    return slope


def weak_form_residual(traj: Trajectory, spec: DomainSpec, n_test: int = 8, n_time: int = 8) -> WeakFormReport:
    """Residuals for modes k = 1..n_test against n_time hat functions in time.

    Modes above the trajectory's retained band are computed from the
    dealiased source alone and flagged unreliable.

    Raises:
        NoCheckpointsError: if fewer than two checkpoints are stored.
    """
    if len(traj.checkpoints) < 2:
        raise NoCheckpointsError("Weak-form check needs at least two checkpoints")
    run_spec = traj.spec
    times = np.array([c.t for c in traj.checkpoints], dtype=float)
    coeffs = np.array([_coefficients(c.field, run_spec) for c in traj.checkpoints])
    sources = np.array([_source_all_modes(row, run_spec) for row in coeffs])
    n_coeffs = coeffs.shape[1]

    nodes = np.linspace(times[0], times[-1], n_time + 2)
    grid = np.union1d(times, nodes)
    left, right = grid[:-1], grid[1:]
    mid = 0.5 * (left + right)
    width = right - left

    wavenumbers = np.arange(1, n_test + 1) * (np.pi / spec.a)
    eigenvalues = wavenumbers**4
    residuals = np.zeros((n_test, n_time))
    reliable = []
    for row, k in enumerate(range(1, n_test + 1)):
        in_band = k <= n_coeffs
        reliable.append(in_band)
        c_k = coeffs[:, k - 1] if in_band else np.zeros(times.size)
        f_k = sources[:, k - 1] if k - 1 < sources.shape[1] else np.zeros(times.size)
        c_left, c_mid, c_right = (np.interp(s, times, c_k) for s in (left, mid, right))
        f_left, f_mid, f_right = (np.interp(s, times, f_k) for s in (left, mid, right))
        g_left = eigenvalues[row] * c_left - f_left
        g_mid = eigenvalues[row] * c_mid - f_mid
        g_right = eigenvalues[row] * c_right - f_right
        for m in range(1, n_time + 1):
            psi_left, psi_mid, psi_right = (_hat(s, nodes, m) for s in (left, mid, right))
            slope = _hat_slope(mid, nodes, m)
            # Simpson's rule is exact for the piecewise quadratic products.
            transport = np.sum(width * slope * (c_left + 4.0 * c_mid + c_right) / 6.0)
            reaction = np.sum(
                width * (psi_left * g_left + 4.0 * psi_mid * g_mid + psi_right * g_right) / 6.0
            )
            residuals[row, m - 1] = abs(0.5 * spec.a * (reaction - transport))
    if not all(reliable):
        logger.warning(
            f"Weak-form modes above k={n_coeffs} lie outside the retained band; flagged unreliable"
        )
    return WeakFormReport(residuals=residuals, reliable=reliable, hat_nodes=nodes)
