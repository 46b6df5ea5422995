"""Cosine transforms between collocation samples and mode coefficients.

Samples live at x_j = (j + 1/2) a / N. The type-II DCT maps them to the
coefficients of cos(kπx/a) and the type-III DCT maps back; both boundary
conditions u_x = u_xxx = 0 hold identically for every retained mode.
"""

import numpy as np
from scipy import fft

from .domain import DomainSpec, GridField, SpectralField
from .errors import NonFiniteError, SizeMismatchError, ZeroDatumError

ZERO_DATUM_RTOL = 1e-14


def cosine_synthesis(coeffs: np.ndarray, n_points: int) -> np.ndarray:
    """Evaluate Σ c_k cos(kπx_j/a) on an ``n_points`` collocation grid.

    ``coeffs`` may be shorter than n_points - 1; missing modes are zero.
    """
    full = np.zeros(n_points)
    full[1 : coeffs.size + 1] = 0.5 * coeffs
    return fft.dct(full, type=3)


def cosine_analysis(values: np.ndarray) -> np.ndarray:
    """Coefficients c_1..c_{M-1} of M collocation samples; the mean is dropped."""
    return fft.dct(values, type=2)[1:] / values.size


def _check_size(actual: int, expected: int, what: str) -> None:
    if actual != expected:
        raise SizeMismatchError(f"{what} has length {actual}, expected {expected}")


def to_grid(u: SpectralField, spec: DomainSpec) -> GridField:
    """Samples of ``u`` at the collocation points of ``spec``."""
    _check_size(u.coeffs.size, spec.n_coeffs, "SpectralField")
    return GridField(cosine_synthesis(u.coeffs, spec.n_modes))


def to_spectral(u: GridField, spec: DomainSpec) -> SpectralField:
    """Cosine coefficients of grid samples; the mean component is discarded."""
    _check_size(u.values.size, spec.n_modes, "GridField")
    return SpectralField(cosine_analysis(u.values))


def validate_initial_datum(u0: GridField, spec: DomainSpec) -> SpectralField:
    """Mean-free spectral representation of an initial datum.

    Raises:
        NonFiniteError: if any sample is NaN or infinite.
        ZeroDatumError: if the datum is numerically constant.
    """
    values = np.asarray(u0.values, dtype=float)
    if not np.all(np.isfinite(values)):
        raise NonFiniteError("Initial datum contains non-finite samples")
    _check_size(values.size, spec.n_modes, "Initial datum")
    scale = float(np.max(np.abs(values))) if values.size else 0.0
    coeffs = cosine_analysis(values - values.mean())
    if scale == 0.0 or float(np.max(np.abs(coeffs))) < ZERO_DATUM_RTOL * scale:
        raise ZeroDatumError("Initial datum is constant; nothing is left after removing the mean")
    return SpectralField(coeffs)
