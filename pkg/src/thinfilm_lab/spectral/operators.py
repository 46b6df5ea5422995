"""Derivatives, the mean-free nonlinear source and the semi-discrete u_t."""

import logging
from dataclasses import dataclass

import numpy as np

from ..core.domain import DomainSpec, SpectralField
from ..core.errors import OverflowDetected, SizeMismatchError
from ..core.transforms import cosine_analysis, cosine_synthesis

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LinearSymbol:
    """Eigenvalues λ_k = (kπ/a)^4 of the biharmonic operator with Neumann walls."""

    eigenvalues: np.ndarray

    @classmethod
    def for_spec(cls, spec: DomainSpec) -> "LinearSymbol":
        eigenvalues = spec.wavenumbers() ** 4
        eigenvalues.flags.writeable = False
        return cls(eigenvalues)

    def __len__(self) -> int:
        return self.eigenvalues.size


def _coeffs(u: SpectralField, spec: DomainSpec) -> np.ndarray:
    if u.coeffs.size != spec.n_coeffs:
        raise SizeMismatchError(
            f"SpectralField has {u.coeffs.size} coefficients, spec expects {spec.n_coeffs}"
        )
    return u.coeffs


def padded_values(coeffs: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """Samples of the field on the 2N dealiasing grid."""
    return cosine_synthesis(coeffs, 2 * spec.n_modes)


def power_source(values: np.ndarray, p: float) -> np.ndarray:
    """sign(u)|u|^p pointwise.

    Raises:
        OverflowDetected: if any value leaves the floating-point range.
    """
    with np.errstate(over="ignore", invalid="ignore"):
        source = np.sign(values) * np.abs(values) ** p
    if not np.all(np.isfinite(source)):
        raise OverflowDetected(
            f"|u|^p overflowed (max |u| = {float(np.max(np.abs(values))):.3e}, p = {p})"
        )
    return source


def source_coefficients(coeffs: np.ndarray, spec: DomainSpec) -> np.ndarray:
    """Coefficients of f(u) - mean f(u), evaluated on the 2N grid and truncated."""
    if not np.any(coeffs):
        return np.zeros(spec.n_coeffs)
    values = padded_values(coeffs, spec)
    return cosine_analysis(power_source(values, spec.p))[: spec.n_coeffs]


def rhs_coefficients(coeffs: np.ndarray, spec: DomainSpec, eigenvalues: np.ndarray) -> np.ndarray:
    return source_coefficients(coeffs, spec) - eigenvalues * coeffs


def second_derivative(u: SpectralField, spec: DomainSpec) -> SpectralField:
    """u_xx: multiply mode k by -(kπ/a)^2."""
    return SpectralField(-(spec.wavenumbers() ** 2) * _coeffs(u, spec))


def fourth_derivative(u: SpectralField, spec: DomainSpec) -> SpectralField:
    """u_xxxx: multiply mode k by (kπ/a)^4."""
    return SpectralField(spec.wavenumbers() ** 4 * _coeffs(u, spec))


def nonlinear_source(u: SpectralField, spec: DomainSpec) -> SpectralField:
    """|u|^{p-1}u minus its mean, dealiased on a grid of 2N points.

    Dropping mode 0 of the transformed product is exactly the nonlocal
    mean subtraction.
    """
    return SpectralField(source_coefficients(_coeffs(u, spec), spec))


def rhs(u: SpectralField, spec: DomainSpec) -> SpectralField:
    """Semi-discrete u_t = -u_xxxx + |u|^{p-1}u - mean."""
    coeffs = _coeffs(u, spec)
    return SpectralField(rhs_coefficients(coeffs, spec, spec.wavenumbers() ** 4))


def dealiasing_note(spec: DomainSpec) -> str:
    """Describe how exact the 2N evaluation of the nonlinearity is for this p."""
    if spec.p == 3.0:
        return "2N zero-padding; exact for this polynomial nonlinearity"
    note = "2N zero-padding; mitigation only for this non-polynomial or high-degree nonlinearity"
    if spec.p > 10:
        logger.warning(f"p={spec.p} is large; pseudospectral accuracy of the source degrades")
    return note

