"""Norms, the energy J, the Nehari value I and per-sample diagnostics."""

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Optional, Union

import numpy as np

from ..core.domain import DomainSpec, GridField, SpectralField
from ..core.errors import OverflowDetected, SizeMismatchError, ZeroFieldError
from ..core.transforms import cosine_analysis
from ..spectral.operators import padded_values, power_source

logger = logging.getLogger(__name__)

# Column order of the trajectory CSV.
CSV_COLUMNS = [
    "t",
    "dt",
    "mass",
    "l2sq",
    "lp1",
    "linf",
    "h2sq",
    "J",
    "I",
    "ut_l2sq",
    "M",
    "energy_residual",
]

INVARIANT_RTOL = 1e-12


def _relative_gap(value: float, expected: float, *scales: float) -> float:
    scale = max([abs(expected), *[abs(s) for s in scales], 1e-300])
    return abs(value - expected) / scale


@dataclass(frozen=True)
class DiagnosticsSample:
    """Snapshot of the scalar diagnostics at one accepted time."""

    t: float
    dt: float
    mass: float
    l2sq: float
    lp1: float
    linf: float
    h2sq: float
    J: float
    I: float  # noqa: E741
    ut_l2sq: float
    M: float
    energy_residual: float
    dissipation: float = 0.0

    @property
    def Mp(self) -> float:
        """M'(t) = ||u||_2^2 / 2."""
        return self.l2sq / 2.0

    @property
    def Mpp(self) -> float:
        """M''(t) = -I(u)."""
        return -self.I

    def to_row(self) -> Dict[str, float]:
        return {column: getattr(self, column) for column in CSV_COLUMNS}

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["Mp"] = self.Mp
        data["Mpp"] = self.Mpp
        return data

    def invariant_violations(self, p: float, rtol: float = INVARIANT_RTOL) -> List[str]:
        """Algebraic relations this sample must satisfy; empty when consistent."""
        problems = []
        energy = self.h2sq / 2.0 - self.lp1 / (p + 1.0)
        if _relative_gap(self.J, energy, self.h2sq / 2.0, self.lp1 / (p + 1.0)) > rtol:
            problems.append(f"t={self.t!r}: J={self.J!r} but h2sq/2 - lp1/(p+1)={energy!r}")
        nehari = self.h2sq - self.lp1
        if _relative_gap(self.I, nehari, self.h2sq, self.lp1) > rtol:
            problems.append(f"t={self.t!r}: I={self.I!r} but h2sq - lp1={nehari!r}")
        values = [getattr(self, column) for column in CSV_COLUMNS]
        if not all(math.isfinite(v) for v in values):
            problems.append(f"t={self.t!r}: non-finite diagnostics")
        return problems


@dataclass(frozen=True)
class FieldNorms:
    """Raw integrals of one state, before J and I are formed."""

    mass: float
    l2sq: float
    lp1: float
    linf: float
    h2sq: float
    ut_l2sq: float


def _check(u: SpectralField, spec: DomainSpec) -> np.ndarray:
    if u.coeffs.size != spec.n_coeffs:
        raise SizeMismatchError(
            f"SpectralField has {u.coeffs.size} coefficients, spec expects {spec.n_coeffs}"
        )
    return u.coeffs


def l2_norm_sq(u: SpectralField, spec: DomainSpec) -> float:
    """||u||_2^2 = (a/2) Σ c_k^2."""
    coeffs = _check(u, spec)
    return 0.5 * spec.a * float(np.dot(coeffs, coeffs))


def h2_norm_sq(u: SpectralField, spec: DomainSpec) -> float:
    """||u_xx||_2^2 = (a/2) Σ (kπ/a)^4 c_k^2."""
    weighted = spec.wavenumbers() ** 2 * _check(u, spec)
    return 0.5 * spec.a * float(np.dot(weighted, weighted))


def lp_norm_pow(u: SpectralField, spec: DomainSpec, power: Optional[float] = None) -> float:
    """||u||_q^q with q = p + 1 by default, by midpoint quadrature on the 2N grid."""
    power = spec.p + 1.0 if power is None else power
    values = padded_values(_check(u, spec), spec)
    return _grid_power_integral(values, spec.a, power)


def linf_norm(u: SpectralField, spec: DomainSpec) -> float:
    """max |u| over the 2N grid."""
    coeffs = _check(u, spec)
    if not np.any(coeffs):
        return 0.0
    return float(np.max(np.abs(padded_values(coeffs, spec))))


def _grid_power_integral(values: np.ndarray, length: float, power: float) -> float:
    with np.errstate(over="ignore", invalid="ignore"):
        total = float(np.sum(np.abs(values) ** power))
    if not math.isfinite(total):
        raise OverflowDetected(f"||u||^{power} overflowed")
    return length / values.size * total


def mass(u: Union[SpectralField, GridField], spec: DomainSpec) -> float:
    """∫_0^a u dx; exactly 0 for spectral fields."""
    if isinstance(u, SpectralField):
        _check(u, spec)
        return 0.0
    if u.values.size != spec.n_modes:
        raise SizeMismatchError(f"GridField has {u.values.size} samples, expected {spec.n_modes}")
    return spec.a / spec.n_modes * float(np.sum(u.values))


def energy_J(u: SpectralField, spec: DomainSpec) -> float:
    """J(u) = ||u_xx||^2 / 2 - ||u||_{p+1}^{p+1} / (p+1)."""
    return h2_norm_sq(u, spec) / 2.0 - lp_norm_pow(u, spec) / (spec.p + 1.0)


def nehari_I(u: SpectralField, spec: DomainSpec) -> float:
    """I(u) = ||u_xx||^2 - ||u||_{p+1}^{p+1}."""
    return h2_norm_sq(u, spec) - lp_norm_pow(u, spec)


def lambda_star(u: SpectralField, spec: DomainSpec) -> float:
    """Positive multiplier λ with I(λu) = 0.

    Raises:
        ZeroFieldError: for the zero field.
    """
    h2sq = h2_norm_sq(u, spec)
    lp1 = lp_norm_pow(u, spec)
    if h2sq == 0.0 or lp1 == 0.0:
        raise ZeroFieldError("Nehari scaling is undefined for the zero field")
    return (h2sq / lp1) ** (1.0 / (spec.p - 1.0))


def energy_decomposition_residual(u: SpectralField, spec: DomainSpec) -> float:
    """Relative gap in J = ((p-1)/(2(p+1)))||u_xx||^2 + I/(p+1)."""
    p = spec.p
    h2sq = h2_norm_sq(u, spec)
    lp1 = lp_norm_pow(u, spec)
    energy = h2sq / 2.0 - lp1 / (p + 1.0)
    decomposed = (p - 1.0) / (2.0 * (p + 1.0)) * h2sq + (h2sq - lp1) / (p + 1.0)
    return _relative_gap(energy, decomposed, h2sq, lp1)


def spectral_norms(coeffs: np.ndarray, spec: DomainSpec, eigenvalues: np.ndarray) -> FieldNorms:
    """All integrals of a spectral state with one synthesis and one analysis.

    Raises:
        OverflowDetected: if |u|^p or |u|^{p+1} leave the floating-point range.
    """
    half_a = 0.5 * spec.a
    values = padded_values(coeffs, spec)
    source = cosine_analysis(power_source(values, spec.p))[: spec.n_coeffs]
    ut = source - eigenvalues * coeffs
    weighted = spec.wavenumbers() ** 2 * coeffs
    return FieldNorms(
        mass=spec.a / values.size * float(np.sum(values)),
        l2sq=half_a * float(np.dot(coeffs, coeffs)),
        lp1=_grid_power_integral(values, spec.a, spec.p + 1.0),
        linf=float(np.max(np.abs(values))) if values.size else 0.0,
        h2sq=half_a * float(np.dot(weighted, weighted)),
        ut_l2sq=half_a * float(np.dot(ut, ut)),
    )


class DiagnosticsAccumulator:
    """Turns per-step norms into samples, integrating M and ∫||u_t||^2 by trapezoids.

    ``observe`` must be called at every accepted step, in time order, even
    when the sample is not kept; the running integrals depend on it.
    """

    def __init__(self, p: float):
        self.p = p
        self.M = 0.0
        self.dissipation = 0.0
        self.J0: Optional[float] = None
        self._last: Optional[DiagnosticsSample] = None

    @property
    def last(self) -> Optional[DiagnosticsSample]:
        return self._last

    def observe(self, t: float, dt: float, norms: FieldNorms) -> DiagnosticsSample:
        energy = norms.h2sq / 2.0 - norms.lp1 / (self.p + 1.0)
        nehari = norms.h2sq - norms.lp1
        if self._last is None:
            self.J0 = energy
        else:
            step = t - self._last.t
            self.M += step * (self._last.l2sq + norms.l2sq) / 4.0
            self.dissipation += step * (self._last.ut_l2sq + norms.ut_l2sq) / 2.0
        sample = DiagnosticsSample(
            t=t,
            dt=dt,
            mass=norms.mass,
            l2sq=norms.l2sq,
            lp1=norms.lp1,
            linf=norms.linf,
            h2sq=norms.h2sq,
            J=energy,
            I=nehari,
            ut_l2sq=norms.ut_l2sq,
            M=self.M,
            energy_residual=abs(self.dissipation + energy - self.J0),
            dissipation=self.dissipation,
        )
        self._last = sample
        return sample


def sample_diagnostics(
    u: SpectralField,
    spec: DomainSpec,
    t: float = 0.0,
    dt: float = 0.0,
    accumulator: Optional[DiagnosticsAccumulator] = None,
) -> DiagnosticsSample:
    """Diagnostics of one state; pass an accumulator to continue time integrals."""
    accumulator = accumulator or DiagnosticsAccumulator(spec.p)
    norms = spectral_norms(_check(u, spec), spec, spec.wavenumbers() ** 4)
    return accumulator.observe(t, dt, norms)
