"""Initial-data families.

Every family produces a mean-free datum: the field is synthesised on the
collocation grid and passed through ``validate_initial_datum`` exactly as
externally supplied samples would be.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np

from ..core.domain import DomainSpec, GridField, SpectralField
from ..core.errors import InvalidDescriptorError, ZeroDatumError
from ..core.transforms import cosine_synthesis, to_grid, validate_initial_datum
from ..functionals.diagnostics import lambda_star

logger = logging.getLogger(__name__)

FAMILIES = ("cosine_combo", "random_bandlimited", "nehari_scaled")

_FAMILY_KEYS = {
    "cosine_combo": {"family", "terms"},
    "random_bandlimited": {"family", "max_k", "amplitude", "rng_seed"},
    "nehari_scaled": {"family", "base", "multiplier"},
}


@dataclass(frozen=True)
class DatumDescriptor:
    """Family name plus the parameters that family reads."""

    family: str
    terms: Tuple[Tuple[int, float], ...] = ()
    max_k: int = 8
    amplitude: float = 1.0
    rng_seed: int = 0
    base: Optional["DatumDescriptor"] = None
    multiplier: float = 1.0

    def __post_init__(self):
        object.__setattr__(
            self, "terms", tuple((int(k), float(amp)) for k, amp in self.terms)
        )
        if self.family not in FAMILIES:
            raise InvalidDescriptorError(
                f"Unknown datum family {self.family!r}; expected one of {list(FAMILIES)}"
            )
        if self.family == "cosine_combo":
            if not self.terms:
                raise InvalidDescriptorError("cosine_combo needs at least one (k, amplitude) term")
            if any(k < 1 for k, _ in self.terms):
                raise InvalidDescriptorError("cosine_combo modes must be >= 1")
        elif self.family == "random_bandlimited":
            if self.max_k < 1:
                raise InvalidDescriptorError(f"max_k must be >= 1, got {self.max_k}")
            if not (np.isfinite(self.amplitude) and self.amplitude > 0):
                raise InvalidDescriptorError(f"amplitude must be positive, got {self.amplitude}")
        else:
            if self.base is None:
                raise InvalidDescriptorError("nehari_scaled needs a base descriptor")
            if not (np.isfinite(self.multiplier) and self.multiplier > 0):
                raise InvalidDescriptorError(f"multiplier must be positive, got {self.multiplier}")

    def to_dict(self) -> Dict[str, Any]:
        if self.family == "cosine_combo":
            return {"family": self.family, "terms": [[k, amp] for k, amp in self.terms]}
        if self.family == "random_bandlimited":
            return {
                "family": self.family,
                "max_k": self.max_k,
                "amplitude": self.amplitude,
                "rng_seed": self.rng_seed,
            }
        return {"family": self.family, "base": self.base.to_dict(), "multiplier": self.multiplier}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DatumDescriptor":
        if not isinstance(data, dict) or "family" not in data:
            raise InvalidDescriptorError("Datum descriptor needs a 'family' key")
        family = data["family"]
        allowed = _FAMILY_KEYS.get(family)
        if allowed is None:
            raise InvalidDescriptorError(f"Unknown datum family {family!r}")
        unknown = set(data) - allowed
        if unknown:
            raise InvalidDescriptorError(f"Unknown keys for {family}: {sorted(unknown)}")
        values = dict(data)
        try:
            if "terms" in values:
                values["terms"] = tuple((k, amp) for k, amp in values["terms"])
            if "base" in values:
                values["base"] = cls.from_dict(values["base"])
            return cls(**values)
        except (TypeError, ValueError) as e:
            raise InvalidDescriptorError(f"Malformed {family} descriptor: {e}") from e


def cosine_combo(*terms: Tuple[int, float]) -> DatumDescriptor:
    return DatumDescriptor(family="cosine_combo", terms=tuple(terms))


def _cosine_values(d: DatumDescriptor, spec: DomainSpec) -> np.ndarray:
    coeffs = np.zeros(spec.n_coeffs)
    for k, amplitude in d.terms:
        if k > spec.n_coeffs:
            raise InvalidDescriptorError(f"Mode {k} exceeds the {spec.n_coeffs} retained modes")
        coeffs[k - 1] += amplitude
    return cosine_synthesis(coeffs, spec.n_modes)


def _random_values(d: DatumDescriptor, spec: DomainSpec) -> np.ndarray:
    if d.max_k > spec.n_coeffs:
        raise InvalidDescriptorError(f"max_k={d.max_k} exceeds the {spec.n_coeffs} retained modes")
    rng = np.random.default_rng(d.rng_seed)
    coeffs = np.zeros(spec.n_coeffs)
    coeffs[: d.max_k] = rng.standard_normal(d.max_k)
    values = cosine_synthesis(coeffs, spec.n_modes)
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        raise InvalidDescriptorError("Random draw produced the zero field")
    return values * (d.amplitude / peak)


def build_datum(d: DatumDescriptor, spec: DomainSpec) -> SpectralField:
    """Deterministic mean-free datum for a descriptor.

    Raises:
        InvalidDescriptorError: for modes outside the retained band, a zero
            result or a malformed nested descriptor.
    """
    if d.family == "nehari_scaled":
        base = build_datum(d.base, spec)
        scale = d.multiplier * lambda_star(base, spec)
        logger.debug(f"Nehari scaling {d.multiplier} x lambda* = {scale:.6g}")
        values = to_grid(base * scale, spec).values
    elif d.family == "cosine_combo":
        values = _cosine_values(d, spec)
    else:
        values = _random_values(d, spec)
    try:
        return validate_initial_datum(GridField(values), spec)
    except ZeroDatumError as e:
        raise InvalidDescriptorError(f"{d.family} descriptor yields a zero datum") from e
