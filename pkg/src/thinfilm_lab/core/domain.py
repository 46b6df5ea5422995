"""Domain types shared by every solver, monitor and report."""

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np

from .errors import ConfigInvalidError, NonFiniteError

logger = logging.getLogger(__name__)

MIN_MODES = 8


def parse_length(value: Any) -> float:
    """Parse an interval length given as a number or as ``pi``, ``2pi``, ``1.5*pi``."""
    if isinstance(value, bool):
        raise ConfigInvalidError(f"Invalid length: {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip().lower().replace(" ", "")
        if text.endswith("pi"):
            factor = text[:-2].rstrip("*")
            try:
                return (float(factor) if factor else 1.0) * math.pi
            except ValueError as e:
                raise ConfigInvalidError(f"Invalid length: {value!r}") from e
        try:
            return float(text)
        except ValueError as e:
            raise ConfigInvalidError(f"Invalid length: {value!r}") from e
    raise ConfigInvalidError(f"Invalid length: {value!r}")


@dataclass(frozen=True)
class DomainSpec:
    """Interval length ``a``, exponent ``p`` and number of cosine modes."""

    a: float
    p: float
    n_modes: int = 64

    def __post_init__(self):
        if not (isinstance(self.a, (int, float)) and math.isfinite(self.a) and self.a > 0):
            raise ConfigInvalidError(f"Interval length must be positive, got a={self.a!r}")
        if not (isinstance(self.p, (int, float)) and math.isfinite(self.p) and self.p > 1):
            raise ConfigInvalidError(f"Exponent must exceed 1, got p={self.p!r}")
        if isinstance(self.n_modes, bool) or not isinstance(self.n_modes, (int, np.integer)):
            raise ConfigInvalidError(f"n_modes must be an integer, got {self.n_modes!r}")
        if self.n_modes < MIN_MODES:
            raise ConfigInvalidError(f"n_modes must be >= {MIN_MODES}, got {self.n_modes}")
        # Normalise numeric types so that equal specs hash equally.
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "p", float(self.p))
        object.__setattr__(self, "n_modes", int(self.n_modes))
        if self.n_modes & (self.n_modes - 1):
            logger.debug(f"n_modes={self.n_modes} is not a power of two")

    @property
    def n_coeffs(self) -> int:
        """Number of stored coefficients (mode 0 excluded)."""
        return self.n_modes - 1

    @property
    def p_is_integer(self) -> bool:
        return float(self.p).is_integer()

    def wavenumbers(self) -> np.ndarray:
        """kπ/a for k = 1..N-1."""
        return np.arange(1, self.n_modes) * (math.pi / self.a)

    def grid(self) -> np.ndarray:
        """Collocation points x_j = (j + 1/2) a / N."""
        return (np.arange(self.n_modes) + 0.5) * (self.a / self.n_modes)

    def padded(self) -> "DomainSpec":
        """Spec of the 2N grid used to evaluate the nonlinearity."""
        return self.with_modes(2 * self.n_modes)

    def with_modes(self, n_modes: int) -> "DomainSpec":
        return DomainSpec(a=self.a, p=self.p, n_modes=n_modes)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "DomainSpec":
        unknown = set(data) - {"a", "p", "n_modes"}
        if unknown:
            raise ConfigInvalidError(f"Unknown domain keys: {sorted(unknown)}")
        if "a" not in data or "p" not in data:
            raise ConfigInvalidError("Domain needs both 'a' and 'p'")
        return cls(
            a=parse_length(data["a"]),
            p=float(data["p"]),
            n_modes=data.get("n_modes", 64),
        )


def _frozen_array(values: Any, label: str) -> np.ndarray:
    array = np.array(values, dtype=float).ravel()
    if not np.all(np.isfinite(array)):
        raise NonFiniteError(f"{label} contains non-finite entries")
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class GridField:
    """Point samples at the collocation points of a DomainSpec."""

    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen_array(self.values, "GridField"))

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Cosine coefficients c_k of modes cos(kπx/a), k = 1..N-1.

    Mode 0 is not stored, so every SpectralField has zero mean.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frozen_array(self.coeffs, "SpectralField"))

    @classmethod
    def zeros(cls, spec: DomainSpec) -> "SpectralField":
        return cls(np.zeros(spec.n_coeffs))

    @classmethod
    def mode(cls, spec: DomainSpec, k: int, amplitude: float = 1.0) -> "SpectralField":
        """amplitude * cos(kπx/a)."""
        if not 1 <= k <= spec.n_coeffs:
            raise ValueError(f"Mode {k} outside 1..{spec.n_coeffs}")
        coeffs = np.zeros(spec.n_coeffs)
        coeffs[k - 1] = amplitude
        return cls(coeffs)

    @property
    def n_modes(self) -> int:
        return self.coeffs.size + 1

    def __len__(self) -> int:
        return self.coeffs.size

    def __mul__(self, factor: float) -> "SpectralField":
        return SpectralField(self.coeffs * float(factor))

    __rmul__ = __mul__

    def __add__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralField") -> "SpectralField":
        return SpectralField(self.coeffs - other.coeffs)

    def scaled(self, factor: float) -> "SpectralField":
        return self * factor

    def resized(self, n_modes: int) -> "SpectralField":
        """Zero-pad or truncate to another resolution."""
        target = n_modes - 1
        if target <= self.coeffs.size:
            return SpectralField(self.coeffs[:target])
        return SpectralField(np.pad(self.coeffs, (0, target - self.coeffs.size)))

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)


class Outcome(str, Enum):
    """Verdict of a run."""

    BLOW_UP = "BlowUp"
    GLOBAL_HORIZON_REACHED = "GlobalHorizonReached"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class RunOutcome:
    """How a run ended and why."""

    kind: Outcome
    t_end: float
    blowup_time_estimate: Optional[float] = None
    evidence: str = ""
    trigger: Optional[str] = None
    thresholds: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        kind = Outcome(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is Outcome.BLOW_UP:
            if self.blowup_time_estimate is None:
                raise ValueError("BlowUp outcome needs a blow-up time estimate")
            if not self.blowup_time_estimate >= self.t_end:
                raise ValueError(
                    f"Blow-up estimate {self.blowup_time_estimate} precedes t_end {self.t_end}"
                )
        elif self.blowup_time_estimate is not None:
            raise ValueError(f"{kind.value} outcome cannot carry a blow-up estimate")

    @property
    def is_blowup(self) -> bool:
        return self.kind is Outcome.BLOW_UP

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "t_end": self.t_end,
            "blowup_time_estimate": self.blowup_time_estimate,
            "evidence": self.evidence,
            "trigger": self.trigger,
            "thresholds": dict(sorted(self.thresholds.items())),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunOutcome":
        return cls(
            kind=Outcome(data["kind"]),
            t_end=float(data["t_end"]),
            blowup_time_estimate=data.get("blowup_time_estimate"),
            evidence=data.get("evidence", ""),
            trigger=data.get("trigger"),
            thresholds=dict(data.get("thresholds", {})),
        )
