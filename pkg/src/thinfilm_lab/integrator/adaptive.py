"""Step-doubling adaptive driver with blow-up and S⁻ detection."""

import logging
import math
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.domain import DomainSpec, Outcome, RunOutcome, SpectralField
from ..core.errors import ConfigInvalidError, OverflowDetected, SizeMismatchError
from ..functionals.diagnostics import DiagnosticsAccumulator, DiagnosticsSample, spectral_norms
from ..spectral.operators import LinearSymbol, dealiasing_note
from ..utils.performance import timed
from .blowup import BlowupFit, blowup_outcome
from .etdrk4 import ETDStepper
from .trajectory import Checkpoint, Trajectory

logger = logging.getLogger(__name__)

# Reported error is compared with the step-doubling difference; ETDRK4 is fourth order.
ERROR_EXPONENT = 1.0 / 5.0
MIN_SHRINK = 0.2
# A remaining interval up to this multiple of the step is taken in one step.
LANDING_STRETCH = 1.01


@dataclass(frozen=True)
class StepperConfig:
    """Controls of the adaptive driver."""

    dt_init: float = 1e-4
    dt_min: float = 1e-13
    dt_max: float = 0.05
    rel_tol: float = 1e-8
    t_horizon: float = 10.0
    u_max: float = 1e8
    sample_stride: int = 1
    checkpoint_stride: int = 0
    max_steps: int = 1_000_000
    h2_max: Optional[float] = None
    stop_times: Tuple[float, ...] = ()
    disable_nonlinearity: bool = False
    safety: float = 0.9
    max_growth: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "stop_times", tuple(float(s) for s in self.stop_times))
        self.validate()

    def validate(self) -> None:
        """Raise ConfigInvalidError unless 0 < dt_min <= dt_init <= dt_max and the rest is positive."""
        errors: List[str] = []
        if not 0 < self.dt_min <= self.dt_init <= self.dt_max:
            errors.append(
                f"need 0 < dt_min <= dt_init <= dt_max, got {self.dt_min}, {self.dt_init}, {self.dt_max}"
            )
        for name in ("rel_tol", "u_max", "t_horizon"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                errors.append(f"{name} must be positive, got {value}")
        if self.h2_max is not None and not self.h2_max > 0:
            errors.append(f"h2_max must be positive, got {self.h2_max}")
        if self.sample_stride < 1:
            errors.append(f"sample_stride must be >= 1, got {self.sample_stride}")
        if self.checkpoint_stride < 0:
            errors.append(f"checkpoint_stride must be >= 0, got {self.checkpoint_stride}")
        if self.max_steps < 1:
            errors.append(f"max_steps must be >= 1, got {self.max_steps}")
        if not 0 < self.safety <= 1:
            errors.append(f"safety must lie in (0, 1], got {self.safety}")
        if not self.max_growth > 1:
            errors.append(f"max_growth must exceed 1, got {self.max_growth}")
        if any(not s > 0 for s in self.stop_times):
            errors.append("stop_times must be positive")
        if errors:
            raise ConfigInvalidError("Invalid stepper config: " + "; ".join(errors))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["stop_times"] = list(self.stop_times)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StepperConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigInvalidError(f"Unknown stepper keys: {sorted(unknown)}")
        values = dict(data)
        if "stop_times" in values:
            values["stop_times"] = tuple(values["stop_times"] or ())
        return cls(**values)


def _l2_norm(coeffs: np.ndarray, half_a: float) -> float:
    return math.sqrt(half_a * float(np.dot(coeffs, coeffs)))


def _stop_schedule(cfg: StepperConfig) -> List[float]:
    stops = sorted({s for s in cfg.stop_times if s < cfg.t_horizon})
    return stops + [cfg.t_horizon]


class _RunRecorder:
    """Collects samples and checkpoints of one run."""

    def __init__(self, spec: DomainSpec, cfg: StepperConfig):
        self.spec = spec
        self.cfg = cfg
        self.accumulator = DiagnosticsAccumulator(spec.p)
        self.samples: List[DiagnosticsSample] = []
        self.checkpoints: List[Checkpoint] = []
        self.s_minus_entry: Optional[float] = None
        self.latest: Optional[DiagnosticsSample] = None

    def observe(self, t: float, dt: float, norms) -> DiagnosticsSample:
        self.latest = self.accumulator.observe(t, dt, norms)
        return self.latest

    def keep(self, sample: DiagnosticsSample) -> None:
        """Append ``sample``; a sample at the time of the last kept one replaces it."""
        if self.samples and self.samples[-1].t == sample.t:
            self.samples[-1] = sample
        else:
            self.samples.append(sample)
        if self.s_minus_entry is None and sample.I < 0:
            self.s_minus_entry = sample.t
            logger.info(f"Entered S- at t={sample.t:.10g} (I={sample.I:.6g})")

    def checkpoint(self, t: float, coeffs: np.ndarray) -> None:
        if self.checkpoints and self.checkpoints[-1].t == t:
            self.checkpoints[-1] = Checkpoint(t=t, field=SpectralField(coeffs))
        else:
            self.checkpoints.append(Checkpoint(t=t, field=SpectralField(coeffs)))


@timed("advance")
def advance(u0: SpectralField, spec: DomainSpec, cfg: StepperConfig) -> Trajectory:
    """Integrate from t = 0 until the horizon, blow-up or the step budget.

    Each attempt compares one step of size h with two of size h/2. The
    two-half-step result is kept when the difference is at most
    rel_tol (1 + ||u||_2).

    Raises:
        ConfigInvalidError: for an invalid configuration.
    """
    cfg.validate()
    if u0.coeffs.size != spec.n_coeffs:
        raise SizeMismatchError(
            f"Initial datum has {u0.coeffs.size} coefficients, spec expects {spec.n_coeffs}"
        )
    symbol = LinearSymbol.for_spec(spec)
    stepper = ETDStepper(spec, symbol, nonlinear=not cfg.disable_nonlinearity)
    eigenvalues = symbol.eigenvalues
    half_a = 0.5 * spec.a
    recorder = _RunRecorder(spec, cfg)

    def norms_of(coeffs: np.ndarray):
        norms = spectral_norms(coeffs, spec, eigenvalues)
        if cfg.disable_nonlinearity:
            ut = -eigenvalues * coeffs
            norms = type(norms)(
                mass=norms.mass,
                l2sq=norms.l2sq,
                lp1=norms.lp1,
                linf=norms.linf,
                h2sq=norms.h2sq,
                ut_l2sq=half_a * float(np.dot(ut, ut)),
            )
        return norms

    coeffs = np.array(u0.coeffs, dtype=float)
    t = 0.0
    dt = cfg.dt_init
    accepted = 0
    rejected = 0
    trigger: Optional[str] = None
    detail = ""

    logger.info(
        f"Advancing a={spec.a:.6g}, p={spec.p:g}, N={spec.n_modes} to t={cfg.t_horizon:g} "
        f"(rel_tol={cfg.rel_tol:g}, u_max={cfg.u_max:g})"
    )
    try:
        first = recorder.observe(0.0, 0.0, norms_of(coeffs))
    except OverflowDetected as e:
        raise ConfigInvalidError(f"Initial datum overflows the nonlinearity: {e}") from e
    recorder.keep(first)
    recorder.checkpoint(0.0, coeffs)
    if first.linf > cfg.u_max:
        trigger, detail = "amplitude", f"||u||_inf={first.linf:.6g} > u_max at t=0"

    stops = _stop_schedule(cfg)
    stop_index = 0

    while trigger is None:
        if t >= cfg.t_horizon:
            trigger = "horizon"
            break
        if accepted >= cfg.max_steps:
            trigger = "max_steps"
            break
        while stops[stop_index] <= t:
            stop_index += 1
        target = stops[stop_index]
        h = min(dt, target - t)
        landing = target - t <= LANDING_STRETCH * h
        if landing:
            h = target - t

        try:
            coarse = stepper.advance_coeffs(coeffs, h)
            fine = stepper.advance_coeffs(stepper.advance_coeffs(coeffs, h / 2.0), h / 2.0)
        except OverflowDetected as e:
            trigger, detail = "overflow", f"{e} at t={t:.15g}, dt={h:.3e}"
            break
        if not (np.all(np.isfinite(fine)) and np.all(np.isfinite(coarse))):
            trigger, detail = "overflow", f"non-finite state at t={t:.15g}, dt={h:.3e}"
            break

        error = _l2_norm(fine - coarse, half_a)
        allowed = cfg.rel_tol * (1.0 + _l2_norm(coeffs, half_a))
        if error <= allowed:
            new_t = target if landing else t + h
            if (h < cfg.dt_min and not landing) or new_t <= t:
                trigger = "step_collapse"
                detail = (
                    f"accepted dt={h:.3e} is below dt_min={cfg.dt_min:g} "
                    f"or the resolution of t={t:.15g}"
                )
                break
            try:
                sample = recorder.observe(new_t, h, norms_of(fine))
            except OverflowDetected as e:
                trigger, detail = "overflow", f"{e} at t={new_t:.15g}"
                break
            coeffs = fine
            t = new_t
            accepted += 1
            if sample.linf > cfg.u_max:
                trigger, detail = "amplitude", f"||u||_inf={sample.linf:.6g} > u_max={cfg.u_max:g}"
            elif cfg.h2_max is not None and math.sqrt(sample.h2sq) > cfg.h2_max:
                trigger, detail = "h2", f"||u_xx||_2={math.sqrt(sample.h2sq):.6g} > h2_max={cfg.h2_max:g}"

            on_stride = accepted % cfg.sample_stride == 0
            if on_stride or landing or trigger is not None:
                recorder.keep(sample)
            if landing or (cfg.checkpoint_stride and accepted % cfg.checkpoint_stride == 0):
                recorder.checkpoint(t, coeffs)

            factor = cfg.max_growth if error == 0 else cfg.safety * (allowed / error) ** ERROR_EXPONENT
            factor = min(cfg.max_growth, max(MIN_SHRINK, factor))
            proposed = h * factor
            if landing:
                proposed = max(proposed, dt)
            dt = min(cfg.dt_max, proposed)
        else:
            rejected += 1
            factor = max(MIN_SHRINK, cfg.safety * (allowed / error) ** ERROR_EXPONENT)
            dt = h * min(factor, 1.0)
            logger.debug(f"Rejected step at t={t:.15g}: error {error:.3e} > {allowed:.3e}, dt -> {dt:.3e}")
            if dt < cfg.dt_min:
                trigger = "step_collapse"
                detail = f"dt={dt:.3e} < dt_min={cfg.dt_min:g} at t={t:.15g} with error {error:.3e}"
                break

    last = recorder.latest
    recorder.keep(last)
    recorder.checkpoint(t, coeffs)
    thresholds = {"u_max": cfg.u_max, "dt_min": cfg.dt_min, "t_horizon": cfg.t_horizon}
    if cfg.h2_max is not None:
        thresholds["h2_max"] = cfg.h2_max

    fit: Optional[BlowupFit] = None
    if trigger == "horizon":
        outcome = RunOutcome(
            kind=Outcome.GLOBAL_HORIZON_REACHED,
            t_end=t,
            evidence=f"reached t_horizon={cfg.t_horizon:g} after {accepted} steps",
            trigger=trigger,
            thresholds=thresholds,
        )
    elif trigger == "max_steps":
        outcome = RunOutcome(
            kind=Outcome.INCONCLUSIVE,
            t_end=t,
            evidence=f"step budget of {cfg.max_steps} exhausted at t={t:.10g}",
            trigger=trigger,
            thresholds=thresholds,
        )
    else:
        times = [s.t for s in recorder.samples]
        amplitudes = [s.linf for s in recorder.samples]
        outcome, fit = blowup_outcome(times, amplitudes, spec.p, trigger, thresholds, f"{trigger}: {detail}")

    logger.info(
        f"Run ended with {outcome.kind.value} at t={outcome.t_end:.10g} ({outcome.trigger}); "
        f"{accepted} accepted, {rejected} rejected steps"
    )
    metadata: Dict[str, Any] = {
        "accepted_steps": accepted,
        "rejected_steps": rejected,
        "dealiasing": dealiasing_note(spec),
        "coefficient_cache": stepper.coefficients.get_stats(),
    }
    if fit is not None:
        metadata["blowup_fit"] = fit.to_dict()
    return Trajectory(
        samples=recorder.samples,
        outcome=outcome,
        spec=spec,
        checkpoints=recorder.checkpoints,
        s_minus_entry=recorder.s_minus_entry,
        metadata=metadata,
    )
