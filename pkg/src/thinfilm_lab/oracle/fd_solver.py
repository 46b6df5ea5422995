"""Independent finite-difference solver on the cell-centred grid.

Second-order differences with even reflection through both walls
(u_{-1} = u_0, u_{-2} = u_1 and mirror images at x = a) impose u_x = 0 and
u_xxx = 0 together. The biharmonic part is Crank-Nicolson through a banded
Cholesky factorisation; the mean-free source is second-order
Adams-Bashforth with variable steps. The step is halved on failure and
never grown.
"""

import logging
import math
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.linalg import LinAlgError, cho_solve_banded, cholesky_banded

from ..core.domain import DomainSpec, GridField, Outcome, RunOutcome, SpectralField
from ..core.errors import ConfigInvalidError, LinearSolveFailure, OverflowDetected, SizeMismatchError
from ..core.transforms import cosine_synthesis
from ..functionals.diagnostics import DiagnosticsAccumulator, DiagnosticsSample, FieldNorms
from ..integrator.blowup import blowup_outcome
from ..integrator.trajectory import Checkpoint, Trajectory
from ..spectral.operators import power_source
from ..utils.performance import timed

logger = logging.getLogger(__name__)

MIN_POINTS = 64


@dataclass(frozen=True)
class FDConfig:
    """Grid size, step and failure thresholds of the finite-difference solver."""

    n_points: int = 2048
    dt: float = 1e-3
    t_horizon: float = 1.0
    u_max: float = 1e8
    dt_min: float = 1e-13
    max_rel_change: float = 0.05
    sample_stride: int = 1
    checkpoint_stride: int = 0
    max_steps: int = 2_000_000
    stop_times: Tuple[float, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "stop_times", tuple(float(s) for s in self.stop_times))
        errors = []
        if self.n_points < MIN_POINTS:
            errors.append(f"n_points must be >= {MIN_POINTS}, got {self.n_points}")
        if not 0 < self.dt_min <= self.dt:
            errors.append(f"need 0 < dt_min <= dt, got {self.dt_min}, {self.dt}")
        for name in ("t_horizon", "u_max", "max_rel_change"):
            if not getattr(self, name) > 0:
                errors.append(f"{name} must be positive")
        if self.sample_stride < 1 or self.checkpoint_stride < 0 or self.max_steps < 1:
            errors.append("sample_stride and max_steps must be >= 1, checkpoint_stride >= 0")
        if errors:
            raise ConfigInvalidError("Invalid FD config: " + "; ".join(errors))

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["stop_times"] = list(self.stop_times)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FDConfig":
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigInvalidError(f"Unknown oracle keys: {sorted(unknown)}")
        values = dict(data)
        if "stop_times" in values:
            values["stop_times"] = tuple(values["stop_times"] or ())
        return cls(**values)


def grid_datum(u: SpectralField, n_points: int) -> GridField:
    """Samples of a spectral field on an n_points cell-centred grid."""
    if u.coeffs.size > n_points - 1:
        raise SizeMismatchError(f"{u.coeffs.size} modes do not fit on {n_points} points")
    return GridField(cosine_synthesis(u.coeffs, n_points))


def biharmonic(u: np.ndarray, h: float) -> np.ndarray:
    """D4 u with even reflection: the square of the reflected D2."""
    ext = np.concatenate([u[1::-1], u, u[:-3:-1]])
    return (ext[:-4] - 4.0 * ext[1:-3] + 6.0 * ext[2:-2] - 4.0 * ext[3:-1] + ext[4:]) / h**4


def second_difference(u: np.ndarray, h: float) -> np.ndarray:
    """D2 u with u_{-1} = u_0 and u_N = u_{N-1}."""
    ext = np.concatenate([u[:1], u, u[-1:]])
    return (ext[:-2] - 2.0 * ext[1:-1] + ext[2:]) / h**2


def biharmonic_bands(n: int, h: float) -> np.ndarray:
    """Upper-banded storage of the symmetric pentadiagonal D4."""
    bands = np.zeros((3, n))
    bands[2] = 6.0
    bands[2, 0] = bands[2, -1] = 2.0
    bands[1, 1:] = -4.0
    bands[1, 1] = bands[1, -1] = -3.0
    bands[0, 2:] = 1.0
    return bands / h**4


def mean_free_source(u: np.ndarray, p: float) -> np.ndarray:
    source = power_source(u, p)
    return source - source.mean()


def fd_norms(u: np.ndarray, h: float, p: float, source: np.ndarray) -> FieldNorms:
    """Grid quadratures of one state; ``source`` is its mean-free nonlinearity."""
    with np.errstate(over="ignore", invalid="ignore"):
        lp1 = h * float(np.sum(np.abs(u) ** (p + 1.0)))
    if not math.isfinite(lp1):
        raise OverflowDetected("||u||^(p+1) overflowed on the FD grid")
    ut = source - biharmonic(u, h)
    d2 = second_difference(u, h)
    return FieldNorms(
        mass=h * float(np.sum(u)),
        l2sq=h * float(np.dot(u, u)),
        lp1=lp1,
        linf=float(np.max(np.abs(u))),
        h2sq=h * float(np.dot(d2, d2)),
        ut_l2sq=h * float(np.dot(ut, ut)),
    )


def fd_diagnostics(u: GridField, spec: DomainSpec, t: float = 0.0) -> DiagnosticsSample:
    """Diagnostics of one grid state with finite-difference quadratures."""
    values = np.asarray(u.values, dtype=float)
    h = spec.a / values.size
    norms = fd_norms(values, h, spec.p, mean_free_source(values, spec.p))
    return DiagnosticsAccumulator(spec.p).observe(t, 0.0, norms)


class _ImplicitOperator:
    """Factorised I + (dt/2) D4, cached per step size."""

    def __init__(self, n: int, h: float):
        self.bands = biharmonic_bands(n, h)
        self._factors: Dict[float, np.ndarray] = {}

    def solve(self, dt: float, rhs: np.ndarray) -> np.ndarray:
        if dt not in self._factors:
            matrix = 0.5 * dt * self.bands
            matrix[2] += 1.0
            try:
                self._factors[dt] = cholesky_banded(matrix, lower=False)
            except LinAlgError as e:
                raise LinearSolveFailure(f"Banded Cholesky failed for dt={dt:.3e}: {e}") from e
        return cho_solve_banded((self._factors[dt], False), rhs)


@timed("fd_advance")
def fd_advance(u0: GridField, spec: DomainSpec, cfg: Optional[FDConfig] = None) -> Trajectory:
    """Integrate a grid datum with the finite-difference scheme.

    ``spec`` supplies a and p; the grid has ``cfg.n_points`` cells and the
    returned trajectory carries ``spec.with_modes(cfg.n_points)``.

    Raises:
        SizeMismatchError: if the datum does not have n_points samples.
        LinearSolveFailure: if the implicit operator cannot be factorised.
    """
    cfg = cfg or FDConfig()
    n = cfg.n_points
    if u0.values.size != n:
        raise SizeMismatchError(f"FD datum has {u0.values.size} samples, expected {n}")
    fd_spec = spec.with_modes(n)
    p = spec.p
    h = spec.a / n
    operator = _ImplicitOperator(n, h)
    accumulator = DiagnosticsAccumulator(p)

    u = np.array(u0.values, dtype=float)
    u -= u.mean()
    try:
        source = mean_free_source(u, p)
        first = accumulator.observe(0.0, 0.0, fd_norms(u, h, p, source))
    except OverflowDetected as e:
        raise ConfigInvalidError(f"Initial datum overflows the nonlinearity: {e}") from e

    samples: List[DiagnosticsSample] = [first]
    checkpoints: List[Checkpoint] = [Checkpoint(0.0, GridField(u))]
    s_minus_entry: Optional[float] = 0.0 if first.I < 0 else None
    latest = first
    stops = sorted({s for s in cfg.stop_times if s < cfg.t_horizon}) + [cfg.t_horizon]
    stop_index = 0

    t = 0.0
    dt = cfg.dt
    previous_source: Optional[np.ndarray] = None
    previous_dt = 0.0
    steps = 0
    halvings = 0
    trigger: Optional[str] = None
    detail = ""
    if first.linf > cfg.u_max:
        trigger, detail = "amplitude", f"||u||_inf={first.linf:.6g} > u_max at t=0"

    logger.info(f"FD oracle: {n} points, dt={cfg.dt:g}, horizon {cfg.t_horizon:g}")
    while trigger is None:
        if t >= cfg.t_horizon:
            trigger = "horizon"
            break
        if steps >= cfg.max_steps:
            trigger = "max_steps"
            break
        while stops[stop_index] <= t:
            stop_index += 1
        target = stops[stop_index]
        h_t = min(dt, target - t)
        landing = target - t <= 1.01 * h_t
        if landing:
            h_t = target - t

        if previous_source is None:
            explicit = source
        else:
            omega = h_t / previous_dt
            explicit = (1.0 + 0.5 * omega) * source - 0.5 * omega * previous_source
        rhs = u - 0.5 * h_t * biharmonic(u, h) + h_t * explicit
        failure = None
        solve_error: Optional[LinearSolveFailure] = None
        try:
            candidate = operator.solve(h_t, rhs)
            candidate -= candidate.mean()
            if not np.all(np.isfinite(candidate)):
                failure = "non-finite state"
            else:
                scale = max(float(np.max(np.abs(u))), 1e-300)
                change = float(np.max(np.abs(candidate - u))) / scale
                if change > cfg.max_rel_change:
                    failure = f"relative change {change:.3f}"
        except LinearSolveFailure as e:
            failure, solve_error = str(e), e
        if failure is None:
            try:
                new_source = mean_free_source(candidate, p)
                norms = fd_norms(candidate, h, p, new_source)
            except OverflowDetected as e:
                trigger, detail = "overflow", f"{e} at t={t:.15g}"
                break

        if failure is not None:
            dt = h_t / 2.0
            halvings += 1
            logger.debug(f"FD step failed at t={t:.15g} ({failure}); dt -> {dt:.3e}")
            if dt < cfg.dt_min:
                if solve_error is not None:
                    logger.error(f"FD oracle cannot factorise the implicit operator: {solve_error}")
                    raise solve_error
                trigger = "step_collapse"
                detail = f"dt={dt:.3e} < dt_min={cfg.dt_min:g} at t={t:.15g} ({failure})"
                break
            continue

        t = target if landing else t + h_t
        previous_source, previous_dt = source, h_t
        u, source = candidate, new_source
        steps += 1
        latest = accumulator.observe(t, h_t, norms)
        if steps % cfg.sample_stride == 0 or landing:
            samples.append(latest)
            if s_minus_entry is None and latest.I < 0:
                s_minus_entry = latest.t
        if landing or (cfg.checkpoint_stride and steps % cfg.checkpoint_stride == 0):
            checkpoints.append(Checkpoint(t, GridField(u)))
        if latest.linf > cfg.u_max:
            trigger, detail = "amplitude", f"||u||_inf={latest.linf:.6g} > u_max={cfg.u_max:g}"

    if samples[-1].t != latest.t:
        samples.append(latest)
        if s_minus_entry is None and latest.I < 0:
            s_minus_entry = latest.t
    if checkpoints[-1].t != t:
        checkpoints.append(Checkpoint(t, GridField(u)))

    thresholds = {"u_max": cfg.u_max, "dt_min": cfg.dt_min, "t_horizon": cfg.t_horizon}
    metadata: Dict[str, Any] = {"solver": "fd", "n_points": n, "steps": steps, "halvings": halvings}
    if trigger == "horizon":
        outcome = RunOutcome(
            Outcome.GLOBAL_HORIZON_REACHED,
            t_end=t,
            evidence=f"reached t_horizon={cfg.t_horizon:g}",
            trigger=trigger,
            thresholds=thresholds,
        )
    elif trigger == "max_steps":
        outcome = RunOutcome(
            Outcome.INCONCLUSIVE,
            t_end=t,
            evidence=f"step budget {cfg.max_steps} exhausted",
            trigger=trigger,
            thresholds=thresholds,
        )
    else:
        outcome, fit = blowup_outcome(
            [s.t for s in samples], [s.linf for s in samples], p, trigger, thresholds, f"{trigger}: {detail}"
        )
        if fit is not None:
            metadata["blowup_fit"] = fit.to_dict()
    logger.info(
        f"FD oracle ended with {outcome.kind.value} at t={t:.10g} "
        f"after {steps} steps, {halvings} halvings"
    )
    return Trajectory(
        samples=samples,
        outcome=outcome,
        spec=fd_spec,
        checkpoints=checkpoints,
        s_minus_entry=s_minus_entry,
        metadata=metadata,
    )
