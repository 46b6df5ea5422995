"""Blow-up time extrapolation and evidence gathered after the S⁻ entry."""

import logging
import math
import warnings
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import OptimizeWarning, curve_fit

from ..core.domain import Outcome, RunOutcome
from ..core.errors import InsufficientTailError
from .trajectory import Trajectory

logger = logging.getLogger(__name__)

MIN_TAIL_SAMPLES = 8
TAIL_DECADE = 10.0


@dataclass(frozen=True)
class BlowupFit:
    """Result of fitting ||u||_∞ ≈ C (T - t)^(-β) to the growing tail."""

    T: float
    fitted_exponent: float
    ansatz_exponent: float
    n_tail: int
    t_first: float
    t_last: float

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        if not math.isfinite(self.fitted_exponent):
            data["fitted_exponent"] = None
        return data


def _growing_tail(t: np.ndarray, linf: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Longest strictly increasing trailing run, cut to its last decade of growth."""
    non_increasing = np.flatnonzero(np.diff(linf) <= 0)
    start = int(non_increasing[-1]) + 1 if non_increasing.size else 0
    t, linf = t[start:], linf[start:]
    if linf.size:
        keep = linf >= linf[-1] / TAIL_DECADE
        t, linf = t[keep], linf[keep]
    return t, linf


def fit_blowup_tail(
    t: Sequence[float], linf: Sequence[float], p: float, min_samples: int = MIN_TAIL_SAMPLES
) -> BlowupFit:
    """Extrapolate the blow-up time from samples of ||u||_∞.

    Under the ansatz ||u||_∞ = C (T - t)^(-1/(p-1)) the quantity
    ||u||_∞^-(p-1) is linear in t and vanishes at T. T comes from that
    linear fit; the exponent is then fitted freely and only reported.

    Raises:
        InsufficientTailError: fewer than ``min_samples`` growing samples,
            or a tail that does not extrapolate to a finite time.
    """
    t = np.asarray(t, dtype=float)
    linf = np.asarray(linf, dtype=float)
    tail_t, tail_u = _growing_tail(t, linf)
    if tail_t.size < min_samples or not np.all(tail_u > 0):
        raise InsufficientTailError(
            f"Only {tail_t.size} growing tail samples; need at least {min_samples}"
        )
    ansatz = 1.0 / (p - 1.0)
    t_last = float(tail_t[-1])
    shifted = tail_t - t_last
    slope, intercept = np.polyfit(shifted, tail_u ** (-(p - 1.0)), 1)
    if not slope < 0:
        raise InsufficientTailError("Tail growth does not extrapolate to a finite blow-up time")
    T = t_last - intercept / slope
    return BlowupFit(
        T=float(T),
        fitted_exponent=_fit_exponent(shifted, tail_u, T - t_last, ansatz),
        ansatz_exponent=ansatz,
        n_tail=int(tail_t.size),
        t_first=float(tail_t[0]),
        t_last=t_last,
    )


def _fit_exponent(shifted: np.ndarray, linf: np.ndarray, remaining: float, ansatz: float) -> float:
    """Free fit of log ||u||_∞ = log C - β log(T - t) with T and β as unknowns."""
    if not remaining > 0:
        return float("nan")

    def model(s, log_c, time_left, beta):
        return log_c - beta * np.log(time_left - s)

    log_c0 = float(np.mean(np.log(linf) + ansatz * np.log(remaining - shifted)))
    lower_time = max(remaining * 1e-3, 1e-300)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("error", OptimizeWarning)
            params, _ = curve_fit(
                model,
                shifted,
                np.log(linf),
                p0=(log_c0, remaining, ansatz),
                bounds=([-np.inf, lower_time, 0.0], [np.inf, max(remaining * 1e3, 1.0), 50.0]),
                maxfev=5000,
            )
    except (RuntimeError, ValueError, OptimizeWarning) as e:
        logger.warning(f"Free exponent fit failed: {e}")
        return float("nan")
    return float(params[2])


def estimate_blowup_time(traj: Trajectory) -> BlowupFit:
    """Fit the blow-up time of a run that ended in blow-up.

    Raises:
        InsufficientTailError: for non-blow-up runs or a short growing tail.
    """
    if traj.outcome.kind is not Outcome.BLOW_UP:
        raise InsufficientTailError(f"Run ended with {traj.outcome.kind.value}, not BlowUp")
    return fit_blowup_tail(traj.column("t"), traj.column("linf"), traj.spec.p)


def blowup_outcome(
    t: Sequence[float],
    linf: Sequence[float],
    p: float,
    trigger: str,
    thresholds: Dict[str, float],
    evidence: str,
) -> Tuple[RunOutcome, Optional[BlowupFit]]:
    """BlowUp verdict whose estimate is the tail fit clamped to t_end.

    Without a usable tail the estimate is t_end itself and the evidence
    says so.
    """
    t_end = float(t[-1])
    fit: Optional[BlowupFit] = None
    try:
        fit = fit_blowup_tail(t, linf, p)
        estimate = max(fit.T, t_end)
        evidence += f"; tail fit T={fit.T:.10g} over {fit.n_tail} samples"
    except InsufficientTailError as e:
        logger.warning(f"Blow-up time fit unavailable: {e}")
        estimate = t_end
        evidence += f"; no tail fit ({e}), estimate set to t_end"
    outcome = RunOutcome(
        kind=Outcome.BLOW_UP,
        t_end=t_end,
        blowup_time_estimate=estimate,
        evidence=evidence,
        trigger=trigger,
        thresholds=thresholds,
    )
    return outcome, fit


@dataclass
class EntryBoundReport:
    """Checks of I(u(t)) <= I(u(t0)) - 2∫_{t0}^t ||u_τ||^2 dτ after the S⁻ entry t0."""

    t0: Optional[float]
    I_t0: Optional[float] = None
    J_t0: Optional[float] = None
    J_t0_at_most_depth: Optional[bool] = None
    checked: int = 0
    violations: int = 0
    max_excess: float = 0.0
    first_violation_t: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def entry_bound_report(
    traj: Trajectory, d_hat: Optional[float] = None, rtol: float = 1e-8
) -> EntryBoundReport:
    """Evidence for the integrated inequality used by the sufficiency argument.

    Also records J(u(t0)) and, when ``d_hat`` is given, which side of the
    depth it falls on.
    """
    if traj.s_minus_entry is None:
        return EntryBoundReport(t0=None)
    entry = next(s for s in traj.samples if s.t == traj.s_minus_entry)
    after = [s for s in traj.samples if s.t >= entry.t]
    tolerance = rtol * (1.0 + abs(entry.I))
    excess = np.array(
        [s.I - (entry.I - 2.0 * (s.dissipation - entry.dissipation)) for s in after]
    )
    flagged = np.flatnonzero(excess > tolerance)
    report = EntryBoundReport(
        t0=entry.t,
        I_t0=entry.I,
        J_t0=entry.J,
        J_t0_at_most_depth=None if d_hat is None else bool(entry.J <= d_hat),
        checked=len(after),
        violations=int(flagged.size),
        max_excess=float(np.max(excess)) if excess.size else 0.0,
        first_violation_t=float(after[flagged[0]].t) if flagged.size else None,
    )
    if report.violations:
        logger.info(
            f"Entry bound exceeded at {report.violations} of {report.checked} samples after t0={entry.t}"
        )
    return report
