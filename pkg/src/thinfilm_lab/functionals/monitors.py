"""Identity residuals and inequality monitors evaluated over a trajectory.

Nothing here asserts; every function returns data that the verification
suites compare against their tolerances.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Tuple

import numpy as np

from ..core.errors import EmptyTrajectoryError, EpsilonOutOfRangeError, TooFewSamplesError

if TYPE_CHECKING:
    from ..integrator.trajectory import Trajectory

logger = logging.getLogger(__name__)

MAX_LISTED_VIOLATIONS = 50


def _require(traj: "Trajectory", minimum: int, what: str) -> None:
    if not traj.samples:
        raise EmptyTrajectoryError(f"{what} needs a non-empty trajectory")
    if len(traj.samples) < minimum:
        raise TooFewSamplesError(f"{what} needs at least {minimum} samples, got {len(traj.samples)}")


def centered_first_difference(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Second-order f'(t_i) at interior points of a non-uniform grid."""
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    return (h1**2 * f[2:] - h2**2 * f[:-2] + (h2**2 - h1**2) * f[1:-1]) / (h1 * h2 * (h1 + h2))


def centered_second_difference(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    """f''(t_i) at interior points of a non-uniform grid."""
    h1 = t[1:-1] - t[:-2]
    h2 = t[2:] - t[1:-1]
    return 2.0 * (h1 * f[2:] - (h1 + h2) * f[1:-1] + h2 * f[:-2]) / (h1 * h2 * (h1 + h2))


def cumulative_trapezoid(t: np.ndarray, f: np.ndarray) -> np.ndarray:
    """∫_{t_0}^{t_i} f, starting at 0."""
    out = np.zeros_like(f, dtype=float)
    if f.size > 1:
        out[1:] = np.cumsum(np.diff(t) * (f[1:] + f[:-1]) / 2.0)
    return out


def _relative(residual: np.ndarray, reference: np.ndarray) -> np.ndarray:
    floor = max(1e-300, 1e-12 * float(np.max(np.abs(reference), initial=0.0)))
    return np.abs(residual) / np.maximum(np.abs(reference), floor)


def energy_identity_residual(traj: "Trajectory") -> np.ndarray:
    """|∫_0^t ||u_τ||^2 dτ + J(t) - J(0)| at every sample, by trapezoids over samples."""
    if not traj.samples:
        raise EmptyTrajectoryError("Energy identity needs a non-empty trajectory")
    t = traj.column("t")
    dissipated = cumulative_trapezoid(t, traj.column("ut_l2sq"))
    energy = traj.column("J")
    return np.abs(dissipated + energy - energy[0])


def l2_identity_residual(traj: "Trajectory", relative: bool = False) -> np.ndarray:
    """d/dt ||u||^2 + 2I at interior samples, by centered differences."""
    _require(traj, 3, "L2 identity")
    t = traj.column("t")
    twice_nehari = 2.0 * traj.column("I")[1:-1]
    residual = centered_first_difference(t, traj.column("l2sq")) + twice_nehari
    return _relative(residual, twice_nehari) if relative else np.abs(residual)


def m_second_difference_residual(traj: "Trajectory", relative: bool = False) -> np.ndarray:
    """Centered second differences of M compared with M'' = -I."""
    _require(traj, 3, "M'' check")
    t = traj.column("t")
    nehari = traj.column("I")[1:-1]
    residual = centered_second_difference(t, traj.column("M")) + nehari
    return _relative(residual, nehari) if relative else np.abs(residual)


def energy_increase_violations(traj: "Trajectory", rtol: float = 1e-8) -> List[Tuple[float, float]]:
    """Steps where J grows by more than rtol (1 + |J(0)|)."""
    if not traj.samples:
        raise EmptyTrajectoryError("Energy monotonicity needs a non-empty trajectory")
    energy = traj.column("J")
    tolerance = rtol * (1.0 + abs(energy[0]))
    increments = np.diff(energy)
    times = traj.column("t")[1:]
    return [(float(t), float(d)) for t, d in zip(times, increments) if d > tolerance]


def necessity_bound_violations(traj: "Trajectory", rtol: float = 1e-6) -> List[Tuple[float, float]]:
    """Samples breaking ||u_xx||^2 <= (2(p+1)/(p-1)) J(u0) (1 + rtol).

    Only meaningful when every sample has I >= 0; returns an empty list otherwise.
    """
    if not traj.samples:
        raise EmptyTrajectoryError("Necessity bound needs a non-empty trajectory")
    if np.any(traj.column("I") < 0):
        return []
    p = traj.spec.p
    bound = 2.0 * (p + 1.0) / (p - 1.0) * traj.samples[0].J * (1.0 + rtol)
    return [(s.t, s.h2sq) for s in traj.samples if s.h2sq > bound]


@dataclass
class MonotonicityReport:
    """Discrete evidence about d/dt ||u||_{p+1}^{p+1} and the inequality dI/dt <= -2||u_t||^2."""

    n_intervals: int
    lp1_increasing: int
    lp1_decreasing: int
    lp1_flat: int
    violation_count: int
    max_violation: float
    identity_gap: float
    tolerance: float
    violations: List[Tuple[float, float]] = field(default_factory=list)
    d_lp1: List[Tuple[float, float]] = field(default_factory=list)
    d_I: List[Tuple[float, float]] = field(default_factory=list)

    def to_dict(self, include_series: bool = False) -> Dict[str, Any]:
        data = {
            "n_intervals": self.n_intervals,
            "lp1_increasing": self.lp1_increasing,
            "lp1_decreasing": self.lp1_decreasing,
            "lp1_flat": self.lp1_flat,
            "violation_count": self.violation_count,
            "max_violation": self.max_violation,
            "identity_gap": self.identity_gap,
            "tolerance": self.tolerance,
            "violations": [list(v) for v in self.violations],
        }
        if include_series:
            data["d_lp1"] = [list(v) for v in self.d_lp1]
            data["d_I"] = [list(v) for v in self.d_I]
        return data


def monotonicity_monitor(traj: "Trajectory", tolerance: Optional[float] = None) -> MonotonicityReport:
    """Record the sign of d/dt ||u||_{p+1}^{p+1} and check dI/dt <= -2||u_t||^2 per interval.

    dI/dt is computed twice: from differences of I, and as
    2 dJ/dt - ((p-1)/(p+1)) d/dt ||u||_{p+1}^{p+1}; the largest gap between
    the two is reported as ``identity_gap``.
    """
    _require(traj, 2, "Monotonicity monitor")
    p = traj.spec.p
    t = traj.column("t")
    dt = np.diff(t)
    mid = (t[1:] + t[:-1]) / 2.0
    d_lp1 = np.diff(traj.column("lp1")) / dt
    d_nehari = np.diff(traj.column("I")) / dt
    d_energy = np.diff(traj.column("J")) / dt
    recombined = 2.0 * d_energy - (p - 1.0) / (p + 1.0) * d_lp1
    ut = traj.column("ut_l2sq")
    bound = -(ut[1:] + ut[:-1])
    if tolerance is None:
        tolerance = 1e-8 * (1.0 + float(np.max(np.abs(traj.column("I")))))
    excess = d_nehari - bound
    flagged = np.flatnonzero(excess > tolerance)
    gap = np.abs(d_nehari - recombined)
    report = MonotonicityReport(
        n_intervals=int(dt.size),
        lp1_increasing=int(np.sum(d_lp1 > 0)),
        lp1_decreasing=int(np.sum(d_lp1 < 0)),
        lp1_flat=int(np.sum(d_lp1 == 0)),
        violation_count=int(flagged.size),
        max_violation=float(np.max(excess[flagged])) if flagged.size else 0.0,
        identity_gap=float(np.max(gap)) if gap.size else 0.0,
        tolerance=float(tolerance),
        violations=[(float(mid[i]), float(excess[i])) for i in flagged[:MAX_LISTED_VIOLATIONS]],
        d_lp1=list(zip(mid.tolist(), d_lp1.tolist())),
        d_I=list(zip(mid.tolist(), d_nehari.tolist())),
    )
    logger.debug(
        f"Monotonicity: {report.lp1_increasing} increasing / {report.lp1_decreasing} decreasing "
        f"intervals of ||u||^(p+1), {report.violation_count} flagged"
    )
    return report


def epsilon_interval(p: float) -> Tuple[float, float]:
    """Admissible open interval for the concavity parameter ε."""
    return 0.0, 1.0 - math.sqrt(2.0 / (p + 1.0))


def default_epsilon(p: float) -> float:
    return epsilon_interval(p)[1] / 2.0


def concavity_exponent(p: float, epsilon: float) -> float:
    """η = ((p+1)(1-ε)^2 - 2) / 2."""
    return ((p + 1.0) * (1.0 - epsilon) ** 2 - 2.0) / 2.0


@dataclass
class ConcavityReport:
    """Quantities of the concavity argument along a trajectory."""

    epsilon: float
    eta: float
    F_series: List[Tuple[float, float]]
    sign_summary: Dict[str, int]
    gap_series: List[Tuple[float, float]]
    degenerate: bool = False

    def to_dict(self, include_series: bool = False) -> Dict[str, Any]:
        gaps = [g for _, g in self.gap_series]
        data: Dict[str, Any] = {
            "epsilon": self.epsilon,
            "eta": self.eta,
            "degenerate": self.degenerate,
            "sign_summary": dict(self.sign_summary),
            "gap_min": min(gaps) if gaps else None,
            "gap_max": max(gaps) if gaps else None,
            "first_positive_gap_t": next((t for t, g in self.gap_series if g > 0), None),
        }
        if include_series:
            data["F_series"] = [list(v) for v in self.F_series]
            data["gap_series"] = [list(v) for v in self.gap_series]
        return data


def concavity_report(traj: "Trajectory", epsilon: Optional[float] = None) -> ConcavityReport:
    """F = M^{-η}, its second-difference signs, and M''M - ((p+1)/2)(1-ε)^2 M'^2.

    Raises:
        EpsilonOutOfRangeError: if ε lies outside (0, 1 - sqrt(2/(p+1))).
    """
    p = traj.spec.p
    low, high = epsilon_interval(p)
    epsilon = default_epsilon(p) if epsilon is None else float(epsilon)
    if not low < epsilon < high:
        raise EpsilonOutOfRangeError(f"epsilon={epsilon} outside ({low}, {high:.5f}) for p={p}")
    eta = concavity_exponent(p, epsilon)
    if not traj.samples:
        raise EmptyTrajectoryError("Concavity report needs a non-empty trajectory")

    t = traj.column("t")
    big_m = traj.column("M")
    mp = traj.column("l2sq") / 2.0
    mpp = -traj.column("I")
    gap = mpp * big_m - (p + 1.0) / 2.0 * (1.0 - epsilon) ** 2 * mp**2
    gap_series = list(zip(t.tolist(), gap.tolist()))

    positive = big_m > 0
    if not np.any(positive):
        logger.info("Concavity report: M vanishes identically; F is undefined")
        return ConcavityReport(
            epsilon=epsilon,
            eta=eta,
            F_series=[],
            sign_summary={"convex": 0, "concave": 0, "flat": 0},
            gap_series=gap_series,
            degenerate=True,
        )

    t_pos = t[positive]
    f_values = big_m[positive] ** (-eta)
    summary = {"convex": 0, "concave": 0, "flat": 0}
    if f_values.size >= 3:
        curvature = centered_second_difference(t_pos, f_values)
        summary = {
            "convex": int(np.sum(curvature > 0)),
            "concave": int(np.sum(curvature < 0)),
            "flat": int(np.sum(curvature == 0)),
        }
    return ConcavityReport(
        epsilon=epsilon,
        eta=eta,
        F_series=list(zip(t_pos.tolist(), f_values.tolist())),
        sign_summary=summary,
        gap_series=gap_series,
    )
