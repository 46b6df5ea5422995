"""Sampled lower bounds for Λ_α = sup { ||u||_2^2 / 2 : u on the Nehari manifold, J(u) <= α }.

On the Nehari manifold J(u) = ((p-1)/(2(p+1)))||u_xx||^2, so the energy
slice is the ball ||u_xx||_2 <= r(α). With the ray parametrisation
u = λ*(w) w, ||w_xx||_2 = 1, the constraint reads λ*(w) <= r.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from ..core.domain import DomainSpec, SpectralField
from ..core.errors import AlphaBelowDepthError
from ..functionals.diagnostics import h2_norm_sq, l2_norm_sq
from ..utils.performance import timed
from .projection import LandscapePoint, NehariLandscape, nehari_radius
from .well_depth import MAX_BACKTRACKS, STEP_RANGE, OptimizerConfig, WellDepthEstimate, cached_well_depth, seed_fields

logger = logging.getLogger(__name__)

BISECTION_STEPS = 40
STALL_ITERATIONS = 20
# Points within this distance of log r count as on the boundary.
ACTIVE_MARGIN = 1e-10


@dataclass(frozen=True, eq=False)
class LambdaAlphaEstimate:
    """Best feasible value found; a lower bound on Λ_α."""

    value: float
    maximizer: SpectralField
    alpha: float
    radius: float
    converged: bool
    d_hat: float
    seeds_used: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "alpha": self.alpha,
            "value": self.value,
            "radius": self.radius,
            "converged": self.converged,
            "d_hat": self.d_hat,
            "seeds_used": self.seeds_used,
            "lower_bound": True,
        }


class _ConstrainedAscent:
    """Projected ascent of log(||λ* w||^2 / 2) subject to log λ*(w) <= log r."""

    def __init__(self, landscape: NehariLandscape, radius: float, cfg: OptimizerConfig):
        self.landscape = landscape
        self.log_r = math.log(radius)
        self.cfg = cfg

    def feasible(self, point: LandscapePoint) -> bool:
        return self.landscape.log_lambda_star(point) <= self.log_r

    def _direction(self, point: LandscapePoint, grad: np.ndarray) -> np.ndarray:
        """Ascent direction with the outward constraint component removed on the boundary."""
        if self.landscape.log_lambda_star(point) < self.log_r - ACTIVE_MARGIN:
            return grad
        normal = self.landscape.grad_log_lambda_star(point)
        outward = float(np.dot(grad, normal))
        if outward <= 0:
            return grad
        return grad - outward / float(np.dot(normal, normal)) * normal

    def _pull_back(self, current: np.ndarray, trial: np.ndarray) -> Optional[LandscapePoint]:
        """Move an infeasible trial back onto the constraint boundary."""
        landscape = self.landscape
        point = landscape.evaluate(trial)
        normal = landscape.grad_log_lambda_star(point)
        excess = landscape.log_lambda_star(point) - self.log_r
        mu = excess / max(float(np.dot(normal, normal)), 1e-300)
        for _ in range(BISECTION_STEPS):
            candidate = landscape.evaluate(landscape.normalize(trial - mu * normal))
            if self.feasible(candidate):
                low, high = 0.0, mu
                for _ in range(BISECTION_STEPS):
                    middle = 0.5 * (low + high)
                    point = landscape.evaluate(landscape.normalize(trial - middle * normal))
                    if self.feasible(point):
                        high, candidate = middle, point
                    else:
                        low = middle
                return candidate
            mu *= 2.0
        # Chord bisection between the feasible current point and the trial.
        low, high = 0.0, 1.0
        best = None
        for _ in range(BISECTION_STEPS):
            middle = 0.5 * (low + high)
            point = landscape.evaluate(landscape.normalize(current + middle * (trial - current)))
            if self.feasible(point):
                low, best = middle, point
            else:
                high = middle
        return best

    def run(self, w0: np.ndarray) -> Optional[Dict[str, Any]]:
        landscape = self.landscape
        point = landscape.evaluate(landscape.normalize(w0))
        if not self.feasible(point):
            return None
        value, grad = landscape.log_half_l2(point)
        step = self.cfg.initial_step
        previous = None
        kkt = float("inf")
        stalled = 0
        for _ in range(self.cfg.max_iter):
            direction = self._direction(point, grad)
            kkt = float(np.linalg.norm(direction))
            if kkt <= self.cfg.kkt_tol:
                break
            if previous is not None:
                s = point.v - previous[0]
                y = previous[1] - direction
                sy = float(np.dot(s, y))
                if sy > 0:
                    step = float(np.clip(np.dot(s, s) / sy, *STEP_RANGE))
            accepted = None
            for _ in range(MAX_BACKTRACKS):
                trial = landscape.normalize(point.v + step * direction)
                candidate = landscape.evaluate(trial)
                required = value + self.cfg.armijo * step * kkt**2
                if not self.feasible(candidate):
                    candidate = self._pull_back(point.v, trial)
                    required = value
                if candidate is not None:
                    trial_value, trial_grad = landscape.log_half_l2(candidate)
                    if trial_value > required:
                        accepted = (candidate, trial_value, trial_grad)
                        break
                step *= 0.5
            if accepted is None:
                break
            previous = (point.v, direction)
            stalled = stalled + 1 if accepted[1] - value <= 1e-14 * (1.0 + abs(value)) else 0
            point, value, grad = accepted
            if stalled >= STALL_ITERATIONS:
                break
        return {"point": point, "value": value, "kkt": kkt, "converged": kkt <= self.cfg.kkt_tol}


@timed("lambda_alpha")
def estimate_lambda_alpha(
    alpha: float,
    spec: DomainSpec,
    opt_cfg: Optional[OptimizerConfig] = None,
    depth: Optional[WellDepthEstimate] = None,
    warm_start: Sequence[SpectralField] = (),
) -> LambdaAlphaEstimate:
    """Largest ||u||_2^2 / 2 found over Nehari elements with ||u_xx||_2 <= sqrt(2α(p+1)/(p-1)).

    Seeds are the warm starts, the depth minimiser and the multistart
    fields that satisfy the constraint. Starting from a feasible point the
    ascent never lowers the value, so passing the maximiser of a smaller α
    as a warm start makes estimates monotone in α.

    Raises:
        AlphaBelowDepthError: if alpha does not exceed the estimated depth.
    """
    cfg = opt_cfg or OptimizerConfig()
    depth = depth or cached_well_depth(spec, cfg)
    if not alpha > depth.d_hat:
        raise AlphaBelowDepthError(f"alpha={alpha} must exceed d_hat={depth.d_hat}")
    radius = nehari_radius(alpha, spec.p)
    landscape = NehariLandscape(spec)
    ascent = _ConstrainedAscent(landscape, radius, cfg)

    starts: List[np.ndarray] = [landscape.to_weighted(f.coeffs) for f in warm_start]
    starts.append(landscape.to_weighted(depth.minimizer.coeffs))
    starts.extend(landscape.to_weighted(coeffs) for _, coeffs in seed_fields(spec, cfg))

    best = None
    used = 0
    for w0 in starts:
        if not np.any(w0):
            continue
        result = ascent.run(w0)
        if result is None:
            continue
        used += 1
        if best is None or result["value"] > best["value"]:
            best = result
    if best is None:
        raise AlphaBelowDepthError(f"No feasible starting field for alpha={alpha}")

    maximizer = landscape.nehari_field(best["point"].v)
    value = 0.5 * l2_norm_sq(maximizer, spec)
    if not best["converged"]:
        logger.warning(f"Lambda_alpha ascent not converged at alpha={alpha} (kkt={best['kkt']:.3e})")
    logger.info(
        f"Lambda_alpha >= {value:.10g} at alpha={alpha:.10g} (radius {radius:.6g}, "
        f"||u_xx||={math.sqrt(h2_norm_sq(maximizer, spec)):.6g}, {used} seeds)"
    )
    return LambdaAlphaEstimate(
        value=value,
        maximizer=maximizer,
        alpha=alpha,
        radius=radius,
        converged=best["converged"],
        d_hat=depth.d_hat,
        seeds_used=used,
    )


def lambda_alpha_curve(
    alphas: Sequence[float],
    spec: DomainSpec,
    opt_cfg: Optional[OptimizerConfig] = None,
    depth: Optional[WellDepthEstimate] = None,
) -> List[LambdaAlphaEstimate]:
    """Estimates over increasing α, each warm-started from the previous maximiser."""
    cfg = opt_cfg or OptimizerConfig()
    depth = depth or cached_well_depth(spec, cfg)
    estimates: List[LambdaAlphaEstimate] = []
    for alpha in sorted(alphas):
        warm = [estimates[-1].maximizer] if estimates else []
        estimates.append(estimate_lambda_alpha(alpha, spec, cfg, depth=depth, warm_start=warm))
    return estimates
