"""Potential-well depth d = inf over the Nehari manifold of J."""

import functools
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from ..core.domain import DomainSpec, SpectralField
from ..core.errors import ConfigInvalidError
from ..functionals.diagnostics import energy_J, h2_norm_sq, nehari_I
from ..utils.performance import timed
from .projection import LandscapePoint, NehariLandscape, reduced_energy

logger = logging.getLogger(__name__)

MAX_BACKTRACKS = 60
STEP_RANGE = (1e-12, 1e6)


@dataclass(frozen=True)
class OptimizerConfig:
    """Multistart descent settings shared by the depth and Λ_α estimators."""

    n_single_modes: int = 4
    n_random_seeds: int = 8
    random_max_k: int = 8
    seed: int = 20240
    max_iter: int = 5000
    grad_tol: float = 1e-9
    kkt_tol: float = 1e-7
    armijo: float = 1e-4
    initial_step: float = 1e-2
    workers: int = 1

    def __post_init__(self):
        errors = []
        if self.n_single_modes < 1:
            errors.append("n_single_modes must be >= 1")
        if self.n_random_seeds < 0:
            errors.append("n_random_seeds must be >= 0")
        if self.random_max_k < 1:
            errors.append("random_max_k must be >= 1")
        if self.max_iter < 1:
            errors.append("max_iter must be >= 1")
        if not (self.grad_tol > 0 and self.kkt_tol > 0 and self.initial_step > 0):
            errors.append("tolerances and initial_step must be positive")
        if not 0 < self.armijo < 1:
            errors.append("armijo must lie in (0, 1)")
        if self.workers < 1:
            errors.append("workers must be >= 1")
        if errors:
            raise ConfigInvalidError("Invalid optimizer config: " + "; ".join(errors))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "OptimizerConfig":
        unknown = set(data) - {f.name for f in fields(cls)}
        if unknown:
            raise ConfigInvalidError(f"Unknown optimizer keys: {sorted(unknown)}")
        return cls(**data)


@dataclass
class DescentResult:
    """Outcome of one seed."""

    label: str
    v: np.ndarray
    value: float
    grad_norm: float
    iterations: int
    converged: bool


@dataclass(frozen=True, eq=False)
class WellDepthEstimate:
    """Best Nehari element found and its energy."""

    d_hat: float
    minimizer: SpectralField
    n_modes_used: int
    multistart_count: int
    converged: bool
    grad_norm: float = 0.0
    iterations: int = 0
    best_seed: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "d_hat": self.d_hat,
            "n_modes_used": self.n_modes_used,
            "multistart_count": self.multistart_count,
            "converged": self.converged,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
            "best_seed": self.best_seed,
        }


def seed_fields(spec: DomainSpec, cfg: OptimizerConfig) -> List[Tuple[str, np.ndarray]]:
    """Single modes k = 1..n_single_modes, then band-limited random fields (coefficients)."""
    seeds: List[Tuple[str, np.ndarray]] = []
    for k in range(1, min(cfg.n_single_modes, spec.n_coeffs) + 1):
        coeffs = np.zeros(spec.n_coeffs)
        coeffs[k - 1] = 1.0
        seeds.append((f"mode-{k}", coeffs))
    rng = np.random.default_rng(cfg.seed)
    max_k = min(cfg.random_max_k, spec.n_coeffs)
    k = np.arange(1, max_k + 1, dtype=float)
    for index in range(cfg.n_random_seeds):
        coeffs = np.zeros(spec.n_coeffs)
        coeffs[:max_k] = rng.standard_normal(max_k) / k**2
        seeds.append((f"random-{index}", coeffs))
    return seeds


def descend(
    landscape: NehariLandscape,
    v0: np.ndarray,
    objective: Callable[[LandscapePoint], Tuple[float, np.ndarray]],
    cfg: OptimizerConfig,
    label: str = "",
) -> DescentResult:
    """Minimise a scale-invariant objective on the sphere ||u_xx||_2 = 1.

    Barzilai-Borwein trial steps with Armijo backtracking. The sufficient
    decrease test allows a few ulps of slack so that progress on the
    gradient continues once f has stopped changing in double precision.
    """
    v = landscape.normalize(v0)
    value, grad = objective(landscape.evaluate(v))
    step = cfg.initial_step
    previous: Optional[Tuple[np.ndarray, np.ndarray]] = None
    iterations = 0
    for iterations in range(1, cfg.max_iter + 1):
        grad_norm = float(np.linalg.norm(grad))
        if grad_norm <= cfg.grad_tol:
            return DescentResult(label, v, value, grad_norm, iterations - 1, True)
        if previous is not None:
            s = v - previous[0]
            y = grad - previous[1]
            sy = float(np.dot(s, y))
            if sy > 0:
                step = float(np.clip(np.dot(s, s) / sy, *STEP_RANGE))
        slack = 8.0 * np.finfo(float).eps * (1.0 + abs(value))
        accepted = None
        for _ in range(MAX_BACKTRACKS):
            trial = landscape.normalize(v - step * grad)
            trial_value, trial_grad = objective(landscape.evaluate(trial))
            if trial_value <= value - cfg.armijo * step * grad_norm**2 + slack:
                accepted = (trial, trial_value, trial_grad)
                break
            step *= 0.5
        if accepted is None:
            logger.debug(f"{label}: line search stalled at |grad|={grad_norm:.3e}")
            break
        previous = (v, grad)
        v, value, grad = accepted
    grad_norm = float(np.linalg.norm(grad))
    return DescentResult(label, v, value, grad_norm, iterations, grad_norm <= cfg.grad_tol)


def _run_seeds(tasks: List[Callable[[], DescentResult]], workers: int) -> List[DescentResult]:
    if workers <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(task) for task in tasks]
        return [future.result() for future in futures]


@timed("well depth")
def estimate_well_depth(spec: DomainSpec, opt_cfg: Optional[OptimizerConfig] = None) -> WellDepthEstimate:
    """Minimise the reduced energy from every multistart seed and keep the best.

    The returned ``converged`` flag is False when the best seed hit the
    iteration cap or stalled above the gradient tolerance.
    """
    cfg = opt_cfg or OptimizerConfig()
    landscape = NehariLandscape(spec)
    seeds = seed_fields(spec, cfg)

    def make_task(label: str, coeffs: np.ndarray) -> Callable[[], DescentResult]:
        return lambda: descend(landscape, landscape.to_weighted(coeffs), landscape.log_depth, cfg, label)

    results = _run_seeds([make_task(label, coeffs) for label, coeffs in seeds], cfg.workers)
    best = min(results, key=lambda r: r.value)
    minimizer = landscape.nehari_field(best.v)
    d_hat = energy_J(minimizer, spec)
    if not best.converged:
        logger.warning(
            f"Well-depth descent not converged (best seed {best.label}, |grad|={best.grad_norm:.3e})"
        )
    residual = abs(nehari_I(minimizer, spec)) / h2_norm_sq(minimizer, spec)
    logger.info(
        f"d_hat={d_hat:.12g} for a={spec.a:.6g}, p={spec.p:g}, N={spec.n_modes} "
        f"from {len(results)} seeds (best {best.label}, |I|/||u_xx||^2={residual:.1e})"
    )
    return WellDepthEstimate(
        d_hat=d_hat,
        minimizer=minimizer,
        n_modes_used=spec.n_modes,
        multistart_count=len(results),
        converged=best.converged,
        grad_norm=best.grad_norm,
        iterations=best.iterations,
        best_seed=best.label,
    )


@functools.lru_cache(maxsize=32)
def cached_well_depth(spec: DomainSpec, opt_cfg: OptimizerConfig) -> WellDepthEstimate:
    """estimate_well_depth memoised per (spec, optimizer config)."""
    return estimate_well_depth(spec, opt_cfg)


def single_mode_bound(spec: DomainSpec, k: int) -> float:
    """Reduced energy of cos(kπx/a), an upper bound on d."""
    return reduced_energy(SpectralField.mode(spec, k), spec)
