"""Execute one configured experiment and write its artifacts."""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from ..core.domain import DomainSpec, SpectralField
from ..core.errors import EmptyTrajectoryError, TooFewSamplesError
from ..functionals.diagnostics import energy_J, nehari_I
from ..functionals.monitors import (
    concavity_report,
    energy_identity_residual,
    energy_increase_violations,
    l2_identity_residual,
    m_second_difference_residual,
    monotonicity_monitor,
    necessity_bound_violations,
)
from ..integrator.adaptive import advance
from ..integrator.blowup import entry_bound_report
from ..integrator.trajectory import Trajectory
from ..nehari.classify import (
    ClassificationReport,
    classify_initial_datum,
    prediction_consistent,
    reconcile_with_run,
)
from ..nehari.lambda_alpha import estimate_lambda_alpha
from ..nehari.well_depth import OptimizerConfig, cached_well_depth
from ..oracle.compare import ComparisonReport, compare
from ..oracle.fd_solver import fd_advance, grid_datum
from ..oracle.weak_form import WeakFormReport, weak_form_residual
from ..spectral.operators import dealiasing_note
from ..utils.performance import RunTimings
from .artifacts import ArtifactWriter
from .config import ExperimentConfig, ensure_output_directory
from .datum import build_datum

logger = logging.getLogger(__name__)


@dataclass
class RunResult:
    """Everything one experiment produced, in memory and on disk."""

    config: ExperimentConfig
    trajectory: Trajectory
    summary: Dict[str, Any]
    classification: Optional[ClassificationReport] = None
    consistent: bool = True
    fd_trajectory: Optional[Trajectory] = None
    comparison: Optional[ComparisonReport] = None
    weak_form: Optional[WeakFormReport] = None
    paths: Dict[str, str] = field(default_factory=dict)
    timings: Dict[str, Any] = field(default_factory=dict)


def classify_datum(
    u0: SpectralField,
    spec: DomainSpec,
    opt_cfg: OptimizerConfig,
    with_lambda_alpha: bool = True,
) -> ClassificationReport:
    """Static prediction, estimating Λ_J(u0) only when the high-energy branch needs it."""
    depth = cached_well_depth(spec, opt_cfg)
    lambda_alpha_hat = None
    J0, I0 = energy_J(u0, spec), nehari_I(u0, spec)
    if with_lambda_alpha and I0 < 0 and J0 > depth.d_hat:
        lambda_alpha_hat = estimate_lambda_alpha(J0, spec, opt_cfg, depth=depth).value
    return classify_initial_datum(u0, spec, depth.d_hat, lambda_alpha_hat)


def classify_experiment(cfg: ExperimentConfig) -> ClassificationReport:
    u0 = build_datum(cfg.datum, cfg.domain)
    return classify_datum(
        u0, cfg.domain, cfg.classification.optimizer, cfg.classification.lambda_alpha
    )


def _max_or_none(values: np.ndarray) -> Optional[float]:
    return float(np.max(values)) if values.size else None


def identity_summary(traj: Trajectory) -> Dict[str, Any]:
    """Maxima of the identity residuals; entries stay None when too few samples exist."""
    summary: Dict[str, Any] = {
        "energy_identity_max": _max_or_none(energy_identity_residual(traj)),
        "energy_increase_violations": len(energy_increase_violations(traj)),
        "necessity_bound_violations": len(necessity_bound_violations(traj)),
        "mass_max": float(np.max(np.abs(traj.column("mass")))),
    }
    try:
        summary["l2_identity_max_rel"] = _max_or_none(l2_identity_residual(traj, relative=True))
        summary["m_second_difference_max_rel"] = _max_or_none(
            m_second_difference_residual(traj, relative=True)
        )
    except TooFewSamplesError as e:
        logger.warning(f"Identity residuals skipped: {e}")
        summary["l2_identity_max_rel"] = None
        summary["m_second_difference_max_rel"] = None
    return summary


def run_metadata(spec: DomainSpec) -> Dict[str, Any]:
    return {
        "a": spec.a,
        "p": spec.p,
        "n_modes": spec.n_modes,
        "dealiasing": dealiasing_note(spec),
        "p_is_integer": spec.p_is_integer,
    }


def _monitor_reports(traj: Trajectory) -> Dict[str, Any]:
    reports: Dict[str, Any] = {}
    try:
        reports["monotonicity"] = monotonicity_monitor(traj).to_dict()
    except (TooFewSamplesError, EmptyTrajectoryError) as e:
        logger.warning(f"Monotonicity monitor skipped: {e}")
        reports["monotonicity"] = None
    reports["concavity"] = concavity_report(traj).to_dict()
    return reports


def run_experiment(cfg: ExperimentConfig, write: bool = True) -> RunResult:
    """Build the datum, integrate, monitor, classify and write artifacts.

    Raises:
        ConfigFileError: if the output directory cannot be written.
        InvalidDescriptorError: if the datum descriptor cannot be built.
    """
    timings = RunTimings()
    spec = cfg.domain
    directory = ensure_output_directory(cfg.outputs.directory) if write else None
    logger.info(f"Running '{cfg.name}' on a={spec.a:.6g}, p={spec.p:g}, N={spec.n_modes}")

    u0 = build_datum(cfg.datum, spec)

    classification = None
    if cfg.classification.enabled:
        with timings.measure("classify"):
            classification = classify_datum(
                u0, spec, cfg.classification.optimizer, cfg.classification.lambda_alpha
            )

    with timings.measure("advance"):
        traj = advance(u0, spec, cfg.stepper)

    consistent = True
    if classification is not None:
        classification = reconcile_with_run(classification, traj)
        consistent = prediction_consistent(classification, traj)
        if not consistent:
            logger.error(
                f"Run '{cfg.name}' ended {traj.outcome.kind.value} against prediction "
                f"{classification.predicted.value}"
            )

    summary: Dict[str, Any] = {
        "name": cfg.name,
        "config": cfg.to_dict(),
        "metadata": run_metadata(spec),
        "outcome": traj.outcome.to_dict(),
        "s_minus_entry": traj.s_minus_entry,
        "n_samples": len(traj),
        "solver": dict(traj.metadata),
        "identities": identity_summary(traj),
        "entry_bound": entry_bound_report(
            traj, d_hat=classification.d_hat if classification else None
        ).to_dict(),
        "classification": classification.to_dict() if classification else None,
        "prediction_consistent": consistent,
        **_monitor_reports(traj),
    }

    fd_traj = comparison = weak_form = None
    if cfg.oracle.enabled:
        with timings.measure("fd_advance"):
            fd_traj = fd_advance(grid_datum(u0, cfg.oracle.fd.n_points), spec, cfg.oracle.fd)
        comparison = compare(traj, fd_traj)
        summary["oracle"] = {
            "fd": cfg.oracle.fd.to_dict(),
            "fd_outcome": fd_traj.outcome.to_dict(),
            "comparison": comparison.to_dict(),
        }
    if cfg.oracle.weak_form:
        weak_form = weak_form_residual(traj, spec, cfg.oracle.n_test, cfg.oracle.n_time)
        summary["weak_form"] = weak_form.to_dict()

    paths: Dict[str, str] = {}
    if directory is not None:
        writer = ArtifactWriter(directory, cfg.outputs)
        paths = writer.export(traj, summary, name=cfg.name)
        if fd_traj is not None:
            paths.update(
                {f"fd_{kind}": path for kind, path in writer.export(fd_traj, None, cfg.name, prefix="fd_").items()}
            )

    timings.log_summary(logging.INFO)
    return RunResult(
        config=cfg,
        trajectory=traj,
        summary=summary,
        classification=classification,
        consistent=consistent,
        fd_trajectory=fd_traj,
        comparison=comparison,
        weak_form=weak_form,
        paths=paths,
        timings=timings.to_dict(),
    )
