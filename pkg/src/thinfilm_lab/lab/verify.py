"""Acceptance batteries run by ``thinfilm-lab verify SUITE``.

Each suite returns a :class:`SuiteReport` of named checks; the CLI exits
with status 1 when any check fails.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from tabulate import tabulate

from ..core.domain import DomainSpec, Outcome, SpectralField
from ..core.errors import ConfigInvalidError
from ..functionals.diagnostics import (
    energy_J,
    h2_norm_sq,
    lambda_star,
    lp_norm_pow,
    nehari_I,
)
from ..functionals.monitors import (
    energy_identity_residual,
    l2_identity_residual,
    m_second_difference_residual,
    monotonicity_monitor,
    necessity_bound_violations,
)
from ..integrator.adaptive import StepperConfig, advance
from ..integrator.trajectory import Trajectory
from ..nehari.well_depth import OptimizerConfig, estimate_well_depth
from ..oracle.compare import compare
from ..oracle.fd_solver import FDConfig, fd_advance, grid_datum
from ..oracle.weak_form import weak_form_residual
from .artifacts import write_summary
from .config import ClassificationConfig, ExperimentConfig, OutputsConfig, ensure_output_directory
from .datum import DatumDescriptor, build_datum, cosine_combo
from .runner import run_experiment

logger = logging.getLogger(__name__)

PI = math.pi
# Required improvement when the step is halved (second order would give 4).
REFINEMENT_FACTOR = 3.0


@dataclass
class CheckResult:
    name: str
    value: Any
    threshold: str
    passed: bool
    detail: str = ""


@dataclass
class SuiteReport:
    """Outcome of one verification suite."""

    suite: str
    checks: List[CheckResult] = field(default_factory=list)
    quick: bool = False

    @property
    def passed(self) -> bool:
        return all(check.passed for check in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [check for check in self.checks if not check.passed]

    def add(self, name: str, value: Any, threshold: str, passed: bool, detail: str = "") -> None:
        self.checks.append(CheckResult(name, value, threshold, bool(passed), detail))
        if not passed:
            logger.warning(f"[{self.suite}] {name} failed: {value} vs {threshold} {detail}")

    def rows(self) -> List[Tuple[str, str, str, str]]:
        return [
            (check.name, _format_value(check.value), check.threshold, "PASS" if check.passed else "FAIL")
            for check in self.checks
        ]

    def to_table(self, tablefmt: str = "simple") -> str:
        return tabulate(self.rows(), headers=["check", "value", "threshold", "result"], tablefmt=tablefmt)

    def to_markdown(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        mode = " (quick)" if self.quick else ""
        lines = [f"# verify {self.suite}{mode}: {status}", "", self.to_table("github"), ""]
        details = [f"- {c.name}: {c.detail}" for c in self.checks if c.detail]
        if details:
            lines += ["## Details", "", *details, ""]
        return "\n".join(lines)


def _format_value(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _relative(value: float, expected: float) -> float:
    return abs(value - expected) / abs(expected)


# ----------------------------------------------------------------- identities


def smooth_run(dt: float, t_horizon: float, checkpoint_stride: int = 1) -> Trajectory:
    """0.5 cos(x) on (0, π), p = 3, at a fixed step dt."""
    spec = DomainSpec(a=PI, p=3.0, n_modes=64)
    u0 = build_datum(cosine_combo((1, 0.5)), spec)
    cfg = StepperConfig(
        dt_init=dt,
        dt_max=dt,
        t_horizon=t_horizon,
        checkpoint_stride=checkpoint_stride,
    )
    return advance(u0, spec, cfg)


def closed_form_checks(report: SuiteReport) -> None:
    spec = DomainSpec(a=PI, p=3.0, n_modes=64)
    u = SpectralField.mode(spec, 1)
    scale = lambda_star(u, spec)
    expected = {
        "||u_xx||^2 of cos x": (h2_norm_sq(u, spec), PI / 2),
        "||u||_4^4 of cos x": (lp_norm_pow(u, spec), 3 * PI / 8),
        "J(cos x)": (energy_J(u, spec), 5 * PI / 32),
        "I(cos x)": (nehari_I(u, spec), PI / 8),
        "lambda*(cos x)": (scale, math.sqrt(4.0 / 3.0)),
        "J(lambda* cos x)": (energy_J(u * scale, spec), PI / 6),
    }
    for name, (value, target) in expected.items():
        gap = _relative(value, target)
        report.add(name, gap, "rel <= 1e-10", gap <= 1e-10, f"value {value!r}, expected {target!r}")


def verify_identities(out_dir: Path, quick: bool = False) -> SuiteReport:
    """Closed-form values, mass, energy and L² identities, weak form, with dt halving."""
    report = SuiteReport("identities", quick=quick)
    closed_form_checks(report)

    horizon = 0.25 if quick else 1.0
    coarse = smooth_run(1e-3, horizon)
    fine = smooth_run(5e-4, horizon)

    for label, traj in (("dt", coarse), ("dt/2", fine)):
        worst_mass = max(
            abs(s.mass) / max(1.0, s.linf) for s in traj.samples
        )
        report.add(f"mass ({label})", worst_mass, "<= 1e-12", worst_mass <= 1e-12)

    J0 = coarse.samples[0].J
    energy = [float(np.max(energy_identity_residual(t))) for t in (coarse, fine)]
    report.add("energy identity", energy[0], f"<= {1e-6 * (1 + abs(J0)):.3g}", energy[0] <= 1e-6 * (1 + abs(J0)))
    _refinement(report, "energy identity", *energy)

    l2 = [float(np.max(l2_identity_residual(t, relative=True))) for t in (coarse, fine)]
    report.add("L2 identity (rel)", l2[0], "<= 1e-4", l2[0] <= 1e-4)
    _refinement(report, "L2 identity", *l2)

    m_pp = [float(np.max(m_second_difference_residual(t, relative=True))) for t in (coarse, fine)]
    report.add("M'' = -I (rel)", m_pp[0], "<= 1e-4", m_pp[0] <= 1e-4)

    weak = [weak_form_residual(t, t.spec, n_test=8, n_time=8).max_reliable_residual for t in (coarse, fine)]
    _refinement(report, "weak form", *weak)

    _write_report(report, out_dir, {"energy": energy, "l2": l2, "m_pp": m_pp, "weak_form": weak})
    return report


def _refinement(report: SuiteReport, name: str, coarse: float, fine: float) -> None:
    ratio = coarse / fine if fine > 0 else math.inf
    report.add(
        f"{name} refinement",
        ratio,
        f">= {REFINEMENT_FACTOR:g}",
        ratio >= REFINEMENT_FACTOR,
        f"dt: {coarse:.3e}, dt/2: {fine:.3e}",
    )


# ------------------------------------------------------------------ criterion


def _scaled(base: DatumDescriptor, multiplier: float) -> DatumDescriptor:
    return DatumDescriptor(family="nehari_scaled", base=base, multiplier=multiplier)


def _random(max_k: int, amplitude: float, seed: int) -> DatumDescriptor:
    return DatumDescriptor(family="random_bandlimited", max_k=max_k, amplitude=amplitude, rng_seed=seed)


def criterion_battery() -> List[Tuple[str, float, float, DatumDescriptor, bool]]:
    """(name, a, p, datum, expect_blowup): six data in S⁻ at t = 0 and six small data."""
    return [
        ("blowup_cos_A2", PI, 3.0, cosine_combo((1, 2.0)), True),
        ("blowup_cos_nehari_1.2", PI, 3.0, _scaled(cosine_combo((1, 1.0)), 1.2), True),
        ("blowup_mix_nehari_1.3", PI, 3.0, _scaled(cosine_combo((1, 1.0), (2, 0.5)), 1.3), True),
        ("blowup_cos_p2_nehari_1.3", PI, 2.0, _scaled(cosine_combo((1, 1.0)), 1.3), True),
        ("blowup_2pi_mix_nehari_1.25", 2 * PI, 3.0, _scaled(cosine_combo((1, 1.0), (3, 0.3)), 1.25), True),
        ("blowup_2pi_random_p2_nehari_1.3", 2 * PI, 2.0, _scaled(_random(4, 1.0, 7), 1.3), True),
        ("global_cos_A0.5", PI, 3.0, cosine_combo((1, 0.5)), False),
        ("global_cos_A0.8", PI, 3.0, cosine_combo((1, 0.8)), False),
        ("global_mix_p2", PI, 2.0, cosine_combo((1, 0.3), (2, 0.2)), False),
        ("global_2pi_mode2", 2 * PI, 3.0, cosine_combo((2, 0.5)), False),
        ("global_2pi_random", 2 * PI, 3.0, _random(4, 0.1, 11), False),
        ("global_random_p2", PI, 2.0, _random(6, 0.2, 3), False),
    ]


CRITERION_OPTIMIZER = OptimizerConfig(n_single_modes=2, n_random_seeds=0, max_iter=400)
BLOWUP_TRIGGERS = ("amplitude", "h2", "step_collapse", "overflow")
# growth of ||u||_inf over its initial value required when a run stops before u_max
MIN_GROWTH = 100.0
BLOWUP_RUNTIME_LIMIT = 60.0


def _terminal_amplitude_check(report: SuiteReport, name: str, traj: Trajectory, u_max: float) -> None:
    linf = traj.column("linf")
    trigger = traj.outcome.trigger
    report.add(f"{name}: trigger", trigger, " | ".join(BLOWUP_TRIGGERS), trigger in BLOWUP_TRIGGERS)
    if trigger == "amplitude":
        report.add(f"{name}: final ||u||_inf", float(linf[-1]), f"> {u_max:g}", bool(linf[-1] > u_max))
    else:
        growth = float(linf[-1] / linf[0])
        report.add(
            f"{name}: ||u||_inf growth",
            growth,
            f">= {MIN_GROWTH:g}",
            growth >= MIN_GROWTH,
            f"stopped at ||u||_inf={linf[-1]:.6g} by {trigger}",
        )
    report.add(f"{name}: peak is the last sample", float(linf.max()), "== final", bool(linf[-1] == linf.max()))


def verify_criterion(out_dir: Path, quick: bool = False) -> SuiteReport:
    """Blow-up exactly for data entering S⁻; necessity bound on the rest."""
    report = SuiteReport("criterion", quick=quick)
    horizon = 2.0 if quick else 10.0
    findings: Dict[str, Any] = {}
    blowup_seconds = 0.0
    for name, a, p, datum, expect_blowup in criterion_battery():
        cfg = ExperimentConfig(
            name=name,
            domain=DomainSpec(a=a, p=p, n_modes=64),
            datum=datum,
            stepper=StepperConfig(t_horizon=horizon),
            outputs=OutputsConfig(directory=str(out_dir / "criterion" / name), plot=False),
            classification=ClassificationConfig(lambda_alpha=False, optimizer=CRITERION_OPTIMIZER),
        )
        result = run_experiment(cfg)
        traj = result.trajectory
        kind = traj.outcome.kind
        I0 = traj.samples[0].I
        if expect_blowup:
            report.add(f"{name}: I(u0) < 0", I0, "< 0", I0 < 0)
            report.add(f"{name}: outcome", kind.value, "BlowUp", kind is Outcome.BLOW_UP, traj.outcome.evidence)
            entered = traj.s_minus_entry is not None and traj.s_minus_entry <= traj.t_end
            report.add(f"{name}: S- entry", traj.s_minus_entry, "exists, <= t_end", entered)
            _terminal_amplitude_check(report, name, traj, cfg.stepper.u_max)
            blowup_seconds += result.timings["seconds"]["advance"]
        else:
            report.add(
                f"{name}: outcome",
                kind.value,
                "GlobalHorizonReached",
                kind is Outcome.GLOBAL_HORIZON_REACHED,
                traj.outcome.evidence,
            )
            negative = int(np.sum(traj.column("I") < 0))
            report.add(f"{name}: samples with I < 0", negative, "0", negative == 0)
            bound = necessity_bound_violations(traj)
            report.add(f"{name}: necessity bound", len(bound), "0 violations", not bound)
        report.add(
            f"{name}: prediction",
            result.classification.predicted.value,
            "consistent with run",
            result.consistent,
        )
        monitor = monotonicity_monitor(traj)
        monitor_path = out_dir / "criterion" / f"{name}_monotonicity.json"
        write_summary({"run": name, "monotonicity": monitor.to_dict(include_series=True)}, monitor_path)
        findings[name] = {
            "lp1_increasing": monitor.lp1_increasing,
            "lp1_decreasing": monitor.lp1_decreasing,
            "flagged_intervals": monitor.violation_count,
            "final_linf": float(traj.samples[-1].linf),
            "trigger": traj.outcome.trigger,
        }
    report.add(
        "blow-up battery runtime",
        blowup_seconds,
        f"<= {BLOWUP_RUNTIME_LIMIT:g} s",
        blowup_seconds <= BLOWUP_RUNTIME_LIMIT,
    )
    _write_report(report, out_dir, {"monotonicity_findings": findings, "blowup_seconds": blowup_seconds})
    return report


# ----------------------------------------------------------------- crosscheck


CHECKPOINT_TIMES = (0.25, 0.5, 0.75)


def verify_crosscheck(out_dir: Path, quick: bool = False) -> SuiteReport:
    """Spectral (N=64) against the finite-difference solver (2048 points)."""
    report = SuiteReport("crosscheck", quick=quick)
    spec = DomainSpec(a=PI, p=3.0, n_modes=64)
    n_points = 512 if quick else 2048
    horizon = 0.5 if quick else 1.0
    stops = tuple(t for t in CHECKPOINT_TIMES if t < horizon)

    u0 = build_datum(cosine_combo((1, 0.5)), spec)
    spectral = advance(u0, spec, StepperConfig(t_horizon=horizon, stop_times=stops))
    fd = fd_advance(
        grid_datum(u0, n_points),
        spec,
        FDConfig(n_points=n_points, dt=1e-3, t_horizon=horizon, stop_times=stops),
    )
    decaying = compare(spectral, fd)
    state_gap = decaying.max_state_rel_diff
    report.add(
        "decaying: state rel L2",
        state_gap,
        "<= 1e-3",
        state_gap is not None and state_gap <= 1e-3,
        f"{len(decaying.state_rel_diffs)} matched checkpoints",
    )
    J_gap = decaying.series_max_rel_diff["J"]
    report.add("decaying: J rel diff", J_gap, "<= 1e-3", J_gap <= 1e-3)
    report.add("decaying: outcomes", f"{decaying.outcome_a}/{decaying.outcome_b}", "agree", decaying.outcomes_agree)

    u_blow = build_datum(cosine_combo((1, 2.0)), spec)
    spectral_blow = advance(u_blow, spec, StepperConfig(t_horizon=10.0))
    fd_blow = fd_advance(grid_datum(u_blow, n_points), spec, FDConfig(n_points=n_points, dt=1e-3, t_horizon=10.0))
    blow = compare(spectral_blow, fd_blow)
    report.add("A=2: outcomes", f"{blow.outcome_a}/{blow.outcome_b}", "both BlowUp", blow.outcomes_agree and spectral_blow.outcome.is_blowup)
    gap = blow.blowup_time_rel_diff
    report.add(
        "A=2: blow-up time rel diff",
        gap,
        "<= 0.1",
        gap is not None and gap <= 0.1,
        f"spectral T={spectral_blow.outcome.blowup_time_estimate}, fd T={fd_blow.outcome.blowup_time_estimate}",
    )
    _write_report(report, out_dir, {"decaying": decaying.to_dict(), "blowup": blow.to_dict()})
    return report


# ------------------------------------------------------------------ welldepth


def verify_welldepth(out_dir: Path, quick: bool = False) -> SuiteReport:
    """Depth for a = π, p = 3: below the cosine bound, positive, resolution-stable, on N."""
    report = SuiteReport("welldepth", quick=quick)
    opt_cfg = OptimizerConfig(n_random_seeds=2, max_iter=1000) if quick else OptimizerConfig()
    estimates = {}
    for n_modes in (32, 64):
        spec = DomainSpec(a=PI, p=3.0, n_modes=n_modes)
        estimate = estimate_well_depth(spec, opt_cfg)
        estimates[n_modes] = estimate
        d_hat = estimate.d_hat
        report.add(f"N={n_modes}: d_hat <= pi/6 + 1e-6", d_hat, f"<= {PI / 6 + 1e-6:.9f}", d_hat <= PI / 6 + 1e-6)
        report.add(f"N={n_modes}: d_hat > 0", d_hat, "> 0", d_hat > 0)
        minimizer = estimate.minimizer
        on_manifold = abs(nehari_I(minimizer, spec)) / h2_norm_sq(minimizer, spec)
        report.add(f"N={n_modes}: |I(minimizer)| (rel)", on_manifold, "<= 1e-8", on_manifold <= 1e-8)
    drift = _relative(estimates[32].d_hat, estimates[64].d_hat)
    report.add("N=32 vs N=64", drift, "<= 0.01", drift <= 0.01)
    _write_report(report, out_dir, {f"N{n}": e.to_dict() for n, e in estimates.items()})
    return report


SUITES: Dict[str, Callable[[Path, bool], SuiteReport]] = {
    "identities": verify_identities,
    "criterion": verify_criterion,
    "crosscheck": verify_crosscheck,
    "welldepth": verify_welldepth,
}


def _write_report(report: SuiteReport, out_dir: Path, data: Optional[Dict[str, Any]] = None) -> None:
    (out_dir / f"verify_{report.suite}.md").write_text(report.to_markdown())
    document = {
        "suite": report.suite,
        "quick": report.quick,
        "passed": report.passed,
        "checks": [
            {"name": c.name, "value": c.value, "threshold": c.threshold, "passed": c.passed}
            for c in report.checks
        ],
        "data": data or {},
    }
    write_summary(document, out_dir / f"verify_{report.suite}.json")


def run_suite(name: str, out_dir: Path, quick: bool = False) -> SuiteReport:
    """Run a named suite, writing its Markdown and JSON reports into out_dir.

    Raises:
        ConfigInvalidError: for an unknown suite name.
    """
    if name not in SUITES:
        raise ConfigInvalidError(f"Unknown suite {name!r}; expected one of {list(SUITES)}")
    out_dir = ensure_output_directory(out_dir)
    logger.info(f"Running verification suite '{name}'{' (quick)' if quick else ''}")
    report = SUITES[name](out_dir, quick)
    logger.info(f"Suite '{name}': {'PASS' if report.passed else 'FAIL'} ({len(report.failures)} failures)")
    return report
