"""Command-line interface: ``thinfilm-lab <command>``."""

import functools
import logging
import sys
from pathlib import Path
from typing import Callable

import click
from tabulate import tabulate

from ..core.domain import DomainSpec, parse_length
from ..core.errors import EXIT_OK, EXIT_RUNTIME, EXIT_VERIFICATION_FAILED, LabError, exit_code_for
from ..nehari.lambda_alpha import lambda_alpha_curve
from ..nehari.well_depth import OptimizerConfig, estimate_well_depth
from ..settings import settings
from .config import load_experiment, load_sweep
from .runner import classify_experiment, run_experiment
from .sweep import run_sweep
from .verify import run_suite

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


def _configure_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level, logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def handle_errors(command: Callable) -> Callable:
    """Report lab errors on stderr and exit with their mapped code."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except (LabError, ArithmeticError) as e:
            code = exit_code_for(e)
            logger.debug("Command failed", exc_info=True)
            click.echo(f"error: {type(e).__name__}: {e}", err=True)
            sys.exit(code)

    return wrapper


def _spec_options(command: Callable) -> Callable:
    command = click.option("--modes", "n_modes", type=int, default=None, help="Retained cosine modes")(command)
    command = click.option("--p", "p", type=float, required=True, help="Nonlinearity exponent p > 1")(command)
    command = click.option("--a", "a", type=str, required=True, help="Interval length (number, pi, 2pi, ...)")(command)
    return command


def _spec(a: str, p: float, n_modes) -> DomainSpec:
    return DomainSpec(a=parse_length(a), p=p, n_modes=n_modes or settings.default_modes)


def _optimizer(seeds) -> OptimizerConfig:
    return OptimizerConfig(n_random_seeds=settings.multistart_seeds if seeds is None else seeds)


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Debug logging on stderr")
def main(verbose: bool):
    """Simulate and verify blow-up in u_t + u_xxxx = |u|^(p-1)u - mean."""
    _configure_logging(verbose)
    ok, errors = settings.validate()
    if not ok:
        for error in errors:
            logger.warning(f"Ignoring invalid setting: {error}")


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@handle_errors
def simulate(config: str):
    """Run the experiment described by CONFIG and write its artifacts."""
    result = run_experiment(load_experiment(config))
    outcome = result.trajectory.outcome
    rows = [
        ("outcome", outcome.kind.value),
        ("t_end", f"{outcome.t_end:.10g}"),
        ("blow-up time estimate", outcome.blowup_time_estimate),
        ("trigger", outcome.trigger),
        ("S- entry", result.trajectory.s_minus_entry),
        ("samples", len(result.trajectory)),
    ]
    if result.classification is not None:
        rows += [
            ("branch", result.classification.branch.value),
            ("prediction", result.classification.predicted.value),
            ("consistent", result.consistent),
        ]
    rows += [(kind, path) for kind, path in sorted(result.paths.items())]
    click.echo(tabulate(rows, tablefmt="plain"))


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@handle_errors
def classify(config: str):
    """Predict the outcome of CONFIG's datum without integrating."""
    report = classify_experiment(load_experiment(config))
    rows = [(key, value) for key, value in report.to_dict().items() if key != "notes"]
    click.echo(tabulate(rows, tablefmt="plain"))
    for note in report.notes:
        click.echo(f"note: {note}")


@main.command()
@_spec_options
@click.option("--seeds", type=int, default=None, help="Random multistart seeds")
@handle_errors
def welldepth(a: str, p: float, n_modes, seeds):
    """Estimate the potential-well depth d for (a, p)."""
    spec = _spec(a, p, n_modes)
    estimate = estimate_well_depth(spec, _optimizer(seeds))
    click.echo(tabulate(list(estimate.to_dict().items()), tablefmt="plain"))


@main.command(name="lambda-alpha")
@click.option("--alpha", "alphas", type=float, multiple=True, required=True, help="Energy level(s) α > d")
@_spec_options
@click.option("--seeds", type=int, default=None, help="Random multistart seeds")
@handle_errors
def lambda_alpha(alphas, a: str, p: float, n_modes, seeds):
    """Lower bounds on Λ_α, the largest ||u||²/2 on the Nehari slice with J <= α."""
    spec = _spec(a, p, n_modes)
    estimates = lambda_alpha_curve(alphas, spec, _optimizer(seeds))
    rows = [(e.alpha, e.value, e.radius, e.converged) for e in estimates]
    click.echo(tabulate(rows, headers=["alpha", "Lambda_alpha >=", "radius", "converged"]))


@main.command()
@click.argument("config", type=click.Path(dir_okay=False))
@click.option("--workers", type=int, default=None, help="Override the sweep's worker count")
@handle_errors
def sweep(config: str, workers):
    """Run every grid point of the sweep CONFIG and index the results."""
    cfg = load_sweep(config)
    result = run_sweep(cfg, workers=workers or max(cfg.workers, settings.sweep_workers))
    rows = [
        (run["name"], run.get("outcome", "-"), run.get("t_end", "-"), run.get("error", ""))
        for run in result.runs
    ]
    click.echo(tabulate(rows, headers=["run", "outcome", "t_end", "error"]))
    if result.index_path is not None:
        click.echo(f"index: {result.index_path}")
    if result.failed:
        sys.exit(EXIT_RUNTIME)


@main.command()
@click.argument("suite")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None, help="Report directory")
@click.option("--quick", is_flag=True, help="Shorter horizons for smoke runs")
@handle_errors
def verify(suite: str, out_dir, quick: bool):
    """Run an acceptance SUITE: identities, criterion, crosscheck or welldepth."""
    out = Path(out_dir) if out_dir else Path(settings.output_root) / "verify"
    report = run_suite(suite, out, quick=quick)
    click.echo(report.to_table())
    click.echo(f"{suite}: {'PASS' if report.passed else 'FAIL'}")
    sys.exit(EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED)


if __name__ == "__main__":
    main()
