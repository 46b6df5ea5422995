"""Static classification of initial data by the blow-up criteria."""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, TYPE_CHECKING

from ..core.domain import DomainSpec, Outcome, SpectralField
from ..functionals.diagnostics import h2_norm_sq, l2_norm_sq, lp_norm_pow

if TYPE_CHECKING:
    from ..integrator.trajectory import Trajectory

logger = logging.getLogger(__name__)

# I0 within this fraction of ||u0_xx||^2 counts as lying on the Nehari manifold.
NEHARI_RTOL = 1e-10


class Branch(str, Enum):
    """Which published condition applies to the datum."""

    LOW_ENERGY_BLOW_UP = "LowEnergyBlowUp"
    HIGH_ENERGY_BLOW_UP = "HighEnergyBlowUp"
    THEOREM_ONLY = "TheoremOnly"
    NO_PREDICTION = "NoPrediction"


class Prediction(str, Enum):
    BLOW_UP = "BlowUp"
    GLOBAL = "Global"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class ClassificationReport:
    """Functional values at u0 and the branch they select."""

    J0: float
    I0: float
    l2sq0: float
    d_hat: float
    branch: Branch
    predicted: Prediction
    lambda_alpha_hat: Optional[float] = None
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "J0": self.J0,
            "I0": self.I0,
            "l2sq0": self.l2sq0,
            "d_hat": self.d_hat,
            "lambda_alpha_hat": self.lambda_alpha_hat,
            "branch": self.branch.value,
            "predicted": self.predicted.value,
            "notes": list(self.notes),
        }


def assign_branch(
    J0: float,
    I0: float,
    l2sq0: float,
    d_hat: float,
    lambda_alpha_hat: Optional[float] = None,
    scale: float = 1.0,
) -> Branch:
    """Branch from the scalar inputs alone; ``scale`` sets the tolerance on I0 = 0."""
    if not I0 < -NEHARI_RTOL * scale:
        return Branch.NO_PREDICTION
    if J0 <= d_hat:
        return Branch.LOW_ENERGY_BLOW_UP
    if lambda_alpha_hat is not None and l2sq0 > 2.0 * lambda_alpha_hat:
        return Branch.HIGH_ENERGY_BLOW_UP
    return Branch.THEOREM_ONLY


def classify_initial_datum(
    u0: SpectralField,
    spec: DomainSpec,
    d_hat: float,
    lambda_alpha_hat: Optional[float] = None,
) -> ClassificationReport:
    """Predict the fate of u0: blow-up whenever I(u0) < 0, otherwise no static prediction.

    ``lambda_alpha_hat`` should be the estimate at α = J(u0); it is a lower
    bound, so a HighEnergyBlowUp branch is only as strong as that bound.
    """
    h2sq = h2_norm_sq(u0, spec)
    lp1 = lp_norm_pow(u0, spec)
    J0 = h2sq / 2.0 - lp1 / (spec.p + 1.0)
    I0 = h2sq - lp1
    l2sq0 = l2_norm_sq(u0, spec)
    branch = assign_branch(J0, I0, l2sq0, d_hat, lambda_alpha_hat, scale=max(h2sq, lp1))
    notes: List[str] = []
    if branch is Branch.HIGH_ENERGY_BLOW_UP:
        notes.append("||u0||^2 > 2 Lambda_J(u0) checked against a sampled lower bound of Lambda")
        logger.info("High-energy branch verified against a lower bound on Lambda_alpha only")
    elif branch is Branch.THEOREM_ONLY and lambda_alpha_hat is None:
        notes.append("no Lambda_alpha estimate supplied; high-energy condition not checked")
    if branch is Branch.NO_PREDICTION:
        notes.append("I(u0) >= 0: outcome depends on whether I(u(t)) stays non-negative")
        predicted = Prediction.UNDETERMINED
    else:
        predicted = Prediction.BLOW_UP
    return ClassificationReport(
        J0=J0,
        I0=I0,
        l2sq0=l2sq0,
        d_hat=d_hat,
        branch=branch,
        predicted=predicted,
        lambda_alpha_hat=lambda_alpha_hat,
        notes=notes,
    )


def reconcile_with_run(report: ClassificationReport, traj: "Trajectory") -> ClassificationReport:
    """Upgrade an undetermined prediction to Global once a run reaches its horizon with I >= 0."""
    if report.predicted is not Prediction.UNDETERMINED:
        return report
    if traj.outcome.kind is Outcome.GLOBAL_HORIZON_REACHED and traj.s_minus_entry is None:
        return replace(
            report,
            predicted=Prediction.GLOBAL,
            notes=report.notes + [f"run reached t={traj.outcome.t_end:g} with every sampled I >= 0"],
        )
    if traj.s_minus_entry is not None:
        return replace(
            report,
            predicted=Prediction.BLOW_UP,
            notes=report.notes + [f"trajectory entered S- at t={traj.s_minus_entry:g}"],
        )
    return report


def prediction_consistent(report: ClassificationReport, traj: "Trajectory") -> bool:
    """Whether a run agrees with the (reconciled) prediction."""
    if report.predicted is Prediction.BLOW_UP:
        return traj.outcome.kind is Outcome.BLOW_UP
    if report.predicted is Prediction.GLOBAL:
        return traj.outcome.kind is Outcome.GLOBAL_HORIZON_REACHED
    return True
