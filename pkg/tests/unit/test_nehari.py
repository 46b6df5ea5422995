"""Nehari projection, well depth, Λ_α and the static classifier."""

import math

import numpy as np
import pytest

from thinfilm_lab.core.domain import SpectralField
from thinfilm_lab.core.errors import AlphaBelowDepthError, ConfigInvalidError
from thinfilm_lab.functionals.diagnostics import h2_norm_sq, nehari_I
from thinfilm_lab.nehari.classify import (
    Branch,
    Prediction,
    assign_branch,
    classify_initial_datum,
    prediction_consistent,
    reconcile_with_run,
)
from thinfilm_lab.nehari.lambda_alpha import estimate_lambda_alpha, lambda_alpha_curve
from thinfilm_lab.nehari.projection import nehari_radius, project_to_nehari, reduced_energy
from thinfilm_lab.nehari.well_depth import (
    OptimizerConfig,
    estimate_well_depth,
    seed_fields,
    single_mode_bound,
)


class TestProjection:
    def test_radius(self):
        assert nehari_radius(1.01 * math.pi / 6, 3.0) == pytest.approx(1.4544, abs=1e-4)

    def test_projection_lands_on_the_manifold(self, spec_pi):
        u = SpectralField(np.r_[1.0, 0.3, -0.2, np.zeros(spec_pi.n_coeffs - 3)])
        projected = project_to_nehari(u, spec_pi)
        assert abs(nehari_I(projected, spec_pi)) < 1e-12 * h2_norm_sq(projected, spec_pi)

    def test_reduced_energy_is_scale_invariant(self, spec_pi, cos_field):
        assert reduced_energy(cos_field, spec_pi) == pytest.approx(math.pi / 6, rel=1e-12)
        assert reduced_energy(cos_field * 3.0, spec_pi) == pytest.approx(math.pi / 6, rel=1e-12)
        assert single_mode_bound(spec_pi, 1) == pytest.approx(math.pi / 6, rel=1e-12)


class TestOptimizerConfig:
    def test_invalid(self):
        with pytest.raises(ConfigInvalidError):
            OptimizerConfig(armijo=1.5)
        with pytest.raises(ConfigInvalidError):
            OptimizerConfig(n_single_modes=0)
        with pytest.raises(ConfigInvalidError):
            OptimizerConfig.from_dict({"iterations": 10})

    def test_hashable(self):
        assert hash(OptimizerConfig()) == hash(OptimizerConfig())

    def test_seeds_are_deterministic(self, spec_small, light_optimizer):
        first = seed_fields(spec_small, light_optimizer)
        second = seed_fields(spec_small, light_optimizer)
        assert [label for label, _ in first] == ["mode-1", "mode-2", "random-0"]
        for (_, a), (_, b) in zip(first, second):
            assert np.array_equal(a, b)


class TestWellDepth:
    def test_depth_is_below_the_cosine_bound(self, spec_small, light_optimizer):
        depth = estimate_well_depth(spec_small, light_optimizer)
        assert 0.0 < depth.d_hat <= math.pi / 6 + 1e-6
        assert depth.multistart_count == 3
        minimizer = depth.minimizer
        assert abs(nehari_I(minimizer, spec_small)) <= 1e-8 * h2_norm_sq(minimizer, spec_small)
        assert set(depth.to_dict()) >= {"d_hat", "converged", "best_seed"}

    def test_lambda_alpha_needs_alpha_above_depth(self, spec_small, light_optimizer):
        depth = estimate_well_depth(spec_small, light_optimizer)
        with pytest.raises(AlphaBelowDepthError):
            estimate_lambda_alpha(depth.d_hat * 0.5, spec_small, light_optimizer, depth=depth)

    def test_lambda_alpha_curve_is_monotone(self, spec_small, light_optimizer):
        depth = estimate_well_depth(spec_small, light_optimizer)
        curve = lambda_alpha_curve(
            [depth.d_hat + 0.2, depth.d_hat + 0.05], spec_small, light_optimizer, depth=depth
        )
        assert [e.alpha for e in curve] == sorted(e.alpha for e in curve)
        assert curve[1].value >= curve[0].value * (1 - 1e-10)
        for estimate in curve:
            maximizer = estimate.maximizer
            assert math.sqrt(h2_norm_sq(maximizer, spec_small)) <= estimate.radius * (1 + 1e-8)
            assert estimate.to_dict()["lower_bound"] is True


class TestClassification:
    @pytest.mark.parametrize(
        "J0, I0, l2sq0, lam, expected",
        [
            (0.1, 0.5, 1.0, None, Branch.NO_PREDICTION),
            (0.1, -0.5, 1.0, None, Branch.LOW_ENERGY_BLOW_UP),
            (2.0, -0.5, 10.0, 1.0, Branch.HIGH_ENERGY_BLOW_UP),
            (2.0, -0.5, 1.0, 1.0, Branch.THEOREM_ONLY),
            (2.0, -0.5, 10.0, None, Branch.THEOREM_ONLY),
        ],
    )
    def test_branches(self, J0, I0, l2sq0, lam, expected):
        assert assign_branch(J0, I0, l2sq0, d_hat=0.5, lambda_alpha_hat=lam) is expected

    def test_twice_cosine_is_low_energy(self, spec_pi):
        report = classify_initial_datum(SpectralField.mode(spec_pi, 1, 2.0), spec_pi, math.pi / 6)
        assert report.branch is Branch.LOW_ENERGY_BLOW_UP
        assert report.predicted is Prediction.BLOW_UP
        assert report.to_dict()["branch"] == "LowEnergyBlowUp"

    def test_nehari_element_has_no_prediction(self, spec_pi, cos_field):
        on_manifold = project_to_nehari(cos_field, spec_pi)
        report = classify_initial_datum(on_manifold, spec_pi, math.pi / 6)
        assert report.branch is Branch.NO_PREDICTION

    def test_reconcile_with_decaying_run(self, spec_small, decay_trajectory):
        u0 = SpectralField.mode(spec_small, 1, 0.5)
        report = classify_initial_datum(u0, spec_small, math.pi / 6)
        assert report.predicted is Prediction.UNDETERMINED
        reconciled = reconcile_with_run(report, decay_trajectory)
        assert reconciled.predicted is Prediction.GLOBAL
        assert prediction_consistent(reconciled, decay_trajectory)
        assert len(reconciled.notes) == len(report.notes) + 1
