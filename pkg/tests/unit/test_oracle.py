"""Finite-difference oracle, weak-form residuals and run comparison."""

import math

import numpy as np
import pytest

from thinfilm_lab.core.domain import Outcome, RunOutcome, SpectralField
from thinfilm_lab.core.errors import (
    ConfigInvalidError,
    DisjointRangesError,
    NoCheckpointsError,
    SizeMismatchError,
)
from thinfilm_lab.functionals.diagnostics import sample_diagnostics
from thinfilm_lab.integrator.adaptive import StepperConfig, advance
from thinfilm_lab.integrator.trajectory import Checkpoint, Trajectory
from thinfilm_lab.oracle import (
    FDConfig,
    compare,
    fd_advance,
    fd_diagnostics,
    grid_datum,
    weak_form_residual,
)
from thinfilm_lab.oracle.compare import relative_difference
from thinfilm_lab.oracle.fd_solver import biharmonic, biharmonic_bands

FD_POINTS = 256


class TestFiniteDifferences:
    def test_config_validation(self):
        with pytest.raises(ConfigInvalidError):
            FDConfig(n_points=32)
        with pytest.raises(ConfigInvalidError):
            FDConfig(dt=1e-3, dt_min=1e-2)
        with pytest.raises(ConfigInvalidError):
            FDConfig.from_dict({"points": 512})

    def test_cosine_is_a_discrete_eigenvector(self):
        n, a, k = 128, math.pi, 3
        h = a / n
        x = (np.arange(n) + 0.5) * h
        u = np.cos(k * math.pi * x / a)
        symbol = (4.0 / h**2 * math.sin(k * math.pi * h / (2 * a)) ** 2) ** 2
        assert np.allclose(biharmonic(u, h), symbol * u, rtol=1e-9, atol=1e-9 * symbol)

    def test_bands_match_the_stencil(self, rng):
        n, h = 12, 0.5
        bands = biharmonic_bands(n, h)
        dense = np.diag(bands[2])
        dense += np.diag(bands[1, 1:], 1) + np.diag(bands[1, 1:], -1)
        dense += np.diag(bands[0, 2:], 2) + np.diag(bands[0, 2:], -2)
        u = rng.standard_normal(n)
        assert np.allclose(dense @ u, biharmonic(u, h))

    def test_grid_datum_size(self, spec_pi, cos_field):
        with pytest.raises(SizeMismatchError):
            grid_datum(cos_field, 32)
        with pytest.raises(SizeMismatchError):
            fd_advance(grid_datum(cos_field, 128), spec_pi, FDConfig(n_points=FD_POINTS))

    def test_diagnostics_of_cosine(self, spec_pi, cos_field):
        sample = fd_diagnostics(grid_datum(cos_field, FD_POINTS), spec_pi)
        assert sample.J == pytest.approx(5 * math.pi / 32, rel=1e-3)
        assert sample.I == pytest.approx(math.pi / 8, rel=1e-3)
        assert sample.mass == pytest.approx(0.0, abs=1e-12)

    def test_agrees_with_spectral_run(self, spec_small):
        u0 = SpectralField.mode(spec_small, 1, 0.5)
        spectral = advance(u0, spec_small, StepperConfig(t_horizon=0.1, stop_times=(0.05,)))
        fd = fd_advance(
            grid_datum(u0, FD_POINTS),
            spec_small,
            FDConfig(n_points=FD_POINTS, dt=1e-3, t_horizon=0.1, stop_times=(0.05,)),
        )
        assert fd.outcome.kind is Outcome.GLOBAL_HORIZON_REACHED
        assert fd.spec.n_modes == FD_POINTS
        assert fd.checkpoint_times() == [0.0, 0.05, 0.1]
        assert np.max(np.abs(fd.column("mass"))) < 1e-12
        report = compare(spectral, fd)
        assert report.outcomes_agree
        assert len(report.state_rel_diffs) == 3
        assert report.max_state_rel_diff < 1e-3
        assert report.series_max_rel_diff["J"] < 1e-3


class TestWeakForm:
    def test_needs_two_checkpoints(self, spec_small):
        sample = sample_diagnostics(SpectralField.mode(spec_small, 1), spec_small)
        traj = Trajectory(
            samples=[sample],
            outcome=RunOutcome(kind=Outcome.INCONCLUSIVE, t_end=0.0),
            spec=spec_small,
            checkpoints=[Checkpoint(0.0, SpectralField.mode(spec_small, 1))],
        )
        with pytest.raises(NoCheckpointsError):
            weak_form_residual(traj, spec_small)

    def test_smooth_run_has_small_residuals(self, spec_small, decay_trajectory):
        report = weak_form_residual(decay_trajectory, spec_small, n_test=2, n_time=4)
        assert report.residuals.shape == (2, 4)
        assert all(report.reliable)
        assert report.max_reliable_residual < 1e-4
        assert report.hat_nodes[0] == 0.0
        assert report.hat_nodes[-1] == pytest.approx(0.2)

    def test_modes_outside_the_band_are_flagged(self, spec_small, decay_trajectory):
        report = weak_form_residual(decay_trajectory, spec_small, n_test=spec_small.n_coeffs + 2, n_time=2)
        assert report.reliable[: spec_small.n_coeffs] == [True] * spec_small.n_coeffs
        assert report.reliable[spec_small.n_coeffs :] == [False, False]
        assert len(report.to_dict()["residuals"]) == spec_small.n_coeffs + 2


class TestCompare:
    def test_relative_difference(self):
        out = relative_difference(np.array([0.0, 1.0, -2.0]), np.array([0.0, 2.0, -2.0]))
        assert out.tolist() == [0.0, 0.5, 0.0]

    def test_identical_runs(self, decay_trajectory):
        report = compare(decay_trajectory, decay_trajectory)
        assert report.overlap == (0.0, pytest.approx(0.2))
        assert all(value == 0.0 for value in report.series_max_rel_diff.values())
        assert report.max_state_rel_diff == 0.0
        assert report.blowup_time_rel_diff is None
        assert report.to_dict()["outcomes_agree"] is True

    @pytest.mark.parametrize("order", ["sparse_first", "dense_first"])
    def test_sparse_run_is_compared_at_its_own_times(self, spec_small, order):
        u0 = SpectralField.mode(spec_small, 1, 0.5)
        base = dict(dt_init=1e-3, dt_max=1e-3, t_horizon=0.3)
        dense = advance(u0, spec_small, StepperConfig(**base))
        sparse = advance(u0, spec_small, StepperConfig(**base, sample_stride=50))
        assert len(sparse) < len(dense) // 10
        pair = (sparse, dense) if order == "sparse_first" else (dense, sparse)
        report = compare(*pair)
        # same solver and steps: differences come only from where the series are read
        assert report.series_max_rel_diff["J"] < 1e-12
        assert report.series_max_rel_diff["I"] < 1e-12

    def test_disjoint_ranges(self, spec_small):
        u = SpectralField.mode(spec_small, 1, 0.5)
        outcome = RunOutcome(kind=Outcome.INCONCLUSIVE, t_end=0.0)
        early = Trajectory(samples=[sample_diagnostics(u, spec_small, t=0.0)], outcome=outcome, spec=spec_small)
        late = Trajectory(
            samples=[sample_diagnostics(u, spec_small, t=1.0)],
            outcome=RunOutcome(kind=Outcome.INCONCLUSIVE, t_end=1.0),
            spec=spec_small,
        )
        with pytest.raises(DisjointRangesError):
            compare(early, late)
