"""Norms, J, I and the Nehari scaling for closed-form fields."""

import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thinfilm_lab.core.domain import DomainSpec, GridField, SpectralField
from thinfilm_lab.core.errors import SizeMismatchError, ZeroFieldError
from thinfilm_lab.functionals.diagnostics import (
    CSV_COLUMNS,
    DiagnosticsAccumulator,
    energy_decomposition_residual,
    energy_J,
    h2_norm_sq,
    l2_norm_sq,
    lambda_star,
    linf_norm,
    lp_norm_pow,
    mass,
    nehari_I,
    sample_diagnostics,
)


class TestClosedForms:
    def test_cosine(self, spec_pi, cos_field):
        assert l2_norm_sq(cos_field, spec_pi) == pytest.approx(math.pi / 2, rel=1e-12)
        assert h2_norm_sq(cos_field, spec_pi) == pytest.approx(math.pi / 2, rel=1e-12)
        assert lp_norm_pow(cos_field, spec_pi) == pytest.approx(3 * math.pi / 8, rel=1e-12)
        assert energy_J(cos_field, spec_pi) == pytest.approx(5 * math.pi / 32, rel=1e-12)
        assert nehari_I(cos_field, spec_pi) == pytest.approx(math.pi / 8, rel=1e-12)
        assert linf_norm(cos_field, spec_pi) == pytest.approx(1.0, abs=1e-3)

    def test_nehari_scaling_of_cosine(self, spec_pi, cos_field):
        lam = lambda_star(cos_field, spec_pi)
        assert lam == pytest.approx(math.sqrt(4 / 3), rel=1e-12)
        scaled = cos_field * lam
        assert nehari_I(scaled, spec_pi) == pytest.approx(0.0, abs=1e-12)
        assert energy_J(scaled, spec_pi) == pytest.approx(math.pi / 6, rel=1e-12)

    def test_twice_cosine_is_in_the_unstable_set(self, spec_pi):
        u = SpectralField.mode(spec_pi, 1, 2.0)
        assert energy_J(u, spec_pi) == pytest.approx(-math.pi / 2, rel=1e-12)
        assert nehari_I(u, spec_pi) == pytest.approx(-4 * math.pi, rel=1e-12)

    def test_other_interval_length(self):
        spec = DomainSpec(a=2 * math.pi, p=3.0, n_modes=32)
        u = SpectralField.mode(spec, 2)
        # cos(x) on (0, 2π): ||u_xx||^2 = π, ||u||_4^4 = 3π/4
        assert h2_norm_sq(u, spec) == pytest.approx(math.pi, rel=1e-12)
        assert lp_norm_pow(u, spec) == pytest.approx(3 * math.pi / 4, rel=1e-12)


def test_lambda_star_of_zero_field(spec_pi):
    with pytest.raises(ZeroFieldError):
        lambda_star(SpectralField.zeros(spec_pi), spec_pi)


def test_size_mismatch(spec_pi):
    with pytest.raises(SizeMismatchError):
        energy_J(SpectralField(np.ones(10)), spec_pi)


def test_mass(spec_pi, cos_field):
    assert mass(cos_field, spec_pi) == 0.0
    assert mass(GridField(np.ones(spec_pi.n_modes)), spec_pi) == pytest.approx(math.pi)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=7, max_size=7))
def test_energy_decomposition_holds(coeffs):
    spec = DomainSpec(a=math.pi, p=3.0, n_modes=8)
    u = SpectralField(np.array(coeffs))
    assert energy_decomposition_residual(u, spec) < 1e-12


def test_sample_row_follows_csv_columns(spec_pi, cos_field):
    sample = sample_diagnostics(cos_field, spec_pi)
    assert list(sample.to_row()) == CSV_COLUMNS
    assert sample.invariant_violations(spec_pi.p) == []
    assert sample.Mp == pytest.approx(math.pi / 4)
    assert sample.Mpp == pytest.approx(-math.pi / 8)


def test_accumulator_integrates_by_trapezoids(spec_pi, cos_field):
    accumulator = DiagnosticsAccumulator(spec_pi.p)
    first = sample_diagnostics(cos_field, spec_pi, 0.0, 0.0, accumulator)
    second = sample_diagnostics(cos_field, spec_pi, 0.5, 0.5, accumulator)
    assert first.M == 0.0
    assert second.M == pytest.approx(0.5 * math.pi / 4)
    assert second.dissipation == pytest.approx(0.5 * first.ut_l2sq)
    assert second.energy_residual == pytest.approx(second.dissipation)


def test_inconsistent_sample_is_reported(spec_pi, cos_field):
    sample = sample_diagnostics(cos_field, spec_pi)
    broken = replace(sample, J=sample.J + 1.0)
    problems = broken.invariant_violations(spec_pi.p)
    assert len(problems) == 1
    assert "J=" in problems[0]
