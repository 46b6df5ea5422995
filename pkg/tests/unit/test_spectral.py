"""Derivatives, the dealiased source and ETDRK4 steps."""

import math

import numpy as np
import pytest

from thinfilm_lab.core.domain import DomainSpec, SpectralField
from thinfilm_lab.core.errors import OverflowDetected, SizeMismatchError
from thinfilm_lab.integrator.etdrk4 import CoefficientCache, ETDStepper, etd_coefficients, step
from thinfilm_lab.spectral.operators import (
    LinearSymbol,
    dealiasing_note,
    fourth_derivative,
    nonlinear_source,
    power_source,
    rhs,
    second_derivative,
)


def test_derivatives_of_a_mode(spec_pi):
    u = SpectralField.mode(spec_pi, 3, 2.0)
    assert second_derivative(u, spec_pi).coeffs[2] == pytest.approx(-18.0)
    assert fourth_derivative(u, spec_pi).coeffs[2] == pytest.approx(162.0)


def test_cubic_source_of_cosine_is_exact(spec_pi):
    # cos^3 x = (3 cos x + cos 3x) / 4
    source = nonlinear_source(SpectralField.mode(spec_pi, 1), spec_pi).coeffs.copy()
    assert source[0] == pytest.approx(0.75, abs=1e-14)
    assert source[2] == pytest.approx(0.25, abs=1e-14)
    source[[0, 2]] = 0.0
    assert np.max(np.abs(source)) < 1e-14


def test_rhs_combines_linear_and_source(spec_pi):
    u = SpectralField.mode(spec_pi, 1, 0.5)
    expected = nonlinear_source(u, spec_pi).coeffs - fourth_derivative(u, spec_pi).coeffs
    assert np.allclose(rhs(u, spec_pi).coeffs, expected)


def test_power_source_keeps_sign_and_detects_overflow():
    values = np.array([-2.0, 0.0, 3.0])
    assert power_source(values, 2.0).tolist() == [-4.0, 0.0, 9.0]
    with pytest.raises(OverflowDetected):
        power_source(np.array([1e200]), 3.0)


def test_size_mismatch_is_rejected(spec_pi):
    with pytest.raises(SizeMismatchError):
        second_derivative(SpectralField(np.ones(5)), spec_pi)


def test_dealiasing_note():
    assert "exact" in dealiasing_note(DomainSpec(a=1.0, p=3.0, n_modes=8))
    assert "mitigation" in dealiasing_note(DomainSpec(a=1.0, p=2.5, n_modes=8))


def test_linear_flow_is_exact(spec_pi):
    u = SpectralField.mode(spec_pi, 1)
    after = step(u, 0.1, spec_pi, nonlinear=False)
    assert after.coeffs[0] == pytest.approx(math.exp(-0.1), rel=1e-13)
    assert np.max(np.abs(after.coeffs[1:])) == 0.0


def test_stiff_modes_are_damped_not_amplified(spec_pi):
    u = SpectralField.mode(spec_pi, spec_pi.n_coeffs, 1e-3)
    after = step(u, 0.01, spec_pi)
    assert np.max(np.abs(after.coeffs)) < 1e-3


def test_contour_weights_match_direct_formulas():
    eigenvalues = np.array([2.0, 50.0])
    dt = 0.1
    w = etd_coefficients(eigenvalues, dt)
    z = -eigenvalues * dt
    direct_f1 = dt * (-4 - z + np.exp(z) * (4 - 3 * z + z**2)) / z**3
    direct_half = dt * (np.exp(z / 2) - 1) / z
    assert np.allclose(w.f1, direct_f1, rtol=1e-10)
    assert np.allclose(w.half_weight, direct_half, rtol=1e-10)


def test_zero_eigenvalue_limits():
    w = etd_coefficients(np.array([0.0]), 1.0)
    assert w.f1[0] == pytest.approx(1 / 6, rel=1e-12)
    assert w.f2[0] == pytest.approx(1 / 6, rel=1e-12)
    assert w.f3[0] == pytest.approx(1 / 6, rel=1e-12)


def test_coefficient_cache_reuses_weights(spec_pi):
    cache = CoefficientCache(LinearSymbol.for_spec(spec_pi).eigenvalues, max_size=2)
    cache.get(0.1)
    cache.get(0.1)
    cache.get(0.2)
    cache.get(0.3)
    stats = cache.get_stats()
    assert stats["hits"] == 1
    assert stats["misses"] == 3
    assert stats["evictions"] == 1
    assert stats["size"] == 2


def _march(stepper, coeffs, dt, n_steps):
    for _ in range(n_steps):
        coeffs = stepper.advance_coeffs(coeffs, dt)
    return coeffs


def test_stepper_is_fourth_order(spec_small):
    u = SpectralField.mode(spec_small, 1, 1.0)
    stepper = ETDStepper(spec_small)
    horizon = 0.4
    reference = _march(stepper, u.coeffs, horizon / 1600, 1600)
    errors = [
        float(np.linalg.norm(_march(stepper, u.coeffs, horizon / n, n) - reference))
        for n in (4, 8, 16)
    ]
    assert errors[0] > errors[1] > errors[2] > 0
    # halving h should divide the error by about 2^4
    assert errors[0] / errors[1] > 11.0
    assert errors[1] / errors[2] > 11.0


def test_stepper_matches_small_step_reference(spec_small):
    u = SpectralField.mode(spec_small, 1, 0.8)
    stepper = ETDStepper(spec_small)
    one = stepper.advance_coeffs(u.coeffs, 0.02)
    many = _march(stepper, u.coeffs, 0.001, 20)
    assert np.allclose(one, many, rtol=0.0, atol=1e-8)
