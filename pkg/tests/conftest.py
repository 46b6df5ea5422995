"""Shared fixtures for thinfilm-lab tests."""

import math

import numpy as np
import pytest

from thinfilm_lab.core.domain import DomainSpec, SpectralField
from thinfilm_lab.nehari.well_depth import OptimizerConfig


@pytest.fixture
def spec_pi() -> DomainSpec:
    """a = π, p = 3, 64 modes."""
    return DomainSpec(a=math.pi, p=3.0, n_modes=64)


@pytest.fixture
def spec_small() -> DomainSpec:
    return DomainSpec(a=math.pi, p=3.0, n_modes=16)


@pytest.fixture
def cos_field(spec_pi) -> SpectralField:
    return SpectralField.mode(spec_pi, 1)


@pytest.fixture
def light_optimizer() -> OptimizerConfig:
    """Few seeds and iterations; enough for cosine-dominated landscapes."""
    return OptimizerConfig(n_single_modes=2, n_random_seeds=1, random_max_k=4, max_iter=800)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def decay_trajectory(spec_small):
    """0.5 cos x with a fixed step of 1e-3 up to t = 0.2."""
    from thinfilm_lab.integrator.adaptive import StepperConfig, advance

    cfg = StepperConfig(dt_init=1e-3, dt_max=1e-3, t_horizon=0.2, checkpoint_stride=10)
    return advance(SpectralField.mode(spec_small, 1, 0.5), spec_small, cfg)
