"""Nehari scaling and the scale-invariant functionals built on it.

Optimisers work in H²-weighted coordinates v_k = (kπ/a)^2 c_k, where
||u_xx||_2^2 = (a/2)|v|^2. Gradients are exact for the quadrature used by
the functionals: d||u||_{p+1}^{p+1}/dc_k = (p+1)(a/2) f_k with f_k the
dealiased source coefficients.
"""

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..core.domain import DomainSpec, SpectralField
from ..core.errors import ZeroFieldError
from ..core.transforms import cosine_analysis
from ..functionals.diagnostics import h2_norm_sq, lambda_star
from ..spectral.operators import padded_values, power_source


def project_to_nehari(u: SpectralField, spec: DomainSpec) -> SpectralField:
    """λ*(u) u, the point of the Nehari manifold on the ray through u."""
    return u * lambda_star(u, spec)


def reduced_energy(u: SpectralField, spec: DomainSpec) -> float:
    """J(λ*(u) u) = ((p-1)/(2(p+1))) λ*(u)^2 ||u_xx||^2; invariant under u -> cu, c > 0."""
    p = spec.p
    return (p - 1.0) / (2.0 * (p + 1.0)) * lambda_star(u, spec) ** 2 * h2_norm_sq(u, spec)


def nehari_radius(alpha: float, p: float) -> float:
    """Bound on ||u_xx||_2 for Nehari elements with J(u) <= alpha."""
    return math.sqrt(2.0 * alpha * (p + 1.0) / (p - 1.0))


@dataclass(frozen=True)
class LandscapePoint:
    """Integrals and their v-gradients at one point."""

    v: np.ndarray
    h2sq: float
    lp1: float
    l2sq: float
    grad_log_h2sq: np.ndarray
    grad_log_lp1: np.ndarray
    grad_log_l2sq: np.ndarray


class NehariLandscape:
    """Scale-invariant functionals of one DomainSpec in weighted coordinates."""

    def __init__(self, spec: DomainSpec):
        self.spec = spec
        self.p = spec.p
        self.half_a = 0.5 * spec.a
        self.weights = spec.wavenumbers() ** 2
        self.q = 2.0 / (spec.p - 1.0)
        self.prefactor = (spec.p - 1.0) / (2.0 * (spec.p + 1.0))

    def to_weighted(self, coeffs: np.ndarray) -> np.ndarray:
        return coeffs * self.weights

    def to_coeffs(self, v: np.ndarray) -> np.ndarray:
        return v / self.weights

    def normalize(self, v: np.ndarray) -> np.ndarray:
        """Rescale to ||u_xx||_2 = 1."""
        norm_sq = self.half_a * float(np.dot(v, v))
        if norm_sq == 0.0:
            raise ZeroFieldError("Cannot normalise the zero field")
        return v / math.sqrt(norm_sq)

    def evaluate(self, v: np.ndarray) -> LandscapePoint:
        coeffs = self.to_coeffs(v)
        values = padded_values(coeffs, self.spec)
        lp1 = self.spec.a / values.size * float(np.sum(np.abs(values) ** (self.p + 1.0)))
        if not lp1 > 0:
            raise ZeroFieldError("Field vanishes on the quadrature grid")
        source = cosine_analysis(power_source(values, self.p))[: self.spec.n_coeffs]
        h2sq = self.half_a * float(np.dot(v, v))
        l2sq = self.half_a * float(np.dot(coeffs, coeffs))
        return LandscapePoint(
            v=v,
            h2sq=h2sq,
            lp1=lp1,
            l2sq=l2sq,
            grad_log_h2sq=2.0 * self.half_a * v / h2sq,
            grad_log_lp1=(self.p + 1.0) * self.half_a * source / (self.weights * lp1),
            grad_log_l2sq=2.0 * self.half_a * coeffs / (self.weights * l2sq),
        )

    def log_lambda_star(self, point: LandscapePoint) -> float:
        return (math.log(point.h2sq) - math.log(point.lp1)) / (self.p - 1.0)

    def grad_log_lambda_star(self, point: LandscapePoint) -> np.ndarray:
        return (point.grad_log_h2sq - point.grad_log_lp1) / (self.p - 1.0)

    def log_depth(self, point: LandscapePoint) -> Tuple[float, np.ndarray]:
        """log of the reduced energy and its gradient."""
        value = (
            math.log(self.prefactor)
            + (1.0 + self.q) * math.log(point.h2sq)
            - self.q * math.log(point.lp1)
        )
        grad = (1.0 + self.q) * point.grad_log_h2sq - self.q * point.grad_log_lp1
        return value, grad

    def log_half_l2(self, point: LandscapePoint) -> Tuple[float, np.ndarray]:
        """log of ||λ* u||_2^2 / 2 and its gradient."""
        value = (
            math.log(0.5)
            + self.q * (math.log(point.h2sq) - math.log(point.lp1))
            + math.log(point.l2sq)
        )
        grad = self.q * (point.grad_log_h2sq - point.grad_log_lp1) + point.grad_log_l2sq
        return value, grad

    def nehari_field(self, v: np.ndarray) -> SpectralField:
        """The Nehari element on the ray through v."""
        return project_to_nehari(SpectralField(self.to_coeffs(v)), self.spec)
