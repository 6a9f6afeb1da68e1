from __future__ import annotations

import math

import numpy as np
from scipy.special import expit

from common.errors import PreconditionError
from systems import ExternalInput


def _xi(v: float) -> float:
    """Smooth step: 0 for v <= 0, 1 for v >= 1, C-infinity in between."""
    if v <= 0.0:
        return 0.0
    if v >= 1.0:
        return 1.0
    return float(expit(1.0 / (1.0 - v) - 1.0 / v))


def _xi_prime(v: float) -> float:
    if v <= 0.0 or v >= 1.0:
        return 0.0
    xi = _xi(v)
    if xi == 0.0 or xi == 1.0:
        return 0.0
    slope = xi * (1.0 - xi) * (1.0 / (v * v) + 1.0 / ((1.0 - v) * (1.0 - v)))
    return slope if math.isfinite(slope) else 0.0


class SigmaReparam:
    """tau -> tau_alpha + eps tau + (tau_beta - tau_alpha - eps^2) xi(tau / eps).

    Maps 0 to tau_alpha and eps to tau_beta, and is linear with slope eps
    outside [0, eps].
    """

    def __init__(self, tau_alpha: float, tau_beta: float, eps: float) -> None:
        if not tau_alpha < tau_beta:
            raise PreconditionError(f"need tau_alpha < tau_beta, got {tau_alpha!r} and {tau_beta!r}")
        if not 0.0 < eps * eps < tau_beta - tau_alpha:
            raise PreconditionError(
                f"eps={eps!r} outside 0 < eps^2 < tau_beta - tau_alpha = {tau_beta - tau_alpha!r}"
            )
        self.tau_alpha = float(tau_alpha)
        self.tau_beta = float(tau_beta)
        self.eps = float(eps)
        self._jump = self.tau_beta - self.tau_alpha - self.eps * self.eps

    def __call__(self, tau: float) -> float:
        if math.isinf(tau):
            return tau
        return self.tau_alpha + self.eps * tau + self._jump * _xi(tau / self.eps)

    def derivative(self, tau: float) -> float:
        if math.isinf(tau):
            return self.eps
        return self.eps + self._jump * _xi_prime(tau / self.eps) / self.eps


def sigma_reparam(tau_alpha: float, tau_beta: float, eps: float) -> SigmaReparam:
    return SigmaReparam(tau_alpha, tau_beta, eps)


class ReparametrizedInput(ExternalInput):
    """Lambda composed with a sigma time change; decays at eps * rho."""

    def __init__(self, base: ExternalInput, sigma: SigmaReparam) -> None:
        super().__init__(base.components, sigma.eps * base.rho)
        self.base = base
        self.sigma = sigma

    def value(self, tau: float) -> np.ndarray:
        return self.base.value(self.sigma(tau))

    def derivative(self, tau: float) -> np.ndarray:
        if math.isinf(tau):
            return np.zeros(self.d)
        return self.base.derivative(self.sigma(tau)) * self.sigma.derivative(tau)

    def describe(self) -> dict:
        return {
            "tau_alpha": self.sigma.tau_alpha,
            "tau_beta": self.sigma.tau_beta,
            "eps": self.sigma.eps,
            "rho": self.rho,
        }
