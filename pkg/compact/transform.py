from __future__ import annotations

import math
from typing import Optional

import numpy as np

from common.errors import PreconditionError
from systems import ExternalInput


def g_alpha(alpha: float, tau: float) -> float:
    """s = tanh(alpha tau / 2); infinite tau maps to the boundary s = +-1."""
    if not alpha > 0.0:
        raise PreconditionError("alpha must be positive")
    if math.isinf(tau):
        return math.copysign(1.0, tau)
    return math.tanh(0.5 * alpha * tau)


def h_alpha(alpha: float, s: float) -> float:
    """Inverse of g_alpha; s = +-1 returns +-inf."""
    if not alpha > 0.0:
        raise PreconditionError("alpha must be positive")
    if abs(s) > 1.0:
        raise PreconditionError(f"s={s!r} is outside [-1, 1]")
    if abs(s) == 1.0:
        return math.copysign(math.inf, s)
    return 2.0 / alpha * math.atanh(s)


def glued_input(external: ExternalInput, alpha: float, s: float) -> np.ndarray:
    """Lambda_alpha(s): Lambda(h_alpha(s)) inside, the declared limits on s = +-1."""
    if s >= 1.0:
        return external.lam_plus
    if s <= -1.0:
        return external.lam_minus
    return external.value(h_alpha(alpha, s))


def glued_input_derivative(
    external: ExternalInput, alpha: float, s: float
) -> np.ndarray:
    """d Lambda_alpha / ds by the chain rule; the boundary value is the analytic limit 0."""
    if abs(s) >= 1.0:
        return np.zeros(external.d)
    return external.derivative(h_alpha(alpha, s)) * (2.0 / (alpha * (1.0 - s * s)))


def choose_alpha(external: ExternalInput, r: float, l1: Optional[complex] = None) -> float:
    if not r > 0.0:
        raise PreconditionError("rate r must be positive")
    bound = external.rho
    if l1 is not None:
        decay = -complex(l1).real
        if not decay > 0.0:
            raise PreconditionError(f"leading sink eigenvalue {l1} does not have negative real part")
        bound = min(bound, decay / r)
    return 0.5 * bound
