from __future__ import annotations

import logging
from typing import Callable, Sequence

import numpy as np

from common.errors import (
    EvaluationDomainError,
    NewtonConvergenceError,
    PreconditionError,
    SingularJacobianError,
)

logger = logging.getLogger(__name__)

Residual = Callable[[np.ndarray], np.ndarray]
Jacobian = Callable[[np.ndarray], np.ndarray]

COND_LIMIT = 1e12
MAX_HALVINGS = 20
STEP_FLOOR = 1e-14


def _residual_norm(residual: Residual, x: np.ndarray) -> tuple[np.ndarray, float]:
    try:
        F = np.atleast_1d(np.asarray(residual(x), dtype=float))
    except EvaluationDomainError:
        return np.full(x.shape, np.nan), np.inf
    value = float(np.linalg.norm(F))
    return F, value if np.isfinite(value) else np.inf


def newton(
    residual: Residual,
    jacobian: Jacobian,
    x0: Sequence[float],
    tol: float = 1e-12,
    max_iter: int = 50,
) -> np.ndarray:
    """Damped Newton with a halving line search on ||F||.

    Iteration continues past ||F|| <= tol while the residual still decreases, so
    roots are polished to roundoff before returning.
    """
    x = np.array(x0, dtype=float).reshape(-1)
    if not np.all(np.isfinite(x)):
        raise PreconditionError("Newton start point is not finite")
    F, fn = _residual_norm(residual, x)
    if not np.isfinite(fn):
        raise NewtonConvergenceError("residual is not finite at the start point")

    for iteration in range(max_iter):
        if fn == 0.0:
            return x
        J = np.atleast_2d(np.asarray(jacobian(x), dtype=float))
        cond = np.linalg.cond(J) if np.all(np.isfinite(J)) else np.inf
        if not cond <= COND_LIMIT:
            if fn <= tol:
                return x
            raise SingularJacobianError(
                f"Jacobian condition {cond:.3g} exceeds {COND_LIMIT:g} at |F|={fn:.3g}"
            )
        dx = np.linalg.solve(J, -F)

        step = 1.0
        for _ in range(MAX_HALVINGS + 1):
            trial = x + step * dx
            F_trial, f_trial = _residual_norm(residual, trial)
            if f_trial < fn:
                break
            step *= 0.5
        else:
            if fn <= tol:
                return x
            raise NewtonConvergenceError(
                f"line search failed after {iteration} iterations with |F|={fn:.3g}"
            )

        x, F, fn = trial, F_trial, f_trial
        if np.linalg.norm(step * dx) <= STEP_FLOOR * (1.0 + np.linalg.norm(x)):
            break

    if fn <= tol:
        return x
    raise NewtonConvergenceError(f"no convergence in {max_iter} iterations, |F|={fn:.3g}")
