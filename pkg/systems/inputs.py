from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from common.errors import ScenarioValidationError
from expr import CompiledExpr, ExprAst

logger = logging.getLogger(__name__)

RATE_MARGIN = 1e-6
MIN_WINDOW = 1e-3


def _sech(a: float) -> float:
    try:
        return 1.0 / math.cosh(a)
    except OverflowError:
        return 0.0


class InputComponent(ABC):
    lam_minus: float
    lam_plus: float

    @abstractmethod
    def value(self, tau: float) -> float:
        raise NotImplementedError

    @abstractmethod
    def derivative(self, tau: float) -> float:
        raise NotImplementedError


@dataclass(frozen=True, slots=True)
class BuiltinTanh(InputComponent):
    lam_minus: float
    lam_plus: float
    steepness: float

    def __post_init__(self) -> None:
        if not self.steepness > 0.0:
            raise ValueError("tanh steepness must be positive")

    def value(self, tau: float) -> float:
        return self.lam_minus + (self.lam_plus - self.lam_minus) * (
            1.0 + math.tanh(0.5 * self.steepness * tau)
        ) / 2.0

    def derivative(self, tau: float) -> float:
        s = _sech(0.5 * self.steepness * tau)
        return (self.lam_plus - self.lam_minus) * 0.25 * self.steepness * s * s


@dataclass(frozen=True, slots=True)
class BuiltinSechPulse(InputComponent):
    base: float
    amplitude: float
    width: float

    def __post_init__(self) -> None:
        if not self.width > 0.0:
            raise ValueError("pulse width must be positive")

    @property
    def lam_minus(self) -> float:
        return self.base

    @property
    def lam_plus(self) -> float:
        return self.base

    def value(self, tau: float) -> float:
        return self.base + self.amplitude * _sech(tau / self.width)

    def derivative(self, tau: float) -> float:
        u = tau / self.width
        return -self.amplitude / self.width * _sech(u) * math.tanh(u)


@dataclass(frozen=True)
class UserExpr(InputComponent):
    ast: ExprAst
    lam_minus: float
    lam_plus: float
    _compiled: CompiledExpr = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_compiled", CompiledExpr(self.ast, ("tau",)))

    def value(self, tau: float) -> float:
        return self._compiled.value([tau])

    def derivative(self, tau: float) -> float:
        return float(self._compiled.dual([tau]).partials[0])


@dataclass(slots=True)
class InputCheck:
    t_check: float
    limit_error_minus: float
    limit_error_plus: float
    estimated_rate: float
    declared_rate: float
    ok: bool
    messages: List[str] = field(default_factory=list)


class ExternalInput:
    """Bi-asymptotically constant input with declared limits and decay coefficient."""

    def __init__(self, components: Sequence[InputComponent], rho: float) -> None:
        if not components:
            raise ValueError("an input needs at least one component")
        if not rho > 0.0:
            raise ValueError("decay coefficient rho must be positive")
        self.components = tuple(components)
        self.rho = float(rho)

    @property
    def d(self) -> int:
        return len(self.components)

    @property
    def lam_minus(self) -> np.ndarray:
        return np.array([c.lam_minus for c in self.components], dtype=float)

    @property
    def lam_plus(self) -> np.ndarray:
        return np.array([c.lam_plus for c in self.components], dtype=float)

    def value(self, tau: float) -> np.ndarray:
        if tau == math.inf:
            return self.lam_plus
        if tau == -math.inf:
            return self.lam_minus
        return np.array([c.value(tau) for c in self.components])

    def derivative(self, tau: float) -> np.ndarray:
        if math.isinf(tau):
            return np.zeros(self.d)
        return np.array([c.derivative(tau) for c in self.components])

    def check(self, samples: int = 33) -> InputCheck:
        t_check = 40.0 / self.rho
        messages: List[str] = []
        scale = 1.0 + float(np.linalg.norm(self.lam_plus - self.lam_minus))
        err_minus = float(np.linalg.norm(self.value(-t_check) - self.lam_minus))
        err_plus = float(np.linalg.norm(self.value(t_check) - self.lam_plus))
        tol_minus = 1e-8 * (scale + float(np.linalg.norm(self.lam_minus)))
        tol_plus = 1e-8 * (scale + float(np.linalg.norm(self.lam_plus)))
        if err_minus > tol_minus:
            messages.append(
                f"input at tau=-{t_check:g} differs from the declared past limit by {err_minus:.3g}"
            )
        if err_plus > tol_plus:
            messages.append(
                f"input at tau={t_check:g} differs from the declared future limit by {err_plus:.3g}"
            )
        rate = self.estimate_decay_rate(t_check, samples)
        if self.rho > rate * (1.0 - RATE_MARGIN):
            messages.append(
                f"declared decay coefficient rho={self.rho:g} is not below the "
                f"estimated decay rate {rate:.6g}"
            )
        return InputCheck(
            t_check=t_check,
            limit_error_minus=err_minus,
            limit_error_plus=err_plus,
            estimated_rate=rate,
            declared_rate=self.rho,
            ok=not messages,
            messages=messages,
        )

    def estimate_decay_rate(self, t_check: float, samples: int = 33) -> float:
        """Slowest exponential decay rate of |Lambda'| over |tau| in [T/2, T].

        Where |Lambda'| underflows to zero the window moves inward until it holds
        enough nonzero samples; a tail that is zero all the way in is constant.
        """
        return min(self._tail_rate(sign, t_check, samples) for sign in (-1.0, 1.0))

    def _tail_rate(self, sign: float, t_check: float, samples: int) -> float:
        t_hi = t_check
        while t_hi >= MIN_WINDOW * t_check:
            taus = np.linspace(0.5 * t_hi, t_hi, samples)
            norms = np.array([np.linalg.norm(self.derivative(sign * t)) for t in taus])
            mask = np.isfinite(norms) & (norms > 0.0)
            if mask.sum() >= 3:
                if t_hi < t_check:
                    logger.debug(
                        "Input derivative underflows near |tau|=%g; fitted on [%g, %g]",
                        2.0 * t_hi,
                        0.5 * t_hi,
                        t_hi,
                    )
                return float(-np.polyfit(taus[mask], np.log(norms[mask]), 1)[0])
            t_hi *= 0.5
        logger.debug("Input is constant on the %s tail", "past" if sign < 0 else "future")
        return math.inf

    def validate(self) -> InputCheck:
        result = self.check()
        if not result.ok:
            raise ScenarioValidationError("; ".join(result.messages))
        logger.debug(
            "Input validated: rho=%g estimated rate=%g", self.rho, result.estimated_rate
        )
        return result


def input_value(external: ExternalInput, tau: float) -> np.ndarray:
    return external.value(tau)


def input_derivative(external: ExternalInput, tau: float) -> np.ndarray:
    return external.derivative(tau)
