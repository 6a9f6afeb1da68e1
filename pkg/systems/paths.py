from __future__ import annotations

import math
from abc import ABC, abstractmethod
from typing import List, Sequence

import numpy as np

from expr import CompiledExpr, ExprAst

from .inputs import ExternalInput

DEDUPE_REL = 1e-9


class ParameterPath(ABC):
    """Compact curve in input space parametrised by u in [0, 1]."""

    d: int

    @abstractmethod
    def point(self, u: float) -> np.ndarray:
        raise NotImplementedError

    def sample(self, m: int) -> np.ndarray:
        if m < 2:
            raise ValueError("a path trace needs at least two samples")
        return np.array([self.point(float(u)) for u in np.linspace(0.0, 1.0, m)])


class PathOfInput(ParameterPath):
    """Points traced by Lambda(tau) for tau in the interval (tau_lo, tau_hi).

    Infinite ends are reached through s = tanh(alpha tau / 2) with alpha = rho / 2,
    so u = 0 and u = 1 land on the declared limits.
    """

    def __init__(
        self,
        external: ExternalInput,
        tau_lo: float = -math.inf,
        tau_hi: float = math.inf,
    ) -> None:
        if not tau_lo < tau_hi:
            raise ValueError("path interval must satisfy tau_lo < tau_hi")
        self.input = external
        self.tau_lo = float(tau_lo)
        self.tau_hi = float(tau_hi)
        self.d = external.d
        self._alpha = 0.5 * external.rho
        self._s_lo = self._s_of(self.tau_lo)
        self._s_hi = self._s_of(self.tau_hi)

    def _s_of(self, tau: float) -> float:
        if math.isinf(tau):
            return math.copysign(1.0, tau)
        return math.tanh(0.5 * self._alpha * tau)

    def tau_of(self, u: float) -> float:
        u = min(max(float(u), 0.0), 1.0)
        if not (math.isinf(self.tau_lo) or math.isinf(self.tau_hi)):
            return self.tau_lo + u * (self.tau_hi - self.tau_lo)
        s = self._s_lo + u * (self._s_hi - self._s_lo)
        if s >= 1.0:
            return math.inf
        if s <= -1.0:
            return -math.inf
        return 2.0 / self._alpha * math.atanh(s)

    def point(self, u: float) -> np.ndarray:
        return self.input.value(self.tau_of(u))


class ExplicitCurve(ParameterPath):
    def __init__(self, components: Sequence[ExprAst]) -> None:
        if not components:
            raise ValueError("an explicit curve needs at least one component")
        self.components = tuple(components)
        self.d = len(self.components)
        self._compiled = [CompiledExpr(ast, ("u",)) for ast in self.components]

    def point(self, u: float) -> np.ndarray:
        return np.array([expr.value([float(u)]) for expr in self._compiled])


def dedupe_points(points: np.ndarray) -> np.ndarray:
    kept: List[np.ndarray] = []
    for p in np.atleast_2d(points):
        tol = DEDUPE_REL * (1.0 + float(np.linalg.norm(p)))
        if any(np.linalg.norm(p - q) <= tol for q in kept):
            continue
        kept.append(p)
    return np.array(kept)


def trace_path(path: ParameterPath, m: int) -> np.ndarray:
    """Sampled points of the path, in order, with repeated values removed."""
    return dedupe_points(path.sample(m))
