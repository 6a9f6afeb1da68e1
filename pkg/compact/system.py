from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from common.errors import PreconditionError
from systems import ExternalInput, FrozenSystem

from .transform import g_alpha, glued_input, glued_input_derivative, h_alpha


class CompactifiedSystem:
    """Autonomous flow on R^n x [-1, 1] with s = tanh(alpha tau / 2).

    Trajectories are integrated in tau itself: x' = f(x, Lambda_alpha(s)) / r and
    s' = alpha (1 - s^2) / 2, so the subspaces s = -1 and s = +1 are invariant and
    carry the past and future limit systems.
    """

    def __init__(
        self,
        frozen: FrozenSystem,
        external: ExternalInput,
        r: float,
        alpha: float,
    ) -> None:
        if not r > 0.0:
            raise PreconditionError("rate r must be positive")
        if not 0.0 < alpha <= external.rho:
            raise PreconditionError(
                f"alpha={alpha:g} outside the regularity window 0 < alpha <= rho={external.rho:g}"
            )
        if frozen.d != external.d:
            raise PreconditionError(
                f"input has {external.d} components but the system expects {frozen.d}"
            )
        self.frozen = frozen
        self.input = external
        self.r = float(r)
        self.alpha = float(alpha)
        self.n = frozen.n
        self.logger = logging.getLogger(__name__)
        self._boundary_warned = False

    @property
    def boundary_entry_vanishes(self) -> bool:
        return self.alpha < self.input.rho

    def lam_at(self, s: float) -> np.ndarray:
        return glued_input(self.input, self.alpha, s)

    def s_of(self, tau: float) -> float:
        return g_alpha(self.alpha, tau)

    def tau_of(self, s: float) -> float:
        return h_alpha(self.alpha, s)

    def split(self, point: Sequence[float]) -> tuple[np.ndarray, float]:
        point = np.asarray(point, dtype=float)
        return point[: self.n], float(min(max(point[self.n], -1.0), 1.0))

    def rhs(self, _tau: float, point: np.ndarray) -> np.ndarray:
        x, s = self.split(point)
        out = np.empty(self.n + 1)
        out[: self.n] = self.frozen.evaluate(x, self.lam_at(s)) / self.r
        out[self.n] = 0.5 * self.alpha * (1.0 - s * s)
        return out

    def jacobian(self, point: Sequence[float]) -> np.ndarray:
        x, s = self.split(point)
        Jx, Jl = self.frozen.jacobians(x, self.lam_at(s))
        J = np.zeros((self.n + 1, self.n + 1))
        J[: self.n, : self.n] = Jx / self.r
        J[: self.n, self.n] = Jl @ glued_input_derivative(self.input, self.alpha, s) / self.r
        J[self.n, self.n] = -self.alpha * s
        if abs(s) == 1.0 and not self.boundary_entry_vanishes and not self._boundary_warned:
            self._boundary_warned = True
            self.logger.warning(
                "alpha=%g equals rho: limit entry not guaranteed zero at s=%+g",
                self.alpha, s, extra={"analysis": "compactify"},
            )
        return J

    def with_rate(self, r: float, alpha: float | None = None) -> "CompactifiedSystem":
        return CompactifiedSystem(self.frozen, self.input, r, self.alpha if alpha is None else alpha)


def compactified_rhs(cs: CompactifiedSystem, point: Sequence[float]) -> np.ndarray:
    return cs.rhs(0.0, np.asarray(point, dtype=float))


def compactified_jacobian(cs: CompactifiedSystem, point: Sequence[float]) -> np.ndarray:
    return cs.jacobian(point)
