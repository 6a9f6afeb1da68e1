from __future__ import annotations

from typing import Callable

import numpy as np

from .frozen import FrozenSystem
from .inputs import ExternalInput


class NonautonomousSystem:
    """x' = f(x, Lambda(tau)) / r in the input's own time tau = r t."""

    def __init__(self, frozen: FrozenSystem, external: ExternalInput, r: float) -> None:
        if not r > 0.0:
            raise ValueError("rate r must be positive")
        if frozen.d != external.d:
            raise ValueError(
                f"input has {external.d} components but the system expects {frozen.d}"
            )
        self.frozen = frozen
        self.input = external
        self.r = float(r)

    def rhs(self, tau: float, x: np.ndarray) -> np.ndarray:
        return self.frozen.evaluate(x, self.input.value(tau)) / self.r

    def field(self) -> Callable[[float, np.ndarray], np.ndarray]:
        return self.rhs

    def with_rate(self, r: float) -> "NonautonomousSystem":
        return NonautonomousSystem(self.frozen, self.input, r)


def rhs(system: NonautonomousSystem, tau: float, x: np.ndarray) -> np.ndarray:
    return system.rhs(tau, np.asarray(x, dtype=float))
