from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from common.errors import PreconditionError
from common.types import Stability
from config.settings import NumericSettings, get_settings
from numcore import EigenDecomposition, eigen, newton
from systems import FrozenSystem


@dataclass(slots=True)
class EquilibriumRecord:
    x: np.ndarray
    lam: np.ndarray
    eigen: EigenDecomposition
    stability: Stability
    unstable_dim: int
    residual: float = 0.0

    @property
    def hyperbolic(self) -> bool:
        return self.stability is not Stability.NON_HYPERBOLIC

    @property
    def is_sink(self) -> bool:
        return self.stability is Stability.SINK

    @property
    def is_edge_candidate(self) -> bool:
        # one unstable direction: saddles, and sources in one dimension
        return self.hyperbolic and self.unstable_dim == 1

    @property
    def leading(self) -> complex:
        return self.eigen.leading

    def same_class(self, other: "EquilibriumRecord") -> bool:
        return self.stability is other.stability and self.unstable_dim == other.unstable_dim

    def describe(self) -> str:
        coords = ", ".join(f"{v:.6g}" for v in self.x)
        return f"{self.stability.value.lower()} at ({coords})"


def classify(eig: EigenDecomposition, hyperbolicity_tol: float) -> Tuple[Stability, int]:
    re = eig.values.real
    unstable = int(np.sum(re > hyperbolicity_tol))
    if np.any(np.abs(re) < hyperbolicity_tol):
        return Stability.NON_HYPERBOLIC, unstable
    if unstable == 0:
        return Stability.SINK, 0
    if unstable == len(re):
        return Stability.SOURCE, unstable
    return Stability.SADDLE, unstable


def make_record(
    frozen: FrozenSystem,
    x: Sequence[float],
    lam: Sequence[float],
    hyperbolicity_tol: float,
) -> EquilibriumRecord:
    x = np.asarray(x, dtype=float)
    lam = np.asarray(lam, dtype=float)
    decomposition = eigen(frozen.jacobian_x(x, lam))
    stability, unstable = classify(decomposition, hyperbolicity_tol)
    return EquilibriumRecord(
        x=x,
        lam=lam,
        eigen=decomposition,
        stability=stability,
        unstable_dim=unstable,
        residual=float(np.linalg.norm(frozen.evaluate(x, lam))),
    )


def find_equilibrium(
    frozen: FrozenSystem,
    lam: Sequence[float],
    guess: Sequence[float],
    settings: Optional[NumericSettings] = None,
) -> EquilibriumRecord:
    """Newton from ``guess`` at the frozen input ``lam``; non-hyperbolic roots are flagged, not raised."""
    settings = settings or get_settings()
    lam = np.asarray(lam, dtype=float).reshape(-1)
    if len(guess) != frozen.n or lam.size != frozen.d:
        raise PreconditionError(
            f"expected a guess in R^{frozen.n} and an input in R^{frozen.d}"
        )
    x = newton(
        lambda z: frozen.evaluate(z, lam),
        lambda z: frozen.jacobian_x(z, lam),
        guess,
        tol=settings.newton_tol,
        max_iter=settings.newton_max_iter,
    )
    return make_record(frozen, x, lam, settings.hyperbolicity_tol)
