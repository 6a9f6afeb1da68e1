from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List

import numpy as np

from common.errors import NonHyperbolicError, PreconditionError
from common.types import LimitSide
from equilibria import Branch, EquilibriumRecord
from numcore import EigenDecomposition, eigen

from .system import CompactifiedSystem
from .transform import g_alpha

logger = logging.getLogger(__name__)

NORMAL_TOL = 1e-8
LIMIT_MATCH_REL = 1e-9


@dataclass(slots=True)
class LiftedEquilibrium:
    base: EquilibriumRecord
    side: LimitSide
    point: np.ndarray
    eigen: EigenDecomposition
    extra_index: int
    extra_value: complex
    extra_vector: np.ndarray
    v_normal_to_S: bool
    v_is_leading: bool

    @property
    def s(self) -> float:
        return float(self.point[-1])

    def unstable_indices(self) -> List[int]:
        return [i for i, mu in enumerate(self.eigen.values) if mu.real > 0.0]

    def unstable_vector(self) -> np.ndarray:
        indices = self.unstable_indices()
        if len(indices) != 1:
            raise PreconditionError(
                f"expected one unstable direction at the lifted point, found {len(indices)}"
            )
        return self.eigen.vector(indices[0])


def lift_equilibrium(
    cs: CompactifiedSystem, base: EquilibriumRecord, side: LimitSide
) -> LiftedEquilibrium:
    """Lift a limit-system equilibrium to (x, -1) or (x, +1) and inspect the extra direction."""
    s = -1.0 if side is LimitSide.PAST else 1.0
    limit = cs.lam_at(s)
    if np.linalg.norm(base.lam - limit) > LIMIT_MATCH_REL * (1.0 + np.linalg.norm(limit)):
        raise PreconditionError(f"equilibrium input {base.lam} is not the {side.value.lower()} limit {limit}")
    if not base.hyperbolic:
        raise NonHyperbolicError(f"cannot lift a non-hyperbolic equilibrium: {base.describe()}")

    point = np.append(base.x, s)
    decomposition = eigen(cs.jacobian(point))
    target = -cs.alpha * s
    distances = np.abs(decomposition.values - target)
    close = np.flatnonzero(distances <= distances.min() + 1e-10 * (1.0 + abs(target)))
    index = int(max(close, key=lambda i: abs(decomposition.vectors[-1, i])))
    vector = decomposition.vector(index)
    if vector[-1].real < 0.0:
        vector = -vector

    extra = complex(decomposition.values[index])
    others = [complex(mu) for i, mu in enumerate(decomposition.values) if i != index]
    same_sign = [mu.real for mu in others if np.sign(mu.real) == np.sign(extra.real)]
    leading = not same_sign or extra.real >= max(same_sign)
    lifted = LiftedEquilibrium(
        base=base,
        side=side,
        point=point,
        eigen=decomposition,
        extra_index=index,
        extra_value=extra,
        extra_vector=vector,
        v_normal_to_S=bool(np.linalg.norm(vector[:-1]) <= NORMAL_TOL),
        v_is_leading=bool(leading),
    )
    logger.debug(
        "Lifted %s equilibrium: extra eigenvalue %.6g normal=%s leading=%s",
        side.value.lower(), extra.real, lifted.v_normal_to_S, lifted.v_is_leading,
    )
    return lifted


def critical_manifold_sample(cs: CompactifiedSystem, branch: Branch) -> np.ndarray:
    """Branch records (tau, x) mapped to points (x, g_alpha(tau)) of the critical set."""
    if not branch.records:
        return np.empty((0, cs.n + 1))
    return np.array(
        [np.append(rec.x, g_alpha(cs.alpha, float(tau))) for tau, rec in zip(branch.params, branch.records)]
    )
