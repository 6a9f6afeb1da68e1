from __future__ import annotations

import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from common.errors import PreconditionError
from common.types import ManifoldKind
from config.settings import NumericSettings, get_settings
from equilibria import EquilibriumRecord
from systems import FrozenSystem

from .attractors import AttractorCatalogue, classify_with_path
from .sample import ManifoldSample
from .unstable import check_seed_delta

logger = logging.getLogger(__name__)


def edge_tails(
    frozen: FrozenSystem,
    lam_plus: Sequence[float],
    eta_plus: EquilibriumRecord,
    catalogue: AttractorCatalogue,
    delta: Optional[float] = None,
    t_max: Optional[float] = None,
    settings: Optional[NumericSettings] = None,
) -> Tuple[ManifoldSample, ManifoldSample]:
    """Both branches of the unstable manifold of the future edge state, each classified.

    The first sample is seeded along +v_u and the second along -v_u; which one is the
    upper tail is decided later against the rates on either side of the critical rate.
    """
    settings = settings or get_settings()
    if not eta_plus.is_edge_candidate:
        raise PreconditionError(f"{eta_plus.describe()} has no single unstable direction")
    if delta is None:
        delta = settings.seed_delta_rel * (1.0 + float(np.linalg.norm(eta_plus.x)))
    check_seed_delta(delta)
    index = int(np.argmax(eta_plus.eigen.values.real))
    v_u = eta_plus.eigen.vector(index)

    tails = []
    for sign, kind in ((1.0, ManifoldKind.EDGE_TAIL_UPPER), (-1.0, ManifoldKind.EDGE_TAIL_LOWER)):
        seed = eta_plus.x + sign * delta * v_u
        outcome, times, states = classify_with_path(frozen, lam_plus, seed, catalogue, t_max, settings)
        logger.info(
            "Edge tail along %sv_u ends as %s", "+" if sign > 0 else "-", outcome.describe(),
            extra={"analysis": "edge_tails", "outcome": outcome.describe()},
        )
        tails.append(
            ManifoldSample(
                kind=kind,
                points=states,
                times=times,
                seed_offsets=(sign * delta,),
                owner=eta_plus,
                outcome=outcome,
            )
        )
    return tails[0], tails[1]
