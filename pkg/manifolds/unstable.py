from __future__ import annotations

import logging
from typing import Optional

import numpy as np

from common.errors import PreconditionError
from common.types import LimitSide, ManifoldKind, TerminationReason
from compact import CompactifiedSystem, lift_equilibrium
from config.settings import NumericSettings, get_settings
from equilibria import EquilibriumRecord
from numcore import Event, Trajectory, integrate

from .sample import ManifoldSample

logger = logging.getLogger(__name__)

DELTA_MIN = 1e-8
DELTA_MAX = 1e-3
TAIL_MARGIN = 1.0


def check_seed_delta(delta: float) -> float:
    if not DELTA_MIN <= delta <= DELTA_MAX:
        raise PreconditionError(f"seed offset {delta:g} outside [{DELTA_MIN:g}, {DELTA_MAX:g}]")
    return float(delta)


def compact_orbit(
    cs: CompactifiedSystem,
    point: np.ndarray,
    s_stop: float,
    settings: Optional[NumericSettings] = None,
) -> Trajectory:
    """Compactified orbit from ``point`` = (x, s) up to the section s = s_stop, in tau."""
    settings = settings or get_settings()
    point = np.asarray(point, dtype=float)
    s0 = float(point[-1])
    if not -1.0 < s0 < s_stop < 1.0:
        raise PreconditionError(f"start s={s0!r} must lie in (-1, s_stop={s_stop!r})")
    return integrate(
        cs.rhs,
        point,
        cs.tau_of(s0),
        cs.tau_of(s_stop) + TAIL_MARGIN,
        rtol=settings.rtol,
        atol=settings.atol,
        events=[Event(lambda _t, y: y[-1] - s_stop, direction=1, name="s_stop")],
        blowup_norm=settings.blowup_norm,
    )


def pullback_attractor(
    cs: CompactifiedSystem,
    e_minus: EquilibriumRecord,
    delta: float,
    s_stop: float,
    settings: Optional[NumericSettings] = None,
) -> ManifoldSample:
    """Unstable manifold of the lifted past sink, integrated until s reaches ``s_stop``.

    Times of the returned samples are physical tau values, so the x-part at tau
    approximates the pullback attractor x(tau, e-) at the rate of ``cs``.
    """
    settings = settings or get_settings()
    check_seed_delta(delta)
    if not -1.0 < s_stop < 1.0:
        raise PreconditionError(f"s_stop={s_stop!r} must lie inside (-1, 1)")
    lifted = lift_equilibrium(cs, e_minus, LimitSide.PAST)
    v = lifted.unstable_vector()
    if v[-1] < 0.0:
        v = -v
    seed = lifted.point + delta * v
    s0 = float(min(max(seed[-1], -1.0), 1.0))
    if s0 <= -1.0 or s0 >= s_stop:
        raise PreconditionError(f"seed s={s0!r} does not lie below s_stop={s_stop!r}")
    seed[-1] = s0
    traj = compact_orbit(cs, seed, s_stop, settings)
    states = traj.states.copy()
    states[:, -1] = np.clip(states[:, -1], -1.0, 1.0)
    if traj.reason is TerminationReason.BLOWUP:
        logger.info(
            "Pullback trajectory diverged at tau=%.6g", traj.final_time,
            extra={"analysis": "pullback", "rate": cs.r},
        )
    return ManifoldSample(
        kind=ManifoldKind.UNSTABLE_OF_PAST_SINK,
        points=states,
        times=traj.times,
        seed_offsets=(float(delta),),
        owner=e_minus,
        reason=traj.reason,
        trajectory=traj,
    )
