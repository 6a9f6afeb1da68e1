from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
from scipy.integrate import RK45, OdeSolution
from scipy.optimize import brentq

from common.errors import (
    EvaluationDomainError,
    NonFiniteDerivativeError,
    PreconditionError,
    StepSizeUnderflowError,
)
from common.types import TerminationReason

logger = logging.getLogger(__name__)

Field = Callable[[float, np.ndarray], np.ndarray]
EventFn = Callable[[float, np.ndarray], float]

EVENT_XTOL = 1e-12


@dataclass(frozen=True, slots=True)
class Event:
    """Scalar event g(t, y); direction -1 fires on + to - crossings, +1 on - to +."""

    fn: EventFn
    direction: int = 0
    name: str = ""

    def __call__(self, t: float, y: np.ndarray) -> float:
        return float(self.fn(t, y))


EventLike = Union[Event, EventFn]


class _StageFailure(Exception):
    pass


@dataclass(slots=True)
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    reason: TerminationReason
    order: int = 4
    event_index: Optional[int] = None
    event_time: Optional[float] = None
    dense: Optional[Callable[[float], np.ndarray]] = field(default=None, repr=False)

    def __call__(self, t: float) -> np.ndarray:
        if self.dense is None:
            return self.states[-1].copy()
        lo, hi = float(self.times[0]), float(self.times[-1])
        return np.asarray(self.dense(min(max(float(t), lo), hi)), dtype=float)

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]

    @property
    def final_time(self) -> float:
        return float(self.times[-1])

    def __len__(self) -> int:
        return len(self.times)


def _as_event(event: EventLike) -> Event:
    return event if isinstance(event, Event) else Event(event)


def _crossed(g_old: float, g_new: float, direction: int) -> bool:
    rising = g_old < 0.0 <= g_new
    falling = g_old > 0.0 >= g_new
    if direction > 0:
        return rising
    if direction < 0:
        return falling
    return rising or falling


def _locate(event: Event, interp, t_old: float, t_new: float) -> float:
    def g(t: float) -> float:
        return event(t, interp(t))

    g_a, g_b = g(t_old), g(t_new)
    if g_b == 0.0:
        return t_new
    if g_a == 0.0:
        return t_old
    if g_a * g_b > 0.0:
        return t_new
    return float(brentq(g, t_old, t_new, xtol=EVENT_XTOL))


def integrate(
    field_fn: Field,
    x0: Sequence[float],
    t0: float,
    t_end: float,
    rtol: float = 1e-9,
    atol: float = 1e-11,
    events: Sequence[EventLike] = (),
    blowup_norm: float = 1e6,
    max_step: float = math.inf,
    first_step: Optional[float] = None,
    strict: bool = True,
) -> Trajectory:
    """Adaptive RK45 integration from t0 to t_end with event stops and blowup detection."""
    if not t_end > t0:
        raise PreconditionError(f"integration needs t_end > t0, got [{t0}, {t_end}]")
    if not (rtol > 0.0 and atol > 0.0):
        raise PreconditionError("integration tolerances must be positive")
    y0 = np.array(x0, dtype=float).reshape(-1)
    if not np.all(np.isfinite(y0)):
        raise PreconditionError("initial state is not finite")
    checks = [_as_event(ev) for ev in events]

    def fun(t: float, y: np.ndarray) -> np.ndarray:
        try:
            dy = np.asarray(field_fn(t, y), dtype=float)
        except (EvaluationDomainError, OverflowError, FloatingPointError) as exc:
            raise _StageFailure(str(exc)) from exc
        if not np.all(np.isfinite(dy)):
            raise _StageFailure("non-finite derivative")
        return dy

    soft_norm = math.sqrt(blowup_norm)
    try:
        solver = RK45(
            fun,
            t0,
            y0,
            t_end,
            rtol=rtol,
            atol=atol,
            max_step=max_step,
            first_step=first_step,
        )
    except _StageFailure as exc:
        raise NonFiniteDerivativeError(f"field not finite at t={t0}: {exc}") from None

    ts: List[float] = [t0]
    ys: List[np.ndarray] = [y0.copy()]
    interps = []
    g_prev = [ev(t0, y0) for ev in checks]
    reason = TerminationReason.TIME_LIMIT
    event_index: Optional[int] = None
    event_time: Optional[float] = None

    while solver.status == "running":
        t_old = solver.t
        y_old = solver.y.copy()
        try:
            message = solver.step()
        except _StageFailure as exc:
            if np.linalg.norm(y_old) > soft_norm:
                reason = TerminationReason.BLOWUP
                break
            raise NonFiniteDerivativeError(f"{exc} near t={t_old:.17g}") from None
        if solver.status == "failed":
            if np.linalg.norm(y_old) > soft_norm:
                reason = TerminationReason.BLOWUP
                break
            if strict:
                raise StepSizeUnderflowError(f"{message} at t={t_old:.17g}")
            logger.warning("Integration stopped early: %s at t=%.6g", message, t_old)
            reason = TerminationReason.STEP_FAILURE
            break

        t_new = float(solver.t)
        y_new = solver.y.copy()
        interp = solver.dense_output()

        hit: Optional[int] = None
        t_hit = math.inf
        g_new = [ev(t_new, y_new) for ev in checks]
        for i, ev in enumerate(checks):
            if _crossed(g_prev[i], g_new[i], ev.direction):
                t_root = _locate(ev, interp, t_old, t_new)
                if t_root < t_hit:
                    hit, t_hit = i, t_root
        if hit is not None:
            if t_hit > t_old:
                interps.append(interp)
                ts.append(t_hit)
                ys.append(np.asarray(interp(t_hit), dtype=float))
            reason = TerminationReason.EVENT
            event_index, event_time = hit, t_hit
            break

        interps.append(interp)
        ts.append(t_new)
        ys.append(y_new)
        g_prev = g_new
        if np.linalg.norm(y_new) > blowup_norm:
            reason = TerminationReason.BLOWUP
            break

    dense = OdeSolution(np.array(ts), interps) if interps else None
    return Trajectory(
        times=np.array(ts),
        states=np.array(ys),
        reason=reason,
        event_index=event_index,
        event_time=event_time,
        dense=dense,
    )


class _ReversedDense:
    def __init__(self, dense: Callable[[float], np.ndarray]) -> None:
        self._dense = dense

    def __call__(self, t: float) -> np.ndarray:
        return self._dense(-t)


def integrate_backward(
    field_fn: Field,
    x0: Sequence[float],
    t0: float,
    t_end: float,
    events: Sequence[EventLike] = (),
    **options,
) -> Trajectory:
    """Integrate from t0 down to t_end < t0; the result is reordered so times increase.

    Event functions receive physical time; their direction refers to the order of
    integration, from t0 toward t_end.
    """
    if not t_end < t0:
        raise PreconditionError(f"backward integration needs t_end < t0, got [{t_end}, {t0}]")

    def reversed_field(t: float, y: np.ndarray) -> np.ndarray:
        return -np.asarray(field_fn(-t, y), dtype=float)

    reversed_events = []
    for ev in events:
        ev = _as_event(ev)
        reversed_events.append(
            Event(lambda t, y, fn=ev.fn: fn(-t, y), direction=ev.direction, name=ev.name)
        )
    traj = integrate(reversed_field, x0, -t0, -t_end, events=reversed_events, **options)
    return Trajectory(
        times=-traj.times[::-1],
        states=traj.states[::-1].copy(),
        reason=traj.reason,
        order=traj.order,
        event_index=traj.event_index,
        event_time=None if traj.event_time is None else -traj.event_time,
        dense=None if traj.dense is None else _ReversedDense(traj.dense),
    )
