from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree

from common.errors import ExprError, NumericalError
from common.types import Outcome, OutcomeKind, TerminationReason
from config.settings import NumericSettings, get_settings
from equilibria import EquilibriumRecord, find_equilibrium
from numcore import Event, integrate
from systems import FrozenSystem

logger = logging.getLogger(__name__)

RECURRENCE_RADIUS = 1e-3
RECURRENCE_GAP = 1.0
SIDE_REL = 1e-6


@dataclass(slots=True)
class CatalogueEntry:
    label: str
    record: EquilibriumRecord
    radius: float
    dwell: float
    side_normal: Optional[np.ndarray]

    @property
    def center(self) -> np.ndarray:
        return self.record.x

    def contains(self, x: np.ndarray) -> bool:
        return bool(np.linalg.norm(x - self.center) < self.radius)

    def side(self, x: np.ndarray) -> int:
        if self.side_normal is None:
            return 0
        projection = float(self.side_normal @ (x - self.center))
        if abs(projection) < SIDE_REL * self.radius:
            return 0
        return 1 if projection > 0.0 else -1

    def approach_side(self, path: np.ndarray) -> int:
        """Side at the last entry of ``path`` into the capture ball."""
        path = np.atleast_2d(path)
        outside = np.flatnonzero(np.linalg.norm(path - self.center, axis=1) >= self.radius)
        k = int(outside[-1]) + 1 if outside.size else 0
        return self.side(path[min(k, len(path) - 1)])


class AttractorCatalogue:
    """Hyperbolic sinks of the future limit system with disjoint capture balls."""

    def __init__(self, lam: Sequence[float], entries: Sequence[CatalogueEntry]) -> None:
        self.lam = np.asarray(lam, dtype=float)
        self.entries = list(entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def labels(self) -> List[str]:
        return [entry.label for entry in self.entries]

    def get(self, label: str) -> CatalogueEntry:
        for entry in self.entries:
            if entry.label == label:
                return entry
        raise KeyError(label)

    def locate(self, x: np.ndarray) -> Optional[CatalogueEntry]:
        for entry in self.entries:
            if entry.contains(x):
                return entry
        return None

    def label_of(self, x: Sequence[float], tol: float = 1e-6) -> Optional[str]:
        x = np.asarray(x, dtype=float)
        for entry in self.entries:
            if np.linalg.norm(x - entry.center) <= tol * (1.0 + np.linalg.norm(entry.center)):
                return entry.label
        return None

    @classmethod
    def build(
        cls,
        frozen: FrozenSystem,
        lam: Sequence[float],
        guesses: Sequence[Sequence[float]] = (),
        records: Sequence[EquilibriumRecord] = (),
        settings: Optional[NumericSettings] = None,
    ) -> "AttractorCatalogue":
        settings = settings or get_settings()
        found: List[EquilibriumRecord] = [rec for rec in records if rec.is_sink]
        for guess in guesses:
            try:
                rec = find_equilibrium(frozen, lam, guess, settings)
            except (NumericalError, ExprError) as exc:
                logger.warning("No equilibrium from attractor guess %s: %s", list(guess), exc)
                continue
            if rec.is_sink:
                found.append(rec)
            else:
                logger.info("Attractor guess %s converged to a %s", list(guess), rec.stability.value)

        unique: List[EquilibriumRecord] = []
        for rec in found:
            if all(np.linalg.norm(rec.x - u.x) > 1e-8 * (1.0 + np.linalg.norm(u.x)) for u in unique):
                unique.append(rec)
        unique.sort(key=lambda rec: tuple(rec.x))

        radius = settings.capture_radius
        for i in range(len(unique)):
            for j in range(i + 1, len(unique)):
                radius = min(radius, 0.5 * float(np.linalg.norm(unique[i].x - unique[j].x)))

        entries = []
        for i, rec in enumerate(unique):
            lead = rec.eigen.leading
            side_normal = None
            if rec.eigen.is_real(0):
                w = rec.eigen.left_vector(0)
                side_normal = w / np.linalg.norm(w)
            entries.append(
                CatalogueEntry(
                    label=f"A{i}",
                    record=rec,
                    radius=radius,
                    dwell=settings.dwell_factor / abs(lead.real),
                    side_normal=side_normal,
                )
            )
        return cls(lam, entries)


def _recurrence_hint(times: np.ndarray, states: np.ndarray) -> bool:
    if len(states) < 3:
        return False
    pairs = cKDTree(states).query_pairs(RECURRENCE_RADIUS, output_type="ndarray")
    if len(pairs) == 0:
        return False
    gaps = np.abs(times[pairs[:, 1]] - times[pairs[:, 0]])
    return bool(np.any((np.abs(pairs[:, 1] - pairs[:, 0]) > 1) & (gaps > RECURRENCE_GAP)))


def classify_with_path(
    frozen: FrozenSystem,
    lam: Sequence[float],
    x0: Sequence[float],
    catalogue: AttractorCatalogue,
    t_max: Optional[float] = None,
    settings: Optional[NumericSettings] = None,
) -> Tuple[Outcome, np.ndarray, np.ndarray]:
    """Omega-limit outcome of x0 under the frozen flow at ``lam`` plus the visited path."""
    settings = settings or get_settings()
    t_max = settings.t_max if t_max is None else t_max
    field = frozen.field_at(lam)
    x = np.asarray(x0, dtype=float).copy()
    t = 0.0
    times: List[np.ndarray] = [np.array([0.0])]
    states: List[np.ndarray] = [x.reshape(1, -1)]

    def result(outcome: Outcome) -> Tuple[Outcome, np.ndarray, np.ndarray]:
        return outcome, np.concatenate(times), np.vstack(states)

    def run(t_end: float, events: List[Event]):
        traj = integrate(
            field, x, t, t_end,
            rtol=settings.rtol, atol=settings.atol,
            events=events, blowup_norm=settings.blowup_norm,
        )
        times.append(traj.times[1:])
        states.append(traj.states[1:])
        return traj

    entry = catalogue.locate(x)
    while t < t_max:
        if entry is not None:
            side = entry.side(x)
            t_end = t + entry.dwell
            exit_event = Event(
                lambda _t, y, c=entry.center, r=entry.radius: np.linalg.norm(y - c) - r,
                direction=1,
                name="exit",
            )
            traj = run(t_end, [exit_event])
            if traj.reason is TerminationReason.TIME_LIMIT:
                return result(
                    Outcome(
                        OutcomeKind.ATTRACTOR,
                        entry.label,
                        side,
                        final_state=traj.final_state.copy(),
                        time=traj.final_time,
                    )
                )
            if traj.reason is TerminationReason.BLOWUP:
                return result(Outcome(OutcomeKind.DIVERGENT, final_state=traj.final_state.copy(), time=traj.final_time))
            logger.warning(
                "Trajectory left the capture ball of %s at t=%.6g during dwell",
                entry.label, traj.final_time, extra={"outcome": entry.label},
            )
            x, t = traj.final_state.copy(), traj.final_time
            entry = None
            continue

        events = [
            Event(lambda _t, y, c=e.center, r=e.radius: np.linalg.norm(y - c) - r, direction=-1, name=e.label)
            for e in catalogue
        ]
        traj = run(t_max, events)
        x, t = traj.final_state.copy(), traj.final_time
        if traj.reason is TerminationReason.EVENT:
            entry = catalogue.entries[traj.event_index]
            continue
        if traj.reason is TerminationReason.BLOWUP:
            return result(Outcome(OutcomeKind.DIVERGENT, final_state=x, time=t))
        break

    all_times = np.concatenate(times)
    all_states = np.vstack(states)
    hint = _recurrence_hint(all_times, all_states)
    return (
        Outcome(OutcomeKind.UNRESOLVED, recurrence_hint=hint, final_state=x, time=t),
        all_times,
        all_states,
    )


def classify_omega_limit(
    frozen: FrozenSystem,
    lam: Sequence[float],
    x0: Sequence[float],
    catalogue: AttractorCatalogue,
    t_max: Optional[float] = None,
    settings: Optional[NumericSettings] = None,
) -> Outcome:
    return classify_with_path(frozen, lam, x0, catalogue, t_max, settings)[0]

