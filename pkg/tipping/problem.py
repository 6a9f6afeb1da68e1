from __future__ import annotations

from dataclasses import dataclass, field, replace
import logging
from typing import List, Optional

import numpy as np

from common.errors import PreconditionError, TrackingError
from common.types import Outcome, OutcomeKind, OutcomeResolution, TerminationReason
from compact import CompactifiedSystem, choose_alpha
from config.settings import NumericSettings, get_settings
from equilibria import Branch, EquilibriumRecord
from manifolds import AttractorCatalogue, classify_with_path, compact_orbit, pullback_attractor
from numcore import Trajectory
from systems import ExternalInput, FrozenSystem

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class TrajectorySource:
    """Where a tracked solution starts: the pullback attractor of e-, or (x0, tau0)."""

    kind: str = "from_e_minus"
    x0: Optional[np.ndarray] = None
    tau0: Optional[float] = None

    @classmethod
    def from_e_minus(cls) -> "TrajectorySource":
        return cls()

    @classmethod
    def from_point(cls, x0, tau0: float) -> "TrajectorySource":
        return cls("from_point", np.asarray(x0, dtype=float), float(tau0))

    def describe(self) -> dict:
        if self.kind == "from_e_minus":
            return {"kind": self.kind}
        return {"kind": self.kind, "x0": [float(v) for v in self.x0], "tau0": float(self.tau0)}


@dataclass
class TippingProblem:
    """Everything an analysis needs about one scenario, read-only once built."""

    name: str
    frozen: FrozenSystem
    input: ExternalInput
    sink_branch: Branch
    catalogue: AttractorCatalogue
    settings: NumericSettings = field(default_factory=get_settings)
    edge_branch: Optional[Branch] = None
    edge_candidates: List[EquilibriumRecord] = field(default_factory=list)
    resolution: OutcomeResolution = OutcomeResolution.ATTRACTOR
    orientation: int = 1
    arclength: float = 5.0

    @property
    def e_minus(self) -> Optional[EquilibriumRecord]:
        return self.sink_branch.limit_minus

    @property
    def e_plus(self) -> Optional[EquilibriumRecord]:
        return self.sink_branch.limit_plus

    @property
    def eta_plus(self) -> Optional[EquilibriumRecord]:
        if self.edge_branch is not None and self.edge_branch.limit_plus is not None:
            return self.edge_branch.limit_plus
        return self.edge_candidates[0] if self.edge_candidates else None

    def leading_rate(self) -> complex:
        anchor = self.e_plus or self.e_minus
        if anchor is None:
            raise PreconditionError("no limit sink to scale the compactification with")
        return anchor.eigen.leading

    def alpha_for(self, r: float, external: Optional[ExternalInput] = None) -> float:
        external = external or self.input
        override = self.settings.alpha
        if override is not None and override < external.rho:
            return override
        return choose_alpha(external, r, self.leading_rate())

    def compactified(self, r: float, external: Optional[ExternalInput] = None) -> CompactifiedSystem:
        external = external or self.input
        return CompactifiedSystem(self.frozen, external, r, self.alpha_for(r, external))

    def with_input(self, external: ExternalInput) -> "TippingProblem":
        """Same system and limit data driven by another input with the same limits."""
        if not (
            np.allclose(external.lam_minus, self.input.lam_minus)
            and np.allclose(external.lam_plus, self.input.lam_plus)
        ):
            raise PreconditionError("replacement input must keep both limits")
        return replace(self, input=external)

    def solution(
        self,
        r: float,
        source: Optional[TrajectorySource] = None,
        external: Optional[ExternalInput] = None,
        s_stop: Optional[float] = None,
    ) -> tuple[CompactifiedSystem, Trajectory]:
        """Compactified solution at rate ``r`` up to s_stop (default: the handover section)."""
        source = source or TrajectorySource.from_e_minus()
        cs = self.compactified(r, external)
        s_stop = self.settings.s_hand if s_stop is None else s_stop
        if source.kind == "from_e_minus":
            if self.e_minus is None:
                raise TrackingError("the sink branch has no past limit e-")
            delta = self.settings.seed_delta_rel * (1.0 + float(np.linalg.norm(self.e_minus.x)))
            sample = pullback_attractor(cs, self.e_minus, min(delta, 1e-3), s_stop, self.settings)
            return cs, sample.trajectory
        if source.x0 is None or source.tau0 is None:
            raise PreconditionError("a from_point source needs x0 and tau0")
        if source.x0.size != self.frozen.n:
            raise PreconditionError(f"x0 has {source.x0.size} entries, the system has {self.frozen.n}")
        point = np.append(source.x0, cs.s_of(source.tau0))
        return cs, compact_orbit(cs, point, s_stop, self.settings)

    def handover(
        self, cs: CompactifiedSystem, traj: Trajectory
    ) -> tuple[Outcome, np.ndarray, np.ndarray]:
        """Outcome of a compactified solution once it reaches s_hand.

        The x-endpoint is handed to the future limit system and classified in frozen
        time t = tau / r. The returned path continues the solution in that time.
        """
        t_hand = traj.final_time / cs.r
        if traj.reason is TerminationReason.BLOWUP:
            return (
                Outcome(OutcomeKind.DIVERGENT, final_state=traj.final_state[: cs.n].copy(), time=t_hand),
                np.array([t_hand]),
                traj.final_state[: cs.n].reshape(1, -1).copy(),
            )
        if traj.reason is not TerminationReason.EVENT:
            logger.warning(
                "Solution stopped with %s before the handover section", traj.reason.value,
                extra={"scenario": self.name, "rate": cs.r},
            )
            return (
                Outcome(OutcomeKind.UNRESOLVED, final_state=traj.final_state[: cs.n].copy(), time=t_hand),
                np.array([t_hand]),
                traj.final_state[: cs.n].reshape(1, -1).copy(),
            )
        x_hand = traj.final_state[: cs.n].copy()
        outcome, times, states = classify_with_path(
            self.frozen, self.input.lam_plus, x_hand, self.catalogue, settings=self.settings
        )
        if outcome.kind is OutcomeKind.ATTRACTOR:
            # x_hand has settled onto the sink; the side is read where the solution arrived
            entry = self.catalogue.get(outcome.label)
            outcome.side = entry.approach_side(np.vstack([traj.states[:, : cs.n], states]))
        return outcome, times + t_hand, states
