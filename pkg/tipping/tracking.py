from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import List, Optional, Sequence

import numpy as np

from common.errors import NumericalError, PreconditionError
from common.types import Outcome, TerminationReason
from equilibria import Branch, equilibrium_near
from manifolds import polyline_hausdorff, threshold_at, threshold_section
from numcore import Trajectory
from systems import ExternalInput

from .problem import TippingProblem, TrajectorySource

logger = logging.getLogger(__name__)

ASSUMPTIONS = ("moving sink is C1 in tau; only sampled continuity and hyperbolicity are checked",)


@dataclass
class TrackingReport:
    r: float
    delta: float
    source: TrajectorySource
    interval: tuple[float, float]
    sup_deviation: float
    end_outcome: Outcome
    delta_close: bool
    end_point: bool
    taus: np.ndarray
    deviations: np.ndarray
    notes: List[str] = field(default_factory=list)
    trajectory: Optional[Trajectory] = field(default=None, repr=False)
    branch: Optional[Branch] = field(default=None, repr=False)

    def summary(self) -> dict:
        return {
            "r": self.r,
            "delta": self.delta,
            "source": self.source.describe(),
            "interval": list(self.interval),
            "sup_deviation": self.sup_deviation,
            "end_outcome": self.end_outcome.describe(),
            "delta_close": self.delta_close,
            "end_point": self.end_point,
            "notes": list(self.notes),
            "assumptions": list(ASSUMPTIONS),
        }


def _deviations(
    traj: Trajectory, branch: Branch, n: int, tau_start: float
) -> tuple[np.ndarray, np.ndarray]:
    taus, devs = [], []
    reached = traj.final_time
    diverged = traj.reason is TerminationReason.BLOWUP
    for tau, rec in zip(branch.params, branch.records):
        if not math.isfinite(tau) or tau < tau_start:
            continue
        if tau > reached:
            if diverged:
                taus.append(float(tau))
                devs.append(math.inf)
            continue
        taus.append(float(tau))
        devs.append(float(np.linalg.norm(traj(tau)[:n] - rec.x)))
    return np.array(taus), np.array(devs)


def check_tracking(
    problem: TippingProblem,
    r: float,
    delta: float,
    source: Optional[TrajectorySource] = None,
    branch: Optional[Branch] = None,
) -> TrackingReport:
    """Whether the solution at rate ``r`` delta-close and end-point tracks the moving sink."""
    if not delta > 0.0:
        raise PreconditionError("tracking tolerance delta must be positive")
    source = source or TrajectorySource.from_e_minus()
    branch = branch or problem.sink_branch
    cs, traj = problem.solution(r, source)
    tau_start = -math.inf if source.kind == "from_e_minus" else float(source.tau0)
    taus, devs = _deviations(traj, branch, cs.n, tau_start)
    lo, hi = branch.interval
    interval = (max(lo, tau_start), hi)
    sup_dev = float(np.max(devs)) if devs.size else math.nan
    notes: List[str] = []
    if not devs.size:
        notes.append("no branch sample falls inside the integrated range")

    outcome, _, _ = problem.handover(cs, traj)
    e_plus = problem.e_plus
    if e_plus is None:
        end_point = False
        notes.append("moving sink does not reach the future limit; end-point tracking undefined")
        logger.warning(
            "Sink branch ends with %s before the future limit", branch.end_hi.value,
            extra={"scenario": problem.name, "analysis": "tracking", "rate": r},
        )
    else:
        target = problem.catalogue.label_of(e_plus.x)
        end_point = target is not None and outcome.label == target
        if target is None:
            notes.append("future sink e+ is not in the attractor catalogue")

    report = TrackingReport(
        r=float(r),
        delta=float(delta),
        source=source,
        interval=interval,
        sup_deviation=sup_dev,
        end_outcome=outcome,
        delta_close=bool(devs.size) and sup_dev < delta,
        end_point=end_point,
        taus=taus,
        deviations=devs,
        notes=notes,
        trajectory=traj,
        branch=branch,
    )
    logger.info(
        "Tracking at r=%g: sup deviation %.6g, delta_close=%s end_point=%s",
        r, sup_dev, report.delta_close, report.end_point,
        extra={"scenario": problem.name, "analysis": "tracking", "rate": r, "outcome": outcome.describe()},
    )
    return report


def check_threshold_tracking(
    problem: TippingProblem,
    r: float,
    taus: Sequence[float],
    external: Optional[ExternalInput] = None,
) -> np.ndarray:
    """Hausdorff distance between the threshold sections at rate r and the frozen thresholds, as curves."""
    eta_plus = problem.eta_plus
    if eta_plus is None or problem.edge_branch is None:
        raise PreconditionError("threshold tracking needs the moving edge branch and its future limit")
    external = external or problem.input
    cs = problem.compactified(r, external)
    sections = threshold_section(
        cs, eta_plus, taus, problem.edge_branch, problem.arclength, settings=problem.settings
    )
    distances = []
    for tau, section in zip(taus, sections):
        lam = external.value(float(tau))
        try:
            edge = equilibrium_near(problem.frozen, problem.edge_branch, lam, problem.settings)
        except NumericalError as exc:
            raise PreconditionError(f"no edge state at tau={tau:g}: {exc}") from exc
        theta = threshold_at(problem.frozen, lam, edge, problem.arclength, problem.settings)
        distances.append(polyline_hausdorff(section.points, theta.points))
    return np.array(distances)
