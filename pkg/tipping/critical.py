from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
import time
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from common.errors import PreconditionError
from common.metrics import Metrics
from common.types import Outcome, OutcomeKind, OutcomeResolution, Verdict
from equilibria import EquilibriumRecord
from manifolds import ManifoldSample
from numcore import Trajectory
from systems import ExternalInput

from .problem import TippingProblem, TrajectorySource

logger = logging.getLogger(__name__)

DENSE_SAMPLES = 2000
GEOMETRIC_RATIO = 2.0


@dataclass
class ProbeResult:
    r: float
    outcome: Outcome
    trajectory: Trajectory = field(repr=False)
    future_times: np.ndarray = field(repr=False)
    future_states: np.ndarray = field(repr=False)

    def path(self, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """The whole solution in frozen time t = tau / r, followed by its future-limit continuation."""
        traj = self.trajectory
        t0, t1 = float(traj.times[0]), float(traj.times[-1])
        taus = np.union1d(traj.times, np.linspace(t0, t1, DENSE_SAMPLES))
        states = np.array([traj(t)[:n] for t in taus])
        return (
            np.concatenate([taus / self.r, self.future_times[1:]]),
            np.vstack([states, self.future_states[1:]]),
        )


class RateProbe:
    """Outcome of the solution from the chosen source as a function of the rate, cached per r."""

    def __init__(
        self,
        problem: TippingProblem,
        source: Optional[TrajectorySource] = None,
        external: Optional[ExternalInput] = None,
        metrics: Optional[Metrics] = None,
    ) -> None:
        self.problem = problem
        self.source = source or TrajectorySource.from_e_minus()
        self.external = external
        self.metrics = metrics or Metrics()
        self.logger = logging.getLogger(__name__)
        self._cache: Dict[float, ProbeResult] = {}

    def run(self, r: float) -> ProbeResult:
        r = float(r)
        cached = self._cache.get(r)
        if cached is not None:
            return cached
        start = time.perf_counter()
        cs, traj = self.problem.solution(r, self.source, self.external)
        outcome, times, states = self.problem.handover(cs, traj)
        elapsed = (time.perf_counter() - start) * 1000.0
        self.metrics.inc("integrations")
        self.metrics.observe("probe_ms", elapsed)
        self.logger.debug(
            "Probe r=%.10g -> %s", r, outcome.describe(),
            extra={"rate": r, "outcome": outcome.describe(), "duration_ms": round(elapsed, 3)},
        )
        result = ProbeResult(r, outcome, traj, times, states)
        self._cache[r] = result
        return result

    def __call__(self, r: float) -> Outcome:
        return self.run(r).outcome


@dataclass
class CriticalRate:
    r_c: float
    lo: float
    hi: float
    outcome_lo: Outcome
    outcome_hi: Outcome
    outcome_below: Optional[Outcome] = None
    outcome_above: Optional[Outcome] = None
    eta_plus: Optional[EquilibriumRecord] = None
    eta_dwell: float = 0.0
    min_eta_distance: float = math.inf
    verdict: Optional[Verdict] = None
    reason: str = ""
    upper_tail: Optional[ManifoldSample] = field(default=None, repr=False)
    lower_tail: Optional[ManifoldSample] = field(default=None, repr=False)
    correspondence: Optional[bool] = None

    @property
    def bracket_width(self) -> float:
        return self.hi - self.lo

    def summary(self) -> dict:
        def desc(outcome: Optional[Outcome]) -> Optional[str]:
            return None if outcome is None else outcome.describe()

        return {
            "r_c": self.r_c,
            "bracket": [self.lo, self.hi],
            "bracket_width": self.bracket_width,
            "outcome_lo": desc(self.outcome_lo),
            "outcome_hi": desc(self.outcome_hi),
            "outcome_below": desc(self.outcome_below),
            "outcome_above": desc(self.outcome_above),
            "eta_plus": None if self.eta_plus is None else [float(v) for v in self.eta_plus.x],
            "eta_dwell": self.eta_dwell,
            "min_eta_distance": self.min_eta_distance,
            "verdict": None if self.verdict is None else self.verdict.value,
            "reason": self.reason,
            "upper_tail": None if self.upper_tail is None else desc(self.upper_tail.outcome),
            "lower_tail": None if self.lower_tail is None else desc(self.lower_tail.outcome),
            "correspondence": self.correspondence,
        }


@dataclass
class TippingReport:
    scenario: str
    r_lo: float
    r_hi: float
    tol_r: float
    source: TrajectorySource
    critical: List[CriticalRate] = field(default_factory=list)
    coarse: List[Tuple[float, str]] = field(default_factory=list)

    @property
    def verdict(self) -> Optional[Verdict]:
        if not self.critical:
            return Verdict.NO_TIPPING_FOUND
        return self.critical[0].verdict

    @property
    def r_c(self) -> List[float]:
        return [c.r_c for c in self.critical]

    def summary(self) -> dict:
        return {
            "scenario": self.scenario,
            "r_range": [self.r_lo, self.r_hi],
            "tol_r": self.tol_r,
            "source": self.source.describe(),
            "verdict": None if self.verdict is None else self.verdict.value,
            "r_c": self.r_c,
            "critical_rates": [c.summary() for c in self.critical],
            "coarse_scan": [{"r": r, "outcome": o} for r, o in self.coarse],
        }


def _midpoint(lo: float, hi: float) -> float:
    if hi / lo > GEOMETRIC_RATIO:
        return math.sqrt(lo * hi)
    return 0.5 * (lo + hi)


def bisect_rate(
    outcome_of: Callable[[float], Outcome],
    lo: float,
    hi: float,
    tol_r: float,
    resolution: OutcomeResolution = OutcomeResolution.ATTRACTOR,
) -> Tuple[float, float, Outcome, Outcome]:
    """Shrink [lo, hi] to width tol_r keeping different outcomes at the two ends."""
    out_lo, out_hi = outcome_of(lo), outcome_of(hi)
    if out_lo.key(resolution) == out_hi.key(resolution):
        raise PreconditionError(f"bracket [{lo:g}, {hi:g}] carries the same outcome at both ends")
    while hi - lo > tol_r:
        mid = _midpoint(lo, hi)
        if not lo < mid < hi:
            break
        out_mid = outcome_of(mid)
        if out_mid.key(resolution) != out_lo.key(resolution):
            hi, out_hi = mid, out_mid
        else:
            lo, out_lo = mid, out_mid
    return lo, hi, out_lo, out_hi


def locate_transitions(
    outcome_of: Callable[[float], Outcome],
    r_lo: float,
    r_hi: float,
    tol_r: float,
    coarse_points: int,
    resolution: OutcomeResolution = OutcomeResolution.ATTRACTOR,
    hints: Sequence[float] = (),
) -> Tuple[List[Tuple[float, float, Outcome, Outcome]], List[Tuple[float, Outcome]]]:
    """Bisected brackets for every outcome change on a geometric coarse grid.

    ``hints`` are extra rates merged into the grid, e.g. both sides of a known
    transition; the geometric grid itself is always scanned in full.
    """
    if not 0.0 < r_lo < r_hi:
        raise PreconditionError(f"rate range needs 0 < r_lo < r_hi, got [{r_lo!r}, {r_hi!r}]")
    if not tol_r > 0.0:
        raise PreconditionError("tol_r must be positive")
    rs = np.geomspace(r_lo, r_hi, max(coarse_points, 2))
    extra = [float(h) for h in hints if r_lo < h < r_hi]
    if extra:
        rs = np.union1d(rs, extra)
    coarse = [(float(r), outcome_of(float(r))) for r in rs]
    brackets = []
    for (a, out_a), (b, out_b) in zip(coarse, coarse[1:]):
        if out_a.key(resolution) != out_b.key(resolution):
            brackets.append(bisect_rate(outcome_of, a, b, tol_r, resolution))
    return brackets, coarse


def dwell_near(times: np.ndarray, states: np.ndarray, center: np.ndarray, radius: float) -> Tuple[float, float]:
    """Time spent within ``radius`` of ``center`` and the minimum distance along the path."""
    dist = np.linalg.norm(states - center, axis=1)
    inside = dist < radius
    both = inside[:-1] & inside[1:]
    dwell = float(np.sum(np.diff(times)[both])) if len(times) > 1 else 0.0
    return dwell, float(dist.min()) if dist.size else math.inf


def identify_eta_plus(
    problem: TippingProblem, probe: RateProbe, r: float
) -> Tuple[Optional[EquilibriumRecord], float, float]:
    """Future edge state the near-critical solution shadows longest, with dwell and minimum distance."""
    candidates: List[EquilibriumRecord] = []
    if problem.edge_branch is not None and problem.edge_branch.limit_plus is not None:
        candidates.append(problem.edge_branch.limit_plus)
    candidates.extend(problem.edge_candidates)
    times, states = probe.run(r).path(problem.frozen.n)
    best: Tuple[Optional[EquilibriumRecord], float, float] = (None, 0.0, math.inf)
    for candidate in candidates:
        dwell, closest = dwell_near(times, states, candidate.x, problem.settings.eta_capture)
        if dwell > best[1]:
            best = (candidate, dwell, closest)
    return best


def find_critical_rate(
    problem: TippingProblem,
    r_lo: float,
    r_hi: float,
    source: Optional[TrajectorySource] = None,
    tol_r: Optional[float] = None,
    probe: Optional[RateProbe] = None,
    metrics: Optional[Metrics] = None,
    hints: Sequence[float] = (),
) -> TippingReport:
    """Critical rates in [r_lo, r_hi] where the outcome of the solution changes."""
    settings = problem.settings
    tol_r = settings.tol_r if tol_r is None else tol_r
    probe = probe or RateProbe(problem, source, metrics=metrics)
    resolution = problem.resolution
    brackets, coarse = locate_transitions(
        probe, r_lo, r_hi, tol_r, settings.coarse_points, resolution, hints
    )
    report = TippingReport(
        scenario=problem.name,
        r_lo=float(r_lo),
        r_hi=float(r_hi),
        tol_r=float(tol_r),
        source=probe.source,
        coarse=[(r, o.describe()) for r, o in coarse],
    )
    for lo, hi, out_lo, out_hi in brackets:
        r_c = 0.5 * (lo + hi)
        critical = CriticalRate(r_c=r_c, lo=lo, hi=hi, outcome_lo=out_lo, outcome_hi=out_hi)
        critical.outcome_below = probe(max(r_c - tol_r, 0.5 * lo))
        critical.outcome_above = probe(r_c + tol_r)
        if (
            critical.outcome_below.kind is OutcomeKind.UNRESOLVED
            and critical.outcome_above.kind is OutcomeKind.UNRESOLVED
        ):
            critical.verdict = Verdict.DEGENERATE
            critical.reason = "unresolved"
        eta, dwell, closest = identify_eta_plus(problem, probe, r_c)
        critical.eta_plus, critical.eta_dwell = eta, dwell
        if eta is not None:
            for r in (r_c - tol_r, r_c + tol_r):
                if r > 0.0:
                    times, states = probe.run(r).path(problem.frozen.n)
                    closest = min(closest, dwell_near(times, states, eta.x, math.inf)[1])
            critical.min_eta_distance = closest
        report.critical.append(critical)
        logger.info(
            "Critical rate r_c=%.10g in [%.10g, %.10g]: %s below, %s above",
            r_c, lo, hi, critical.outcome_below.describe(), critical.outcome_above.describe(),
            extra={"scenario": problem.name, "analysis": "find-rc", "rate": r_c},
        )
    if not report.critical:
        logger.info(
            "No outcome change for r in [%g, %g]", r_lo, r_hi,
            extra={"scenario": problem.name, "analysis": "find-rc"},
        )
    probe.metrics.set("critical_rates", float(len(report.critical)))
    return report

