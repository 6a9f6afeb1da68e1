from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from common.errors import ConstructionError, NumericalError, PreconditionError
from common.types import Outcome, OutcomeResolution, TerminationReason
from compact import g_alpha
from equilibria import equilibrium_near
from manifolds import signed_distance, threshold_section

from .critical import RateProbe, dwell_near
from .instability import InstabilityScan, delta_value
from .problem import TippingProblem, TrajectorySource
from .reparam import ReparametrizedInput, SigmaReparam
from .tracking import check_threshold_tracking

logger = logging.getLogger(__name__)

NEIGHBOURHOOD_POINTS = 9
PULLBACK_SAMPLES = 200
THRESHOLD_SAMPLES = 5
MAX_BISECTIONS = 100
EVIDENCE_STEP = 1e-3

Point = Tuple[float, float]


@dataclass
class ConstructionResult:
    input: ReparametrizedInput
    r_star: float
    tau_alpha: float
    tau_beta: float
    eps: float
    delta: float
    segment: Tuple[Point, Point]
    trace: List[Tuple[float, float, float, float]] = field(default_factory=list)
    bounds: Dict[str, float] = field(default_factory=dict)
    outcome_below: Optional[Outcome] = None
    outcome_above: Optional[Outcome] = None
    min_eta_distance: float = math.inf

    @property
    def outcomes_split(self) -> bool:
        if self.outcome_below is None or self.outcome_above is None:
            return False
        resolution = OutcomeResolution.ATTRACTOR_AND_SIDE
        return self.outcome_below.key(resolution) != self.outcome_above.key(resolution)

    def summary(self) -> dict:
        return {
            "r_star": self.r_star,
            "tau_alpha": self.tau_alpha,
            "tau_beta": self.tau_beta,
            "eps": self.eps,
            "delta": self.delta,
            "rho_tilde": self.input.rho,
            "segment": [list(self.segment[0]), list(self.segment[1])],
            "bounds": dict(self.bounds),
            "outcome_below": None if self.outcome_below is None else self.outcome_below.describe(),
            "outcome_above": None if self.outcome_above is None else self.outcome_above.describe(),
            "outcomes_split": self.outcomes_split,
            "min_eta_distance": self.min_eta_distance,
            "trace": [
                {"t": t, "tau_alpha": a, "tau_beta": b, "signed_distance": d} for t, a, b, d in self.trace
            ],
        }


def _neighbourhood(problem: TippingProblem, pair: Point) -> Tuple[np.ndarray, np.ndarray]:
    """Points of a 9x9 box around ``pair`` with tau1 < tau2 and their Delta values."""
    half = 1.0 / problem.input.rho
    a, b = pair
    points, values = [], []
    for t1 in np.linspace(a - half, a + half, NEIGHBOURHOOD_POINTS):
        for t2 in np.linspace(b - half, b + half, NEIGHBOURHOOD_POINTS):
            if t2 <= t1:
                continue
            v = delta_value(problem, t1, t2)
            if math.isfinite(v):
                points.append((float(t1), float(t2)))
                values.append(v)
    return np.array(points), np.array(values)


def _level_point(problem: TippingProblem, p_lo: np.ndarray, p_hi: np.ndarray, level: float) -> Point:
    def along(t: float) -> float:
        p = p_lo + t * (p_hi - p_lo)
        v = delta_value(problem, p[0], p[1])
        if not math.isfinite(v):
            raise ConstructionError(f"Delta undefined at ({p[0]:.6g}, {p[1]:.6g})", failed_bound="range")
        return v - level

    t = brentq(along, 0.0, 1.0, xtol=1e-12)
    p = p_lo + t * (p_hi - p_lo)
    return float(p[0]), float(p[1])


def _input_for(problem: TippingProblem, point: Point, eps: float) -> ReparametrizedInput:
    return ReparametrizedInput(problem.input, SigmaReparam(point[0], point[1], eps))


def _bounds(problem: TippingProblem, r_star: float, point: Point, eps: float) -> Dict[str, float]:
    """The three deviations the construction keeps below delta / 3."""
    external = _input_for(problem, point, eps)
    alpha = problem.alpha_for(r_star, external)
    cs, traj = problem.solution(r_star, external=external, s_stop=g_alpha(alpha, eps))
    n = cs.n
    if traj.reason is not TerminationReason.EVENT:
        return {"pullback": math.inf, "threshold": math.inf, "gap": math.inf}

    past = traj.times[traj.times <= 0.0]
    if past.size > PULLBACK_SAMPLES:
        past = past[np.linspace(0, past.size - 1, PULLBACK_SAMPLES).astype(int)]
    past = np.append(past, 0.0)
    pullback = 0.0
    for tau in past:
        try:
            sink = equilibrium_near(problem.frozen, problem.sink_branch, external.value(float(tau)), problem.settings)
        except NumericalError:
            pullback = math.inf
            break
        pullback = max(pullback, float(np.linalg.norm(traj(tau)[:n] - sink.x)))

    gap = float(np.linalg.norm(traj(0.0)[:n] - traj(eps)[:n]))
    taus = eps + np.linspace(0.0, 1.0 / eps, THRESHOLD_SAMPLES)
    try:
        threshold = float(np.max(check_threshold_tracking(problem, r_star, taus, external)))
    except NumericalError:
        threshold = math.inf
    return {"pullback": pullback, "threshold": threshold, "gap": gap}


def _signed_gap(problem: TippingProblem, r_star: float, point: Point, eps: float) -> float:
    """d_s between the solution from e- and the threshold section, both at tau = eps."""
    external = _input_for(problem, point, eps)
    alpha = problem.alpha_for(r_star, external)
    cs, traj = problem.solution(r_star, external=external, s_stop=g_alpha(alpha, eps))
    if traj.reason is not TerminationReason.EVENT:
        raise ConstructionError(
            f"solution stopped with {traj.reason.value} before tau=eps", failed_bound="connect"
        )
    section = threshold_section(
        cs, problem.eta_plus, [eps], problem.edge_branch, problem.arclength, settings=problem.settings
    )[0]
    if problem.orientation < 0:
        section = section.flipped()
    return signed_distance(traj.final_state[: cs.n], section)


def construct_tipping_input(
    problem: TippingProblem,
    r_star: float,
    scan: InstabilityScan,
    delta_target: Optional[float] = None,
) -> ConstructionResult:
    """An input Lambda o sigma on the same path whose solution from e- tips at r_star.

    Two (tau_alpha, tau_beta) pairs with Delta = -delta and +delta are joined by a
    segment; eps is shrunk until the solution and the threshold stay within
    delta / 3 of their frozen counterparts, then the segment is bisected on the
    sign of the distance from the solution to the threshold at tau = eps.
    """
    settings = problem.settings
    extra = {"scenario": problem.name, "analysis": "construct-input", "rate": r_star}
    if not r_star > 0.0:
        raise PreconditionError("r_star must be positive")
    if scan.kind != "forward" or not scan.unstable:
        raise PreconditionError("construction needs a forward threshold unstable scan")
    if problem.e_minus is None or problem.eta_plus is None or problem.edge_branch is None:
        raise PreconditionError("construction needs e-, the edge branch and eta+")

    pair = max(scan.pairs, key=lambda p: p[1])
    points, values = _neighbourhood(problem, pair)
    if values.size == 0 or values.max() <= 0.0 or values.min() >= 0.0:
        raise ConstructionError("Delta does not take both signs around the scan pair", failed_bound="range")
    delta_range = min(float(values.max()), -float(values.min()))
    delta = 0.5 * delta_range if delta_target is None else float(delta_target)
    if not 0.0 < delta < delta_range:
        raise ConstructionError(
            f"delta_target={delta:g} outside the Delta range (0, {delta_range:.6g}) around the scan pair",
            failed_bound="range",
        )
    p_min, p_max = points[int(np.argmin(values))], points[int(np.argmax(values))]
    minus = _level_point(problem, p_min, p_max, -delta)
    plus = _level_point(problem, p_min, p_max, delta)
    logger.info(
        "Segment from (%.6g, %.6g) to (%.6g, %.6g) with delta=%.6g", *minus, *plus, delta, extra=extra,
    )

    gap_min = min(minus[1] - minus[0], plus[1] - plus[0])
    if not gap_min > 0.0:
        raise ConstructionError("segment endpoints need tau_alpha < tau_beta", failed_bound="range")
    eps = min(0.5, 0.5 * math.sqrt(gap_min))
    bounds: Dict[str, float] = {}
    while True:
        bounds = {}
        for point in (minus, plus):
            for name, value in _bounds(problem, r_star, point, eps).items():
                bounds[name] = max(bounds.get(name, 0.0), value)
        failing = [name for name in ("pullback", "threshold", "gap") if not bounds[name] <= delta / 3.0]
        logger.info(
            "eps=%.6g bounds pullback=%.3g threshold=%.3g gap=%.3g (limit %.3g)",
            eps, bounds["pullback"], bounds["threshold"], bounds["gap"], delta / 3.0, extra=extra,
        )
        if not failing:
            break
        eps *= 0.5
        if eps < settings.eps_floor:
            name = failing[0]
            raise ConstructionError(
                f"eps reached the floor {settings.eps_floor:g} with the {name} bound at "
                f"{bounds[name]:.6g} > delta/3 = {delta / 3.0:.6g}",
                failed_bound=name,
            )

    p0, p1 = np.array(minus), np.array(plus)

    def at(t: float) -> Point:
        p = p0 + t * (p1 - p0)
        return float(p[0]), float(p[1])

    trace: List[Tuple[float, float, float, float]] = []
    lo, hi = 0.0, 1.0
    d_lo = _signed_gap(problem, r_star, at(lo), eps)
    d_hi = _signed_gap(problem, r_star, at(hi), eps)
    trace += [(lo, *at(lo), d_lo), (hi, *at(hi), d_hi)]
    if d_lo * d_hi > 0.0:
        raise ConstructionError(
            f"signed distance keeps its sign along the segment ({d_lo:.3g}, {d_hi:.3g})", failed_bound="connect"
        )
    best_t, best_d = (lo, d_lo) if abs(d_lo) < abs(d_hi) else (hi, d_hi)
    for _ in range(MAX_BISECTIONS):
        if abs(best_d) <= settings.connect_tol:
            break
        mid = 0.5 * (lo + hi)
        d_mid = _signed_gap(problem, r_star, at(mid), eps)
        trace.append((mid, *at(mid), d_mid))
        if abs(d_mid) < abs(best_d):
            best_t, best_d = mid, d_mid
        if d_mid * d_lo > 0.0:
            lo, d_lo = mid, d_mid
        else:
            hi, d_hi = mid, d_mid
    if abs(best_d) > settings.connect_tol:
        raise ConstructionError(
            f"bisection stalled at |d_s|={abs(best_d):.3g} > {settings.connect_tol:g}", failed_bound="connect"
        )

    tau_alpha, tau_beta = at(best_t)
    external = _input_for(problem, (tau_alpha, tau_beta), eps)
    result = ConstructionResult(
        input=external,
        r_star=float(r_star),
        tau_alpha=tau_alpha,
        tau_beta=tau_beta,
        eps=eps,
        delta=delta,
        segment=(minus, plus),
        trace=trace,
        bounds=bounds,
    )
    source = TrajectorySource.from_e_minus()
    below = RateProbe(problem, source, _input_for(problem, at(max(best_t - EVIDENCE_STEP, 0.0)), eps))
    above = RateProbe(problem, source, _input_for(problem, at(min(best_t + EVIDENCE_STEP, 1.0)), eps))
    result.outcome_below, result.outcome_above = below(r_star), above(r_star)
    times, states = RateProbe(problem, source, external).run(r_star).path(problem.frozen.n)
    result.min_eta_distance = dwell_near(times, states, problem.eta_plus.x, math.inf)[1]
    logger.info(
        "Constructed tau_alpha=%.10g tau_beta=%.10g eps=%.6g; min distance to eta+ %.3g",
        tau_alpha, tau_beta, eps, result.min_eta_distance, extra=extra,
    )
    return result
