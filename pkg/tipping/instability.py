from __future__ import annotations

from dataclasses import dataclass, field
import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from common.errors import ExprError, NumericalError, PreconditionError
from common.types import TerminationReason
from equilibria import Branch, EquilibriumRecord, continue_branch, equilibrium_near, find_equilibrium
from manifolds import ManifoldSample, signed_distance, threshold_at
from numcore import Event, integrate
from systems import FrozenSystem, ParameterPath, PathOfInput

from .problem import TippingProblem

logger = logging.getLogger(__name__)

SETTLE_SPEED = 1e-9
SIDE_OFFSET = 1e-4
DISTINCT_REL = 1e-6


@dataclass
class InstabilityScan:
    """Signed distances Delta[i, j] = d_s(sink at grid[i], threshold at grid[j])."""

    kind: str
    grid: np.ndarray
    lams: np.ndarray
    values: np.ndarray
    pairs: List[Tuple[float, float]]
    orientation: int = 1
    basin_unstable: Optional[bool] = None
    notes: List[str] = field(default_factory=list)

    @property
    def unstable(self) -> bool:
        return bool(self.pairs)

    @property
    def verdict_name(self) -> str:
        return "forward_threshold_unstable" if self.kind == "forward" else "threshold_unstable"

    def summary(self) -> dict:
        return {
            "kind": self.kind,
            self.verdict_name: self.unstable,
            "pairs": [list(p) for p in self.pairs],
            "orientation": self.orientation,
            "basin_unstable": self.basin_unstable,
            "grid_size": int(self.grid.size),
            "notes": list(self.notes),
        }


def sign_change_pairs(grid: np.ndarray, values: np.ndarray) -> List[Tuple[float, float]]:
    """Points (a, b) where Delta vanishes between finite opposite-signed grid neighbours.

    The crossing coordinate is placed by linear interpolation along the axis on
    which the two neighbours differ.
    """
    pairs: List[Tuple[float, float]] = []
    m = grid.size
    for i in range(m):
        for j in range(m):
            v = values[i, j]
            if not math.isfinite(v):
                continue
            if v == 0.0:
                pairs.append((float(grid[i]), float(grid[j])))
                continue
            if i + 1 < m:
                w = values[i + 1, j]
                if math.isfinite(w) and v * w < 0.0:
                    a = grid[i] + (grid[i + 1] - grid[i]) * v / (v - w)
                    pairs.append((float(a), float(grid[j])))
            if j + 1 < m:
                w = values[i, j + 1]
                if math.isfinite(w) and v * w < 0.0:
                    b = grid[j] + (grid[j + 1] - grid[j]) * v / (v - w)
                    pairs.append((float(grid[i]), float(b)))
    return pairs


def _records_along(
    frozen: FrozenSystem,
    seed: EquilibriumRecord,
    path: ParameterPath,
    grid: np.ndarray,
    problem: TippingProblem,
) -> List[Optional[EquilibriumRecord]]:
    branch = continue_branch(
        frozen, seed, path.point, float(grid[0]), float(grid[-1]),
        sample_at=grid, settings=problem.settings,
    )
    by_param = {float(p): rec for p, rec in zip(branch.params, branch.records)}
    return [by_param.get(float(u)) for u in grid]


def _records_near(
    problem: TippingProblem, branch: Branch, lams: Sequence[np.ndarray]
) -> List[Optional[EquilibriumRecord]]:
    out: List[Optional[EquilibriumRecord]] = []
    for lam in lams:
        try:
            rec = equilibrium_near(problem.frozen, branch, lam, problem.settings)
        except (NumericalError, ExprError):
            out.append(None)
            continue
        out.append(rec if rec.stability is branch.stability else None)
    return out


def _thresholds(
    problem: TippingProblem, lams: Sequence[np.ndarray], edges: Sequence[Optional[EquilibriumRecord]]
) -> List[Optional[ManifoldSample]]:
    out: List[Optional[ManifoldSample]] = []
    for lam, edge in zip(lams, edges):
        if edge is None:
            out.append(None)
            continue
        theta = threshold_at(problem.frozen, lam, edge, problem.arclength, problem.settings)
        out.append(theta if problem.orientation > 0 else theta.flipped())
    return out


def _delta_grid(
    sinks: Sequence[Optional[EquilibriumRecord]],
    thresholds: Sequence[Optional[ManifoldSample]],
    upper_only: bool,
) -> np.ndarray:
    m = len(sinks)
    values = np.full((m, m), math.nan)
    for i, sink in enumerate(sinks):
        if sink is None:
            continue
        for j, theta in enumerate(thresholds):
            if theta is None or (upper_only and j <= i):
                continue
            values[i, j] = signed_distance(sink.x, theta)
    return values


def delta_value(problem: TippingProblem, tau1: float, tau2: float) -> float:
    """Delta_Lambda(tau1, tau2) = d_s(e(Lambda(tau1)), theta(Lambda(tau2))); NaN where undefined."""
    if problem.edge_branch is None:
        raise PreconditionError("Delta needs an edge branch")
    lam1, lam2 = problem.input.value(float(tau1)), problem.input.value(float(tau2))
    sink = _records_near(problem, problem.sink_branch, [lam1])[0]
    edge = _records_near(problem, problem.edge_branch, [lam2])[0]
    theta = _thresholds(problem, [lam2], [edge])[0]
    if sink is None or theta is None:
        return math.nan
    return signed_distance(sink.x, theta)


def _settle(frozen: FrozenSystem, lam: np.ndarray, x0: np.ndarray, problem: TippingProblem) -> Optional[np.ndarray]:
    settings = problem.settings
    field_fn = frozen.field_at(lam)
    slow = Event(lambda t, y: np.linalg.norm(field_fn(t, y)) - SETTLE_SPEED, direction=-1, name="settled")
    traj = integrate(
        field_fn, x0, 0.0, settings.t_max,
        rtol=settings.rtol, atol=settings.atol, events=[slow], blowup_norm=settings.blowup_norm,
    )
    if traj.reason is TerminationReason.BLOWUP:
        return None
    try:
        rec = find_equilibrium(frozen, lam, traj.final_state, settings)
    except (NumericalError, ExprError):
        return None
    return rec.x if rec.is_sink else None


def basin_unstable_at(
    problem: TippingProblem, lam_b: np.ndarray, edge: EquilibriumRecord
) -> bool:
    """Whether the two sides of the threshold at lam_b settle to different sinks."""
    index = int(np.argmax(edge.eigen.values.real))
    v_u = edge.eigen.vector(index)
    offset = SIDE_OFFSET * (1.0 + float(np.linalg.norm(edge.x)))
    ends = [_settle(problem.frozen, lam_b, edge.x + sign * offset * v_u, problem) for sign in (1.0, -1.0)]
    if ends[0] is None or ends[1] is None:
        return False
    return bool(np.linalg.norm(ends[0] - ends[1]) > DISTINCT_REL * (1.0 + np.linalg.norm(ends[0])))


def _basin_check(problem: TippingProblem, scan: InstabilityScan, edges, lams) -> None:
    if not scan.pairs:
        scan.basin_unstable = False
        return
    _, b = scan.pairs[0]
    j = int(np.argmin(np.abs(scan.grid - b)))
    edge = edges[j]
    if edge is None:
        scan.notes.append("no edge state next to the first pair; basin check skipped")
        return
    scan.basin_unstable = basin_unstable_at(problem, lams[j], edge)


def scan_threshold_instability(
    problem: TippingProblem,
    path: Optional[ParameterPath] = None,
    m: Optional[int] = None,
) -> InstabilityScan:
    """Delta over P x P for the sink and edge branches continued along ``path``."""
    if problem.edge_branch is None:
        raise PreconditionError("threshold scans need an edge branch")
    path = path or PathOfInput(problem.input)
    m = m or problem.settings.scan_points
    grid = np.linspace(0.0, 1.0, m)
    lam0 = path.point(0.0)
    sink_seed = equilibrium_near(problem.frozen, problem.sink_branch, lam0, problem.settings)
    edge_seed = equilibrium_near(problem.frozen, problem.edge_branch, lam0, problem.settings)
    sinks = _records_along(problem.frozen, sink_seed, path, grid, problem)
    edges = _records_along(problem.frozen, edge_seed, path, grid, problem)
    lams = [path.point(float(u)) for u in grid]
    thresholds = _thresholds(problem, lams, edges)
    values = _delta_grid(sinks, thresholds, upper_only=False)
    scan = InstabilityScan(
        kind="path",
        grid=grid,
        lams=np.array(lams),
        values=values,
        pairs=sign_change_pairs(grid, values),
        orientation=problem.orientation,
    )
    if any(s is None for s in sinks) or any(e is None for e in edges):
        scan.notes.append("a branch ended before the path end; missing entries are NaN")
    _basin_check(problem, scan, edges, lams)
    logger.info(
        "Path scan on %dx%d grid: threshold_unstable=%s (%d pairs)", m, m, scan.unstable, len(scan.pairs),
        extra={"scenario": problem.name, "analysis": "scan"},
    )
    return scan


def scan_forward_threshold_instability(
    problem: TippingProblem,
    taus: Optional[Sequence[float]] = None,
    m: Optional[int] = None,
    tau_span: Optional[float] = None,
) -> InstabilityScan:
    """Delta_Lambda(tau1, tau2) on the triangle tau1 < tau2."""
    if problem.edge_branch is None:
        raise PreconditionError("threshold scans need an edge branch")
    if taus is None:
        m = m or problem.settings.scan_points
        span = tau_span if tau_span is not None else 10.0 / problem.input.rho
        taus = np.linspace(-span, span, m)
    grid = np.asarray(taus, dtype=float)
    if grid.size < 2 or np.any(np.diff(grid) <= 0.0):
        raise PreconditionError("the tau grid must be strictly increasing with at least two points")
    lams = [problem.input.value(float(t)) for t in grid]
    sinks = _records_near(problem, problem.sink_branch, lams)
    edges = _records_near(problem, problem.edge_branch, lams)
    thresholds = _thresholds(problem, lams, edges)
    values = _delta_grid(sinks, thresholds, upper_only=True)
    scan = InstabilityScan(
        kind="forward",
        grid=grid,
        lams=np.array(lams),
        values=values,
        pairs=sign_change_pairs(grid, values),
        orientation=problem.orientation,
    )
    _basin_check(problem, scan, edges, lams)
    logger.info(
        "Forward scan on %d tau values: forward_threshold_unstable=%s (%d pairs)",
        grid.size, scan.unstable, len(scan.pairs),
        extra={"scenario": problem.name, "analysis": "scan"},
    )
    return scan


def scan_frame(scan: InstabilityScan) -> pd.DataFrame:
    """Long table of the finite grid: one row per (i, j) with both coordinates and Delta."""
    first, second = ("tau1", "tau2") if scan.kind == "forward" else ("u1", "u2")
    rows = []
    m = scan.grid.size
    for i in range(m):
        for j in range(m):
            v = scan.values[i, j]
            if math.isfinite(v):
                rows.append({first: float(scan.grid[i]), second: float(scan.grid[j]), "delta": float(v)})
    return pd.DataFrame(rows, columns=[first, second, "delta"])
