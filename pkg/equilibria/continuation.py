from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from common.errors import ExprError, NonHyperbolicError, NumericalError
from common.types import BranchEnd, LimitSide, Stability
from config.settings import NumericSettings, get_settings
from systems import ExternalInput, FrozenSystem, input_names, state_names

from .solver import EquilibriumRecord, find_equilibrium

logger = logging.getLogger(__name__)

PathFn = Callable[[float], np.ndarray]

FOLD_EIG_REL = 1e-2
GROWTH = 1.5


@dataclass(slots=True)
class Branch:
    """Equilibria ordered by increasing path parameter (u, or tau for moving branches)."""

    records: List[EquilibriumRecord]
    params: np.ndarray
    end_lo: BranchEnd
    end_hi: BranchEnd
    parameter: str = "u"
    limit_minus: Optional[EquilibriumRecord] = None
    limit_plus: Optional[EquilibriumRecord] = None

    def __len__(self) -> int:
        return len(self.records)

    @property
    def interval(self) -> Tuple[float, float]:
        return float(self.params[0]), float(self.params[-1])

    @property
    def stability(self) -> Stability:
        return self.records[0].stability

    def xs(self) -> np.ndarray:
        return np.array([rec.x for rec in self.records])

    def lams(self) -> np.ndarray:
        return np.array([rec.lam for rec in self.records])

    def nearest(self, lam: Sequence[float]) -> EquilibriumRecord:
        lam = np.asarray(lam, dtype=float)
        distances = np.linalg.norm(self.lams() - lam, axis=1)
        return self.records[int(np.argmin(distances))]


def _corrector(
    frozen: FrozenSystem,
    current: EquilibriumRecord,
    lam_new: np.ndarray,
    settings: NumericSettings,
) -> Tuple[Optional[EquilibriumRecord], str]:
    Jx, Jl = frozen.jacobians(current.x, current.lam)
    try:
        x_pred = current.x - np.linalg.solve(Jx, Jl @ (lam_new - current.lam))
    except np.linalg.LinAlgError:
        x_pred = current.x.copy()
    try:
        candidate = find_equilibrium(frozen, lam_new, x_pred, settings)
    except (NumericalError, ExprError):
        return None, "newton"
    if not candidate.same_class(current):
        return None, "class"
    drift = np.linalg.norm(candidate.x - x_pred)
    if drift > max(np.linalg.norm(x_pred - current.x), 1e-6 * (1.0 + np.linalg.norm(current.x))):
        return None, "jump"
    return candidate, ""


def _ending(last: EquilibriumRecord, seed: EquilibriumRecord, failure: str) -> BranchEnd:
    if last.eigen.min_abs() < FOLD_EIG_REL * max(1.0, seed.eigen.min_abs()):
        return BranchEnd.FOLD
    if failure == "class":
        return BranchEnd.CLASS_CHANGE
    return BranchEnd.NEWTON_FAILURE


def _walk(
    frozen: FrozenSystem,
    seed: EquilibriumRecord,
    u_start: float,
    path_fn: PathFn,
    targets: Sequence[float],
    settings: NumericSettings,
) -> Tuple[List[EquilibriumRecord], List[float], BranchEnd]:
    records: List[EquilibriumRecord] = []
    params: List[float] = []
    current, u = seed, float(u_start)
    h: Optional[float] = None
    for target in targets:
        while u != target:
            remaining = target - u
            if h is None or h >= abs(remaining):
                u_new, step = target, abs(remaining)
            else:
                u_new, step = u + math.copysign(h, remaining), h
            candidate, failure = _corrector(frozen, current, path_fn(u_new), settings)
            if candidate is not None:
                current, u = candidate, u_new
                h = GROWTH * step
                continue
            h = 0.5 * step
            if h < settings.fold_tol:
                end = _ending(current, seed, failure)
                if not params or params[-1] != u:
                    records.append(current)
                    params.append(u)
                logger.info(
                    "Branch ends with %s at parameter %.10g", end.value, u,
                    extra={"analysis": "continuation"},
                )
                return records, params, end
        records.append(current)
        params.append(u)
    return records, params, BranchEnd.PATH_END


def _targets(u_start: float, u_end: float, sample_at: Optional[Sequence[float]], m: int) -> List[float]:
    if sample_at is None:
        points = np.linspace(u_start, u_end, m)[1:]
    else:
        points = np.asarray(sample_at, dtype=float)
    lo, hi = min(u_start, u_end), max(u_start, u_end)
    inside = [float(p) for p in points if lo <= p <= hi and p != u_start]
    inside = sorted(set(inside), reverse=u_end < u_start)
    if not inside or inside[-1] != u_end:
        inside.append(float(u_end))
    return inside


def continue_branch(
    frozen: FrozenSystem,
    seed: EquilibriumRecord,
    path_fn: PathFn,
    u_start: float,
    u_end: float,
    sample_at: Optional[Sequence[float]] = None,
    settings: Optional[NumericSettings] = None,
) -> Branch:
    """Natural-parameter continuation of ``seed`` along lam = path_fn(u) from u_start to u_end.

    Records are placed on the sample points; the step adapts between them and a
    failed step is halved until it drops below fold_tol, which pins the end of
    the branch.
    """
    settings = settings or get_settings()
    seed = find_equilibrium(frozen, path_fn(u_start), seed.x, settings)
    if not seed.hyperbolic:
        raise NonHyperbolicError(f"continuation seed is not hyperbolic: {seed.describe()}")
    if u_end == u_start:
        return Branch([seed], np.array([float(u_start)]), BranchEnd.PATH_END, BranchEnd.PATH_END)

    targets = _targets(u_start, u_end, sample_at, settings.branch_samples)
    records, params, end = _walk(frozen, seed, u_start, path_fn, targets, settings)
    records.insert(0, seed)
    params.insert(0, float(u_start))
    if u_end > u_start:
        return Branch(records, np.array(params), BranchEnd.PATH_END, end)
    return Branch(records[::-1], np.array(params[::-1]), end, BranchEnd.PATH_END)


def moving_equilibrium(
    frozen: FrozenSystem,
    external: ExternalInput,
    seed: EquilibriumRecord,
    at: Union[LimitSide, float] = LimitSide.PAST,
    settings: Optional[NumericSettings] = None,
) -> Branch:
    """Equilibrium branch e(Lambda(tau)) followed in both directions from the seed.

    The branch is computed on a uniform grid in s = tanh(alpha tau / 2) with
    alpha = rho / 2, which clusters tau toward both infinities; it does not depend
    on the rate. Reaching s = -1 or s = +1 attaches the limit-system equilibria.
    """
    from compact.transform import g_alpha, glued_input, h_alpha

    settings = settings or get_settings()
    alpha = 0.5 * external.rho
    if at is LimitSide.PAST:
        s_seed = -1.0
    elif at is LimitSide.FUTURE:
        s_seed = 1.0
    else:
        s_seed = g_alpha(alpha, float(at))

    def path_fn(s: float) -> np.ndarray:
        return glued_input(external, alpha, s)

    seed = find_equilibrium(frozen, path_fn(s_seed), seed.x, settings)
    if not seed.hyperbolic:
        raise NonHyperbolicError(f"moving equilibrium seed is not hyperbolic: {seed.describe()}")
    grid = np.linspace(-1.0, 1.0, settings.branch_samples)

    forward: Tuple[List[EquilibriumRecord], List[float], BranchEnd] = ([], [], BranchEnd.PATH_END)
    backward: Tuple[List[EquilibriumRecord], List[float], BranchEnd] = ([], [], BranchEnd.PATH_END)
    if s_seed < 1.0:
        forward = _walk(frozen, seed, s_seed, path_fn, _targets(s_seed, 1.0, grid, 0), settings)
    if s_seed > -1.0:
        backward = _walk(frozen, seed, s_seed, path_fn, _targets(s_seed, -1.0, grid, 0), settings)

    records = backward[0][::-1] + [seed] + forward[0]
    s_values = backward[1][::-1] + [s_seed] + forward[1]
    taus = np.array([h_alpha(alpha, s) for s in s_values])
    branch = Branch(
        records=records,
        params=taus,
        end_lo=backward[2],
        end_hi=forward[2],
        parameter="tau",
    )
    if s_values[0] == -1.0:
        branch.limit_minus = records[0]
    if s_values[-1] == 1.0:
        branch.limit_plus = records[-1]
    logger.info(
        "Moving %s branch on I=(%.6g, %.6g), %d records",
        seed.stability.value.lower(), branch.interval[0], branch.interval[1], len(records),
        extra={"analysis": "continuation"},
    )
    return branch


def equilibrium_near(
    frozen: FrozenSystem,
    branch: Branch,
    lam: Sequence[float],
    settings: Optional[NumericSettings] = None,
) -> EquilibriumRecord:
    """Equilibrium at ``lam`` obtained by Newton from the branch record nearest in input space."""
    return find_equilibrium(frozen, lam, branch.nearest(lam).x, settings)


def branch_frame(branch: Branch) -> pd.DataFrame:
    if not branch.records:
        return pd.DataFrame()
    n = branch.records[0].x.size
    d = branch.records[0].lam.size
    rows = []
    for param, rec in zip(branch.params, branch.records):
        row = {"u_or_tau": float(param)}
        row.update(dict(zip(input_names(d), rec.lam)))
        row.update(dict(zip(state_names(n), rec.x)))
        row.update({f"re_eig{i + 1}": v for i, v in enumerate(rec.eigen.values.real)})
        row["class"] = rec.stability.value
        rows.append(row)
    return pd.DataFrame(rows)
