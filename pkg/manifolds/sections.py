from __future__ import annotations

import logging
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from common.errors import NumericalError, PreconditionError
from common.types import LimitSide, ManifoldKind
from compact import CompactifiedSystem, lift_equilibrium
from config.settings import NumericSettings, get_settings
from equilibria import Branch, EquilibriumRecord, equilibrium_near
from numcore import integrate_backward

from .sample import ManifoldSample
from .thresholds import _normals, _unstable_pair, frozen_threshold, threshold_at
from .unstable import check_seed_delta

logger = logging.getLogger(__name__)

BACKWARD_MARGIN = 1.0
SECTION_POINTS = 41
SPACING_GROWTH = 4.0
MIN_STEP_REL = 1e-12


def threshold_section(
    cs: CompactifiedSystem,
    eta_plus: EquilibriumRecord,
    taus: Sequence[float],
    edge_branch: Optional[Branch] = None,
    arclength: float = 1.0,
    delta: Optional[float] = None,
    settings: Optional[NumericSettings] = None,
) -> List[ManifoldSample]:
    """Sections Theta(tau) of the stable manifold of the lifted future edge state.

    In one dimension the manifold is a single orbit, computed by backward
    integration from next to (eta+, 1). In two dimensions each section is a
    curve, marched backward in tau from the time the input has settled (see
    ``_planar_sections``). Beyond two dimensions each section is replaced by the
    frozen threshold at Lambda(tau).
    """
    settings = settings or get_settings()
    taus = [float(t) for t in taus]
    if not taus:
        return []
    if cs.n >= 2 and edge_branch is None:
        raise PreconditionError("threshold sections for n >= 2 need the edge branch")
    if cs.n == 2:
        return _planar_sections(cs, eta_plus, taus, edge_branch, arclength, settings)
    if cs.n > 2:
        logger.warning(
            "Threshold sections for n=%d use the frozen threshold at Lambda(tau)", cs.n,
            extra={"analysis": "threshold_section", "rate": cs.r},
        )
        sections = []
        for tau in taus:
            lam = cs.lam_at(cs.s_of(tau))
            edge = equilibrium_near(cs.frozen, edge_branch, lam, settings)
            section = threshold_at(cs.frozen, lam, edge, arclength, settings)
            section.kind = ManifoldKind.STABLE_OF_EDGE_STATE
            section.times = np.array([tau])
            sections.append(section)
        return sections

    if delta is None:
        delta = settings.seed_delta_rel
    check_seed_delta(delta)
    lifted = lift_equilibrium(cs, eta_plus, LimitSide.FUTURE)
    seed = lifted.point - delta * lifted.extra_vector.real
    s0 = float(seed[-1])
    if not -1.0 < s0 < 1.0:
        raise PreconditionError("stable direction of the lifted edge state does not leave s = 1")
    tau0 = cs.tau_of(s0)
    orientation = 1.0 if eta_plus.eigen.vector(0)[0] > 0.0 else -1.0

    earliest = min(taus)
    traj = None
    if earliest < tau0:
        traj = integrate_backward(
            cs.rhs,
            seed,
            tau0,
            earliest - BACKWARD_MARGIN,
            rtol=settings.rtol,
            atol=settings.atol,
            blowup_norm=settings.blowup_norm,
        )

    sections = []
    for tau in taus:
        if traj is None or tau >= tau0:
            x = eta_plus.x.copy()
        elif tau < traj.times[0]:
            raise NumericalError(
                f"threshold section orbit stopped ({traj.reason.value}) before tau={tau:.6g}"
            )
        else:
            x = traj(tau)[: cs.n]
        sections.append(
            ManifoldSample(
                kind=ManifoldKind.STABLE_OF_EDGE_STATE,
                points=x.reshape(1, 1),
                times=np.array([tau]),
                seed_offsets=(float(delta),),
                owner=eta_plus,
                normals=np.array([[orientation]]),
            )
        )
    return sections


def _lam(cs: CompactifiedSystem, tau: float) -> np.ndarray:
    return cs.lam_at(cs.s_of(tau))


def _settle_time(cs: CompactifiedSystem, t_from: float, settings: NumericSettings) -> float:
    """First tau >= t_from on a doubling grid where Lambda is within tolerance of its future limit."""
    external = cs.input
    tol = settings.seed_delta_rel * (1.0 + float(np.linalg.norm(external.lam_plus - external.lam_minus)))
    limit = max(40.0 / external.rho, t_from)
    t = max(t_from, 0.0)
    while t < limit and np.linalg.norm(external.value(t) - external.lam_plus) > tol:
        t = 2.0 * t + 1.0
    return max(min(t, limit), t_from)


def _stacked_field(cs: CompactifiedSystem) -> Callable[[float, np.ndarray], np.ndarray]:
    n = cs.n

    def field(tau: float, y: np.ndarray) -> np.ndarray:
        lam = _lam(cs, tau)
        points = y.reshape(-1, n)
        return np.concatenate([cs.frozen.evaluate(p, lam) for p in points]) / cs.r

    return field


def _cumulative(points: np.ndarray) -> np.ndarray:
    return np.concatenate([[0.0], np.cumsum(np.linalg.norm(np.diff(points, axis=0), axis=1))])


def _spacing(points: np.ndarray) -> float:
    return float(np.max(np.linalg.norm(np.diff(points, axis=0), axis=1)))


def _foot(points: np.ndarray, cumulative: np.ndarray, target: np.ndarray) -> float:
    """Arclength position of the point of the polyline nearest to ``target``."""
    a = points[:-1]
    seg = points[1:] - a
    lengths = np.einsum("ij,ij->i", seg, seg)
    t = np.einsum("ij,ij->i", target - a, seg) / np.where(lengths > 0.0, lengths, 1.0)
    t = np.clip(np.where(lengths > 0.0, t, 0.0), 0.0, 1.0)
    gaps = np.linalg.norm(target - (a + t[:, None] * seg), axis=1)
    k = int(np.argmin(gaps))
    return float(cumulative[k] + t[k] * (cumulative[k + 1] - cumulative[k]))


def _window(points: np.ndarray, centre: np.ndarray, arclength: float) -> Tuple[np.ndarray, int]:
    """Resample the polyline to ``arclength`` on either side of its point nearest ``centre``."""
    cumulative = _cumulative(points)
    c = _foot(points, cumulative, centre)
    half = SECTION_POINTS // 2
    lower = np.linspace(max(c - arclength, 0.0), c, half + 1)
    upper = np.linspace(c, min(c + arclength, float(cumulative[-1])), half + 1)[1:]
    targets = np.concatenate([lower, upper])
    resampled = np.column_stack([np.interp(targets, cumulative, points[:, j]) for j in range(points.shape[1])])
    return resampled, half


def _advance(
    field: Callable[[float, np.ndarray], np.ndarray],
    curve: np.ndarray,
    t0: float,
    t1: float,
    settings: NumericSettings,
) -> Optional[np.ndarray]:
    try:
        traj = integrate_backward(
            field,
            curve.reshape(-1),
            t0,
            t1,
            rtol=settings.rtol,
            atol=settings.atol,
            blowup_norm=settings.blowup_norm,
        )
    except NumericalError:
        return None
    if traj.times[0] > t1 + MIN_STEP_REL * (1.0 + abs(t1)):
        return None
    return traj.states[0].reshape(curve.shape)


def _planar_sections(
    cs: CompactifiedSystem,
    eta_plus: EquilibriumRecord,
    taus: List[float],
    edge_branch: Branch,
    arclength: float,
    settings: NumericSettings,
) -> List[ManifoldSample]:
    """Threshold curves at each tau, marched backward from the settled future.

    Once the input is within tolerance of its future limit the section is the
    frozen threshold there. Going back, the curve is integrated over steps short
    enough that no segment stretches by more than SPACING_GROWTH, then cut back
    to ``arclength`` around the point nearest the frozen edge state and resampled.
    Transverse errors shrink under the backward flow.
    """
    extra = {"analysis": "threshold_section", "rate": cs.r}
    t_start = _settle_time(cs, max(taus), settings)

    def frozen_edge(tau: float) -> Optional[EquilibriumRecord]:
        try:
            return equilibrium_near(cs.frozen, edge_branch, _lam(cs, tau), settings)
        except NumericalError:
            return None

    def sample(tau: float, curve: np.ndarray, anchor: int, record: Optional[EquilibriumRecord]) -> ManifoldSample:
        v_u, _ = _unstable_pair(record if record is not None else eta_plus)
        return ManifoldSample(
            kind=ManifoldKind.STABLE_OF_EDGE_STATE,
            points=curve.copy(),
            times=np.full(len(curve), tau),
            owner=eta_plus,
            normals=_normals(curve, anchor, v_u),
        )

    edge = frozen_edge(t_start)
    if edge is None:
        raise PreconditionError(f"no edge state at tau={t_start:g} to start the threshold sections from")
    start = frozen_threshold(cs.frozen, _lam(cs, t_start), edge, arclength, settings=settings)
    curve, anchor = _window(start.points, edge.x, arclength)

    results = {}
    for tau in sorted({v for v in taus if v >= t_start}):
        settled = frozen_edge(tau)
        if settled is None:
            settled = edge
        frozen = frozen_threshold(cs.frozen, _lam(cs, tau), settled, arclength, settings=settings)
        points, at = _window(frozen.points, settled.x, arclength)
        results[tau] = sample(tau, points, at, settled)

    field = _stacked_field(cs)
    step = cs.r
    t = t_start
    steps = 0
    for tau in sorted({v for v in taus if v < t_start}, reverse=True):
        while t > tau:
            t_next = max(t - step, tau)
            images = _advance(field, curve, t, t_next, settings)
            growth = np.inf if images is None else _spacing(images) / max(_spacing(curve), 1e-300)
            if growth > SPACING_GROWTH:
                step *= 0.5
                if step < MIN_STEP_REL * (1.0 + abs(t)):
                    raise NumericalError(f"threshold section march stalled at tau={t:.6g}")
                continue
            if growth < 1.5:
                step *= 2.0
            edge = frozen_edge(t_next)
            centre = edge.x if edge is not None else images[anchor]
            curve, anchor = _window(images, centre, arclength)
            t = t_next
            steps += 1
        results[tau] = sample(tau, curve, anchor, frozen_edge(tau))
    logger.debug(
        "Threshold sections marched from tau=%.6g in %d steps", t_start, steps, extra=extra
    )
    return [results[tau] for tau in taus]
