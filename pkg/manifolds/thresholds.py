from __future__ import annotations

import logging
from typing import Optional, Sequence

import numpy as np

from common.errors import NotSupportedExplicitly, PreconditionError
from common.types import ManifoldKind
from config.settings import NumericSettings, get_settings
from equilibria import EquilibriumRecord
from numcore import Event, integrate
from systems import FrozenSystem

from .sample import ManifoldSample

logger = logging.getLogger(__name__)

PIECE_SAMPLES = 200


def _unstable_pair(edge: EquilibriumRecord) -> tuple[np.ndarray, np.ndarray]:
    re = edge.eigen.values.real
    index = int(np.argmax(re))
    return edge.eigen.vector(index), edge.eigen.left_vector(index)


def _backward_piece(
    frozen: FrozenSystem,
    lam: np.ndarray,
    start: np.ndarray,
    start_length: float,
    arclength: float,
    settings: NumericSettings,
) -> np.ndarray:
    """Backward orbit from ``start`` resampled at uniform arclength up to ``arclength``."""
    n = frozen.n
    field = frozen.field_at(lam)

    def augmented(t: float, y: np.ndarray) -> np.ndarray:
        dx = field(t, y[:n])
        return np.append(-dx, np.linalg.norm(dx))

    traj = integrate(
        augmented,
        np.append(start, start_length),
        0.0,
        settings.t_max,
        rtol=settings.rtol,
        atol=settings.atol,
        events=[Event(lambda _t, y: y[n] - arclength, direction=1, name="arclength")],
        blowup_norm=settings.blowup_norm,
    )
    lengths = traj.states[:, n]
    if traj.dense is None or lengths[-1] <= lengths[0]:
        return traj.states[:, :n]
    targets = np.linspace(lengths[0], lengths[-1], PIECE_SAMPLES)
    times = np.interp(targets, lengths, traj.times)
    return np.array([traj(t)[:n] for t in times])


def _normals(points: np.ndarray, anchor: int, v_u: np.ndarray) -> np.ndarray:
    tangents = np.gradient(points, axis=0)
    norms = np.linalg.norm(tangents, axis=1, keepdims=True)
    tangents = tangents / np.where(norms > 0.0, norms, 1.0)
    normals = np.column_stack([-tangents[:, 1], tangents[:, 0]])
    if normals[anchor] @ v_u < 0.0:
        normals = -normals
    for i in range(anchor + 1, len(normals)):
        if normals[i] @ normals[i - 1] < 0.0:
            normals[i] = -normals[i]
    for i in range(anchor - 1, -1, -1):
        if normals[i] @ normals[i + 1] < 0.0:
            normals[i] = -normals[i]
    return normals


def frozen_threshold(
    frozen: FrozenSystem,
    lam: Sequence[float],
    edge: EquilibriumRecord,
    arclength: float,
    delta: Optional[float] = None,
    settings: Optional[NumericSettings] = None,
) -> ManifoldSample:
    """Stable manifold of the edge state of the frozen system at ``lam``.

    One dimension gives the edge point itself; two dimensions give a curve traced by
    backward integration along both stable branches. The normal points to the side
    the unstable eigenvector points to.
    """
    settings = settings or get_settings()
    if not edge.is_edge_candidate:
        raise PreconditionError(f"{edge.describe()} has no single unstable direction")
    lam = np.asarray(lam, dtype=float)
    v_u, _ = _unstable_pair(edge)
    n = frozen.n
    if n == 1:
        return ManifoldSample(
            kind=ManifoldKind.FROZEN_THRESHOLD,
            points=edge.x.reshape(1, 1).copy(),
            normals=np.array([[1.0 if v_u[0] > 0.0 else -1.0]]),
            owner=edge,
        )
    if n > 2:
        raise NotSupportedExplicitly(f"explicit threshold geometry is not built for n={n}")

    stable = int(np.argmin(edge.eigen.values.real))
    v_s = edge.eigen.vector(stable)
    tangent_normal = np.array([-v_s[1], v_s[0]])
    if arclength <= 0.0:
        normal = tangent_normal if tangent_normal @ v_u >= 0.0 else -tangent_normal
        return ManifoldSample(
            kind=ManifoldKind.FROZEN_THRESHOLD,
            points=edge.x.reshape(1, 2).copy(),
            normals=normal.reshape(1, 2),
            owner=edge,
        )

    delta = delta if delta is not None else settings.seed_delta_rel * (1.0 + np.linalg.norm(edge.x))
    delta = min(delta, 0.5 * arclength)
    plus = _backward_piece(frozen, lam, edge.x + delta * v_s, delta, arclength, settings)
    minus = _backward_piece(frozen, lam, edge.x - delta * v_s, delta, arclength, settings)
    points = np.vstack([minus[::-1], edge.x.reshape(1, 2), plus])
    anchor = len(minus)
    return ManifoldSample(
        kind=ManifoldKind.FROZEN_THRESHOLD,
        points=points,
        seed_offsets=(float(delta), -float(delta)),
        owner=edge,
        normals=_normals(points, anchor, v_u),
    )


def local_linear_threshold(edge: EquilibriumRecord, validity_radius: float) -> ManifoldSample:
    """Tangent hyperplane of the stable manifold at the edge state."""
    v_u, w_u = _unstable_pair(edge)
    normal = w_u / np.linalg.norm(w_u)
    if normal @ v_u < 0.0:
        normal = -normal
    return ManifoldSample(
        kind=ManifoldKind.FROZEN_THRESHOLD,
        points=edge.x.reshape(1, -1).copy(),
        normals=normal.reshape(1, -1),
        owner=edge,
        local_linear=True,
        validity_radius=float(validity_radius),
    )


def threshold_at(
    frozen: FrozenSystem,
    lam: Sequence[float],
    edge: EquilibriumRecord,
    arclength: float,
    settings: Optional[NumericSettings] = None,
) -> ManifoldSample:
    """Explicit threshold where available, the local-linear one otherwise."""
    try:
        return frozen_threshold(frozen, lam, edge, arclength, settings=settings)
    except NotSupportedExplicitly:
        logger.warning(
            "Using local-linear threshold with validity radius %.3g for n=%d",
            arclength, frozen.n, extra={"analysis": "threshold"},
        )
        return local_linear_threshold(edge, arclength)
