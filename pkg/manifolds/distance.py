from __future__ import annotations

import math
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from common.errors import PreconditionError

from .sample import ManifoldSample

END_SLACK = 1e-12


def _as_points(points) -> np.ndarray:
    array = np.asarray(points, dtype=float)
    if array.ndim == 0:
        return array.reshape(1, 1)
    if array.ndim == 1:
        # a flat array is a set of scalar samples
        return array.reshape(-1, 1)
    return array


def signed_distance(x: Sequence[float], threshold: ManifoldSample) -> float:
    """Signed gap from ``x`` to a sampled threshold; +inf outside the sampled neighbourhood."""
    if threshold.normals is None:
        raise PreconditionError("threshold has no orientation field")
    x = np.asarray(x, dtype=float).reshape(-1)
    points = threshold.points
    normals = threshold.normals

    if threshold.local_linear or len(points) == 1:
        offset = x - points[0]
        if np.linalg.norm(offset) > threshold.validity_radius:
            return math.inf
        return float(offset @ normals[0])

    a = points[:-1]
    seg = points[1:] - points[:-1]
    lengths = np.einsum("ij,ij->i", seg, seg)
    raw = np.einsum("ij,ij->i", x - a, seg) / np.where(lengths > 0.0, lengths, 1.0)
    raw = np.where(lengths > 0.0, raw, 0.0)
    t = np.clip(raw, 0.0, 1.0)
    foot = a + t[:, None] * seg
    gaps = np.linalg.norm(x - foot, axis=1)
    k = int(np.argmin(gaps))
    if (k == 0 and raw[k] < -END_SLACK) or (k == len(seg) - 1 and raw[k] > 1.0 + END_SLACK):
        return math.inf
    if gaps[k] == 0.0:
        return 0.0
    normal = (1.0 - t[k]) * normals[k] + t[k] * normals[k + 1]
    side = float((x - foot[k]) @ normal)
    return float(math.copysign(gaps[k], side)) if side != 0.0 else 0.0


def hausdorff_semi(A, B) -> float:
    """sup over a in A of the distance from a to B."""
    A, B = _as_points(A), _as_points(B)
    if len(A) == 0 or len(B) == 0:
        raise PreconditionError("Hausdorff distance needs non-empty point sets")
    distances, _ = cKDTree(B).query(A)
    return float(np.max(distances))


def hausdorff_distance(A, B) -> float:
    return max(hausdorff_semi(A, B), hausdorff_semi(B, A))


def _to_segments(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Distance from each point of A to the polyline through the points of B."""
    if len(B) == 1:
        return np.linalg.norm(A - B[0], axis=1)
    a = B[:-1]
    seg = B[1:] - a
    lengths = np.einsum("ij,ij->i", seg, seg)
    offsets = A[:, None, :] - a[None, :, :]
    t = np.einsum("kij,ij->ki", offsets, seg) / np.where(lengths > 0.0, lengths, 1.0)
    t = np.clip(np.where(lengths > 0.0, t, 0.0), 0.0, 1.0)
    gaps = np.linalg.norm(offsets - t[:, :, None] * seg[None, :, :], axis=2)
    return gaps.min(axis=1)


def polyline_hausdorff(A, B) -> float:
    """Hausdorff distance between two sampled curves, from each vertex to the other curve."""
    A, B = _as_points(A), _as_points(B)
    if len(A) == 0 or len(B) == 0:
        raise PreconditionError("Hausdorff distance needs non-empty point sets")
    return float(max(np.max(_to_segments(A, B)), np.max(_to_segments(B, A))))
