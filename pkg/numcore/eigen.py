from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from common.errors import EigenConvergenceError, PreconditionError

MAX_DIMENSION = 64
RESIDUAL_REL = 1e-8
REAL_TOL = 1e-12


@dataclass(slots=True)
class EigenDecomposition:
    """Eigenpairs sorted by descending real part (ties: descending imaginary part).

    ``vectors[:, i]`` is unit length; real eigenvalues carry real vectors whose
    largest-magnitude entry is positive. ``left[:, i]`` is scaled so that
    ``left[:, i].conj() @ vectors[:, i] == 1``.
    """

    values: np.ndarray
    vectors: np.ndarray
    left: np.ndarray

    @property
    def leading(self) -> complex:
        return complex(self.values[0])

    @property
    def real_parts(self) -> np.ndarray:
        return self.values.real.copy()

    @property
    def dimension(self) -> int:
        return len(self.values)

    def is_real(self, i: int) -> bool:
        return abs(self.values[i].imag) <= REAL_TOL * max(1.0, abs(self.values[i]))

    def vector(self, i: int) -> np.ndarray:
        v = self.vectors[:, i]
        return v.real.copy() if self.is_real(i) else v.copy()

    def left_vector(self, i: int) -> np.ndarray:
        w = self.left[:, i]
        return w.real.copy() if self.is_real(i) else w.copy()

    def min_abs(self) -> float:
        return float(np.min(np.abs(self.values))) if self.dimension else 0.0


def _orient(v: np.ndarray, real: bool) -> np.ndarray:
    k = int(np.argmax(np.abs(v)))
    v = v * (abs(v[k]) / v[k])
    if real:
        v = v.real.astype(complex)
    return v / np.linalg.norm(v)


def eigen(A) -> EigenDecomposition:
    A = np.atleast_2d(np.asarray(A, dtype=float))
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise PreconditionError(f"eigen needs a square matrix, got shape {A.shape}")
    if A.shape[0] > MAX_DIMENSION:
        raise PreconditionError(f"matrix dimension {A.shape[0]} exceeds {MAX_DIMENSION}")
    if not np.all(np.isfinite(A)):
        raise PreconditionError("matrix has non-finite entries")

    try:
        values, left, right = scipy.linalg.eig(A, left=True, right=True)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenConvergenceError(str(exc)) from exc

    order = np.lexsort((-values.imag, -values.real))
    values = values[order].astype(complex)
    right = right[:, order].astype(complex)
    left = left[:, order].astype(complex)

    norm_a = float(np.linalg.norm(A, 2))
    for i, mu in enumerate(values):
        real = abs(mu.imag) <= REAL_TOL * max(1.0, abs(mu))
        if real:
            values[i] = complex(mu.real, 0.0)
        v = _orient(right[:, i], real)
        w = _orient(left[:, i], real)
        pairing = np.vdot(w, v)
        if abs(pairing) > 1e-14:
            w = w / np.conj(pairing)
        residual = float(np.linalg.norm(A @ v - values[i] * v))
        if residual > RESIDUAL_REL * norm_a * np.linalg.norm(v) + 1e-300:
            raise EigenConvergenceError(
                f"eigenpair {i} residual {residual:.3g} above tolerance for |A|={norm_a:.3g}"
            )
        right[:, i] = v
        left[:, i] = w
    return EigenDecomposition(values=values, vectors=right, left=left)
