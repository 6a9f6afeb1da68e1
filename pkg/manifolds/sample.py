from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from common.types import ManifoldKind, Outcome, TerminationReason
from equilibria import EquilibriumRecord
from numcore import Trajectory
from systems import state_names


@dataclass(slots=True)
class ManifoldSample:
    """Ordered samples of a manifold piece, with optional orientation data for thresholds."""

    kind: ManifoldKind
    points: np.ndarray
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))
    seed_offsets: Tuple[float, ...] = ()
    owner: Optional[EquilibriumRecord] = None
    normals: Optional[np.ndarray] = None
    local_linear: bool = False
    validity_radius: float = math.inf
    reason: Optional[TerminationReason] = None
    outcome: Optional[Outcome] = None
    trajectory: Optional[Trajectory] = field(default=None, repr=False)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def dimension(self) -> int:
        return int(self.points.shape[1]) if self.points.ndim == 2 else 1

    def flipped(self) -> "ManifoldSample":
        """Same manifold with the orientation field negated."""
        if self.normals is None:
            return self
        return ManifoldSample(
            kind=self.kind,
            points=self.points,
            times=self.times,
            seed_offsets=self.seed_offsets,
            owner=self.owner,
            normals=-self.normals,
            local_linear=self.local_linear,
            validity_radius=self.validity_radius,
            reason=self.reason,
            outcome=self.outcome,
            trajectory=self.trajectory,
        )


def manifold_frame(samples: Sequence[ManifoldSample], n: int) -> pd.DataFrame:
    """Long table with columns kind, branch, tau_or_t, x1..xn and s for compactified points."""
    rows = []
    for index, sample in enumerate(samples):
        times = sample.times if len(sample.times) == len(sample.points) else [math.nan] * len(sample.points)
        for t, p in zip(times, sample.points):
            row = {"kind": sample.kind.value, "branch": index, "tau_or_t": float(t)}
            row.update(dict(zip(state_names(n), p[:n])))
            row["s"] = float(p[n]) if len(p) > n else math.nan
            rows.append(row)
    columns = ["kind", "branch", "tau_or_t", *state_names(n), "s"]
    return pd.DataFrame(rows, columns=columns)
