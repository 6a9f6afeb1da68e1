from __future__ import annotations

import asyncio
from dataclasses import dataclass, field
import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
import pandas as pd

from common.errors import RatekitError
from common.metrics import Metrics
from common.types import Verdict

from .classify import analyse_tipping
from .critical import TippingReport
from .problem import TippingProblem, TrajectorySource

logger = logging.getLogger(__name__)

WARM_SPREAD = 0.05

ProblemBuilder = Callable[[float], TippingProblem]


@dataclass
class DiagramPoint:
    index: int
    value: float
    r_c: List[float] = field(default_factory=list)
    verdicts: List[str] = field(default_factory=list)
    reasons: List[str] = field(default_factory=list)
    error: Optional[str] = None
    warm_started: bool = False

    @property
    def verdict(self) -> str:
        if self.error is not None:
            return "ERROR"
        return self.verdicts[0] if self.verdicts else Verdict.NO_TIPPING_FOUND.value

    def summary(self) -> dict:
        return {
            "index": self.index,
            "value": self.value,
            "r_c": list(self.r_c),
            "verdicts": list(self.verdicts),
            "reasons": list(self.reasons),
            "error": self.error,
        }


def _fill(point: DiagramPoint, report: TippingReport) -> DiagramPoint:
    point.r_c = report.r_c
    point.verdicts = [
        (c.verdict.value if c.verdict is not None else Verdict.DEGENERATE.value) for c in report.critical
    ]
    point.reasons = [c.reason for c in report.critical]
    return point


def _run_chunk(
    build: ProblemBuilder,
    chunk: Sequence[tuple[int, float]],
    r_lo: float,
    r_hi: float,
    source: Optional[TrajectorySource],
    tol_r: Optional[float],
    metrics: Metrics,
) -> List[DiagramPoint]:
    """Sequential sweep over neighbouring grid points, warm-starting from the last r_c values."""
    points: List[DiagramPoint] = []
    previous: List[float] = []
    for index, value in chunk:
        point = DiagramPoint(index=index, value=float(value))
        try:
            problem = build(float(value))
            hints = [r * f for r in previous for f in (1.0 - WARM_SPREAD, 1.0 + WARM_SPREAD)]
            report = analyse_tipping(problem, r_lo, r_hi, source, tol_r, metrics=metrics, hints=hints)
            point.warm_started = bool(hints)
            _fill(point, report)
            previous = list(report.r_c)
        except RatekitError as exc:
            point.error = f"{type(exc).__name__}: {exc}"
            previous = []
            logger.warning(
                "Diagram point %d (value %.10g) failed: %s", index, value, exc,
                extra={"analysis": "diagram"},
            )
        metrics.inc("diagram_points")
        metrics.log(logger)
        points.append(point)
    return points


async def tipping_diagram(
    build: ProblemBuilder,
    values: Sequence[float],
    r_lo: float,
    r_hi: float,
    jobs: int = 1,
    source: Optional[TrajectorySource] = None,
    tol_r: Optional[float] = None,
    metrics: Optional[Metrics] = None,
) -> List[DiagramPoint]:
    """Critical rates and verdicts for every sweep value, in grid order.

    The grid is cut into ``jobs`` contiguous chunks that run concurrently in
    worker threads. Inside a chunk the neighbour's r_c values are merged into
    the coarse rate grid as extra points. The geometric grid is always scanned in
    full, so a warm start can add brackets but never drops one.
    """
    metrics = metrics or Metrics()
    indexed = list(enumerate(float(v) for v in values))
    if not indexed:
        return []
    jobs = max(1, min(int(jobs), len(indexed)))
    chunks = [list(c) for c in np.array_split(np.arange(len(indexed)), jobs)]
    semaphore = asyncio.Semaphore(jobs)

    async def worker(chunk_indices: List[int]) -> List[DiagramPoint]:
        chunk = [indexed[i] for i in chunk_indices]
        async with semaphore:
            return await asyncio.to_thread(_run_chunk, build, chunk, r_lo, r_hi, source, tol_r, metrics)

    results = await asyncio.gather(*(worker(c) for c in chunks if c))
    points = sorted((p for chunk in results for p in chunk), key=lambda p: p.index)
    metrics.log(logger, force=True)
    return points


def diagram_frame(points: Sequence[DiagramPoint]) -> pd.DataFrame:
    rows = []
    for p in points:
        rows.append(
            {
                "index": p.index,
                "value": p.value,
                "n_critical": len(p.r_c),
                "r_c": p.r_c[0] if p.r_c else math.nan,
                "r_c_all": ";".join(format(r, ".17g") for r in p.r_c),
                "verdict": p.verdict,
                "reason": p.reasons[0] if p.reasons else "",
                "error": p.error or "",
            }
        )
    columns = ["index", "value", "n_critical", "r_c", "r_c_all", "verdict", "reason", "error"]
    return pd.DataFrame(rows, columns=columns)
