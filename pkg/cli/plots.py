from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from tipping import DiagramPoint, InstabilityScan, TrackingReport  # noqa: E402

logger = logging.getLogger(__name__)

plt.rcParams["svg.hashsalt"] = "ratekit"
plt.rcParams["svg.fonttype"] = "none"

SVG_METADATA = {"Date": None, "Creator": None}


def _save(fig, path: Path) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=SVG_METADATA)
    plt.close(fig)
    logger.info("Wrote %s", path)
    return path


def tracking_svg(path: Path, report: TrackingReport, n: int) -> Path:
    """First state component of the solution against the moving sink, over tau."""
    fig, ax = plt.subplots(figsize=(7, 4))
    branch = report.branch
    if branch is not None:
        finite = np.isfinite(branch.params)
        ax.plot(branch.params[finite], branch.xs()[finite, 0], "k--", lw=1.2, label="moving sink")
    traj = report.trajectory
    if traj is not None:
        lo = max(float(traj.times[0]), report.interval[0])
        taus = traj.times[traj.times >= lo]
        ax.plot(taus, traj.states[traj.times >= lo, 0], color="tab:blue", lw=1.5, label=f"solution, r={report.r:g}")
    ax.set_xlabel("tau")
    ax.set_ylabel("x1")
    ax.set_title(f"delta_close={report.delta_close}  end_point={report.end_point}")
    ax.legend(loc="best")
    return _save(fig, path)


def scan_svg(path: Path, scan: InstabilityScan) -> Path:
    """Heat map of Delta with its zero contour."""
    first, second = ("tau1", "tau2") if scan.kind == "forward" else ("u1", "u2")
    fig, ax = plt.subplots(figsize=(6, 5))
    values = np.ma.masked_invalid(scan.values.T)
    mesh = ax.pcolormesh(scan.grid, scan.grid, values, cmap="RdBu_r", shading="nearest")
    fig.colorbar(mesh, ax=ax, label="Delta")
    if np.ma.count(values) and values.min() < 0.0 < values.max():
        ax.contour(scan.grid, scan.grid, values, levels=[0.0], colors="k", linewidths=1.2)
    ax.set_xlabel(first)
    ax.set_ylabel(second)
    ax.set_title(f"{scan.verdict_name}={scan.unstable}")
    return _save(fig, path)


def diagram_svg(path: Path, points: Sequence[DiagramPoint], parameter: str) -> Path:
    """Critical rates against the sweep value, one marker per verdict."""
    fig, ax = plt.subplots(figsize=(7, 4))
    by_verdict: dict[str, list[tuple[float, float]]] = {}
    for p in points:
        for r_c, verdict in zip(p.r_c, p.verdicts):
            by_verdict.setdefault(verdict, []).append((p.value, r_c))
    for verdict in sorted(by_verdict):
        xy = np.array(by_verdict[verdict])
        ax.plot(xy[:, 0], xy[:, 1], "o-", ms=4, label=verdict.lower())
    ax.set_xlabel(parameter)
    ax.set_ylabel("r_c")
    if by_verdict:
        ax.set_yscale("log")
        ax.legend(loc="best")
    return _save(fig, path)
