from __future__ import annotations

from dataclasses import asdict, dataclass, field
import logging
from pathlib import Path
from typing import Any, Awaitable, Callable, Dict, Optional, Tuple

import numpy as np
import pandas as pd

from common.errors import NumericalError, ScenarioValidationError
from common.metrics import Metrics
from config.settings import NumericSettings
from equilibria import EquilibriumRecord, branch_frame
from manifolds import manifold_frame
from scenarios import Scenario, build_path, build_problem, build_source, sweep_builder
from tipping import (
    TippingProblem,
    TippingReport,
    analyse_tipping,
    check_threshold_tracking,
    check_tracking,
    construct_tipping_input,
    diagram_frame,
    find_critical_rate,
    scan_forward_threshold_instability,
    scan_frame,
    scan_threshold_instability,
    tipping_diagram,
)

from .plots import diagram_svg, scan_svg, tracking_svg
from .reporting import encode, write_csv, write_json

logger = logging.getLogger(__name__)

THRESHOLD_CHECKS = 5
INPUT_SAMPLES = 401


@dataclass
class CommandContext:
    command: str
    scenario: Scenario
    settings: NumericSettings
    out: Path
    jobs: int = 1
    flags: Dict[str, Any] = field(default_factory=dict)
    metrics: Metrics = field(default_factory=Metrics)
    _problem: Optional[TippingProblem] = field(default=None, repr=False)

    @property
    def extra(self) -> dict:
        return {"scenario": self.scenario.name, "analysis": self.command}

    def problem(self) -> TippingProblem:
        if self._problem is None:
            self._problem = build_problem(self.scenario, self.settings)
        return self._problem

    def resolved_config(self) -> dict:
        return {
            "command": self.command,
            "scenario": self.scenario.model_dump(mode="json", by_alias=True),
            "numerics": self.settings.resolved(),
            "flags": dict(self.flags),
        }

    def report(self, name: str, body: dict) -> Path:
        return write_json(self.out / name, {"config": self.resolved_config(), **body})


@dataclass
class CommandResult:
    report: dict
    tipping_found: Optional[bool] = None


def _record(rec: Optional[EquilibriumRecord]) -> Optional[dict]:
    if rec is None:
        return None
    return {
        "x": [float(v) for v in rec.x],
        "lam": [float(v) for v in rec.lam],
        "stability": rec.stability.value,
        "leading": [rec.leading.real, rec.leading.imag],
    }


def _rate_window(ctx: CommandContext) -> Tuple[float, float]:
    rates = ctx.scenario.rates
    if rates.r_lo is None or rates.r_hi is None:
        raise ScenarioValidationError(f"{ctx.command} needs rates.r_lo and rates.r_hi")
    r_lo, r_hi = ctx.scenario.number(rates.r_lo), ctx.scenario.number(rates.r_hi)
    if not 0.0 < r_lo < r_hi:
        raise ScenarioValidationError(f"rate window needs 0 < r_lo < r_hi, got [{r_lo:g}, {r_hi:g}]")
    return r_lo, r_hi


def _scan_points(ctx: CommandContext) -> int:
    return ctx.scenario.scan.points or ctx.settings.scan_points


async def run_validate(ctx: CommandContext) -> CommandResult:
    problem = ctx.problem()
    check = problem.input.check()
    report = {
        "valid": True,
        "n": problem.frozen.n,
        "d": problem.frozen.d,
        "equations": problem.frozen.describe(),
        "input_check": asdict(check),
        "e_minus": _record(problem.e_minus),
        "e_plus": _record(problem.e_plus),
        "eta_plus": _record(problem.eta_plus),
        "sink_interval": list(problem.sink_branch.interval),
        "catalogue": problem.catalogue.labels,
        "config": ctx.resolved_config(),
    }
    print(encode(report))
    logger.info("Scenario %s is valid", ctx.scenario.name, extra=ctx.extra)
    return CommandResult(report)


async def run_track(ctx: CommandContext) -> CommandResult:
    scenario = ctx.scenario
    if scenario.rates.r is None:
        raise ScenarioValidationError("track needs rates.r")
    problem = ctx.problem()
    r = scenario.number(scenario.rates.r)
    tracking = check_tracking(problem, r, scenario.number(scenario.rates.delta), build_source(scenario))
    body: Dict[str, Any] = {"tracking": tracking.summary()}

    if problem.eta_plus is not None and problem.edge_branch is not None:
        span = 2.0 / problem.input.rho
        taus = np.linspace(-span, span, THRESHOLD_CHECKS)
        try:
            distances = check_threshold_tracking(problem, r, taus)
            body["threshold_tracking"] = {"taus": taus.tolist(), "hausdorff": list(distances)}
        except NumericalError as exc:
            logger.warning("Threshold tracking skipped: %s", exc, extra=ctx.extra)
            body["threshold_tracking"] = {"error": str(exc)}

    write_csv(
        ctx.out / "tracking.csv",
        pd.DataFrame({"tau": tracking.taus, "deviation": tracking.deviations}, columns=["tau", "deviation"]),
    )
    write_csv(ctx.out / "sink_branch.csv", branch_frame(problem.sink_branch))
    if problem.edge_branch is not None:
        write_csv(ctx.out / "edge_branch.csv", branch_frame(problem.edge_branch))
    tracking_svg(ctx.out / "tracking.svg", tracking, problem.frozen.n)
    ctx.report("tracking_report.json", body)
    return CommandResult(body)


async def run_scan(ctx: CommandContext) -> CommandResult:
    scenario = ctx.scenario
    problem = ctx.problem()
    m = _scan_points(ctx)
    forward = scan_forward_threshold_instability(
        problem, m=m, tau_span=scenario.number(scenario.scan.tau_span)
    )
    path_scan = scan_threshold_instability(problem, build_path(scenario), m)
    write_csv(ctx.out / "instability_scan.csv", scan_frame(forward))
    write_csv(ctx.out / "path_scan.csv", scan_frame(path_scan))
    scan_svg(ctx.out / "scan.svg", forward)
    scan_svg(ctx.out / "path_scan.svg", path_scan)
    body = {"forward_scan": forward.summary(), "path_scan": path_scan.summary()}
    ctx.report("scan_report.json", body)
    return CommandResult(body)


def _tipping_body(report: TippingReport) -> dict:
    return {"tipping": report.summary()}


async def run_find_rc(ctx: CommandContext) -> CommandResult:
    r_lo, r_hi = _rate_window(ctx)
    report = find_critical_rate(
        ctx.problem(), r_lo, r_hi, build_source(ctx.scenario), ctx.settings.tol_r, metrics=ctx.metrics
    )
    body = _tipping_body(report)
    ctx.report("tipping_report.json", body)
    return CommandResult(body, tipping_found=bool(report.critical))


async def run_classify(ctx: CommandContext) -> CommandResult:
    problem = ctx.problem()
    r_lo, r_hi = _rate_window(ctx)
    report = analyse_tipping(
        problem, r_lo, r_hi, build_source(ctx.scenario), ctx.settings.tol_r, metrics=ctx.metrics
    )
    tails = [
        tail
        for critical in report.critical
        for tail in (critical.upper_tail, critical.lower_tail)
        if tail is not None
    ]
    if tails:
        write_csv(ctx.out / "edge_tails.csv", manifold_frame(tails, problem.frozen.n))
    body = _tipping_body(report)
    ctx.report("tipping_report.json", body)
    return CommandResult(body, tipping_found=bool(report.critical))


async def run_construct(ctx: CommandContext) -> CommandResult:
    scenario = ctx.scenario
    problem = ctx.problem()
    scan = scan_forward_threshold_instability(
        problem, m=_scan_points(ctx), tau_span=scenario.number(scenario.scan.tau_span)
    )
    result = construct_tipping_input(
        problem,
        scenario.number(scenario.construction.r_star),
        scan,
        scenario.number(scenario.construction.delta_target),
    )
    write_csv(
        ctx.out / "construction_trace.csv",
        pd.DataFrame(result.trace, columns=["t", "tau_alpha", "tau_beta", "signed_distance"]),
    )
    span = 10.0 / problem.input.rho
    taus = np.linspace(-span, span, INPUT_SAMPLES)
    d = problem.frozen.d
    frame = pd.DataFrame({"tau": taus})
    original = np.array([problem.input.value(float(t)) for t in taus])
    constructed = np.array([result.input.value(float(t)) for t in taus])
    for j in range(d):
        frame[f"lam{j + 1}"] = original[:, j]
        frame[f"lam{j + 1}_constructed"] = constructed[:, j]
    write_csv(ctx.out / "constructed_input.csv", frame)
    body = {"forward_scan": scan.summary(), "construction": result.summary()}
    ctx.report("construction_report.json", body)
    return CommandResult(body, tipping_found=result.outcomes_split)


async def run_diagram(ctx: CommandContext) -> CommandResult:
    scenario = ctx.scenario
    if scenario.sweep is None:
        raise ScenarioValidationError("diagram needs a sweep section")
    r_lo, r_hi = _rate_window(ctx)
    points = await tipping_diagram(
        sweep_builder(scenario, ctx.settings),
        scenario.sweep.grid(),
        r_lo,
        r_hi,
        jobs=ctx.jobs,
        source=build_source(scenario),
        tol_r=ctx.settings.tol_r,
        metrics=ctx.metrics,
    )
    write_csv(ctx.out / "diagram.csv", diagram_frame(points))
    diagram_svg(ctx.out / "diagram.svg", points, scenario.sweep.parameter)
    body = {"parameter": scenario.sweep.parameter, "points": [p.summary() for p in points]}
    ctx.report("diagram_report.json", body)
    failed = [p.index for p in points if p.error is not None]
    if failed:
        logger.warning("%d diagram points failed: %s", len(failed), failed, extra=ctx.extra)
    return CommandResult(body, tipping_found=any(p.r_c for p in points))


Command = Callable[[CommandContext], Awaitable[CommandResult]]

COMMANDS: Dict[str, Command] = {
    "validate": run_validate,
    "track": run_track,
    "scan": run_scan,
    "find-rc": run_find_rc,
    "classify": run_classify,
    "construct-input": run_construct,
    "diagram": run_diagram,
}


async def run_selected(ctx: CommandContext) -> CommandResult:
    """The analysis the scenario names for itself."""
    analysis = ctx.scenario.analysis
    if analysis is None:
        raise ScenarioValidationError("the scenario selects no analysis; name a command instead")
    ctx.command = analysis
    return await COMMANDS[analysis](ctx)


COMMANDS["run"] = run_selected