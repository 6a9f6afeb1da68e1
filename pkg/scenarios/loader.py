from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Union

from pydantic import ValidationError

from common.errors import ExprError, PreconditionError, ScenarioValidationError
from common.types import LimitSide, Stability
from config.settings import NumericSettings, get_settings
from equilibria import Branch, find_equilibrium, moving_equilibrium
from expr import parse, substitute
from manifolds import AttractorCatalogue
from systems import (
    BuiltinSechPulse,
    BuiltinTanh,
    ExplicitCurve,
    ExternalInput,
    FrozenSystem,
    InputComponent,
    ParameterPath,
    UserExpr,
)
from tipping import TippingProblem, TrajectorySource

from .builtins import BUILTINS, builtin_payload
from .schema import InputComponentSpec, Scenario

logger = logging.getLogger(__name__)

ScenarioSource = Union[str, Path, Mapping[str, Any], Scenario]


def _validation_message(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err.get("loc", ()))
        message = str(err.get("msg", "")).removeprefix("Value error, ")
        parts.append(f"{where}: {message}" if where else message)
    return "; ".join(parts) or str(exc)


def load_scenario(source: ScenarioSource) -> Scenario:
    """A validated scenario from a JSON file, a builtin name or a mapping."""
    if isinstance(source, Scenario):
        return source
    try:
        if isinstance(source, Mapping):
            return Scenario.model_validate(dict(source))
        path = Path(source)
        if not path.exists() and str(source) in BUILTINS:
            return Scenario.model_validate(builtin_payload(str(source)))
        return Scenario.model_validate_json(path.read_text(encoding="utf-8"))
    except ValidationError as exc:
        raise ScenarioValidationError(_validation_message(exc)) from exc
    except ExprError as exc:
        raise ScenarioValidationError(str(exc)) from exc
    except OSError as exc:
        raise ScenarioValidationError(f"cannot read scenario {source}: {exc}") from exc


def scenario_settings(
    scenario: Scenario,
    base: Optional[NumericSettings] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> NumericSettings:
    """Environment settings, then the scenario's numerics, then command-line overrides."""
    base = base or get_settings()
    numerics: Dict[str, Any] = dict(scenario.numerics)
    try:
        if numerics.get("alpha") is not None:
            numerics["alpha"] = scenario.number(numerics["alpha"])
        if scenario.rates.tol_r is not None:
            numerics.setdefault("tol_r", scenario.number(scenario.rates.tol_r))
        settings = base.with_overrides(numerics).with_overrides(overrides)
    except ValidationError as exc:
        raise ScenarioValidationError(_validation_message(exc)) from exc
    rho = scenario.number(scenario.input.rho)
    if settings.alpha is not None and not 0.0 < settings.alpha < rho:
        raise ScenarioValidationError(
            f"alpha={settings.alpha:g} violates the regularity window 0 < alpha < rho={rho:g}"
        )
    return settings


def _component(scenario: Scenario, spec: InputComponentSpec) -> InputComponent:
    num = scenario.number
    if spec.kind == "tanh":
        return BuiltinTanh(num(spec.lam_minus), num(spec.lam_plus), num(spec.steepness))
    if spec.kind == "sech_pulse":
        return BuiltinSechPulse(num(spec.base), num(spec.amplitude), num(spec.width))
    ast = substitute(parse(spec.expr, ["tau", *sorted(scenario.constants)]), scenario.constants)
    return UserExpr(ast, num(spec.lam_minus), num(spec.lam_plus))


def build_input(scenario: Scenario) -> ExternalInput:
    try:
        components = [_component(scenario, spec) for spec in scenario.input.components]
        external = ExternalInput(components, scenario.number(scenario.input.rho))
    except (ValueError, ExprError) as exc:
        raise ScenarioValidationError(f"input: {exc}") from exc
    external.validate()
    return external


def _seed_branch(
    frozen: FrozenSystem,
    external: ExternalInput,
    guess,
    at,
    settings: NumericSettings,
) -> Branch:
    if at == "past":
        side, lam = LimitSide.PAST, external.lam_minus
    elif at == "future":
        side, lam = LimitSide.FUTURE, external.lam_plus
    else:
        side, lam = float(at), external.value(float(at))
    seed = find_equilibrium(frozen, lam, guess, settings)
    return moving_equilibrium(frozen, external, seed, side, settings)


def build_problem(scenario: Scenario, settings: Optional[NumericSettings] = None) -> TippingProblem:
    """Frozen system, input, moving sink and edge branches and the future catalogue."""
    settings = settings or scenario_settings(scenario)
    extra = {"scenario": scenario.name, "analysis": "setup"}
    try:
        frozen = FrozenSystem.from_strings(
            scenario.system.equations, scenario.system.n, scenario.system.d, scenario.constants
        )
    except (ValueError, ExprError) as exc:
        raise ScenarioValidationError(f"system: {exc}") from exc
    external = build_input(scenario)
    seeds = scenario.seeds

    sink_branch = _seed_branch(frozen, external, scenario.vector(seeds.sink), seeds.sink_at, settings)
    if sink_branch.stability is not Stability.SINK:
        raise PreconditionError(f"sink seed converged to a {sink_branch.records[0].describe()}")
    edge_branch = None
    if seeds.edge is not None:
        edge_branch = _seed_branch(frozen, external, scenario.vector(seeds.edge), seeds.edge_at, settings)

    limits = [sink_branch.limit_plus] if sink_branch.limit_plus is not None else []
    catalogue = AttractorCatalogue.build(
        frozen,
        external.lam_plus,
        [scenario.vector(g) for g in seeds.attractors],
        limits,
        settings,
    )
    candidates = []
    for guess in seeds.edge_candidates:
        record = find_equilibrium(frozen, external.lam_plus, scenario.vector(guess), settings)
        if record.is_edge_candidate:
            candidates.append(record)
        else:
            logger.warning(
                "Edge candidate guess %s converged to a %s", guess, record.stability.value, extra=extra,
            )

    logger.info(
        "Scenario %s: sink branch on (%.6g, %.6g), %d catalogue attractors, edge %s",
        scenario.name,
        *sink_branch.interval,
        len(catalogue),
        "none" if edge_branch is None else f"on ({edge_branch.interval[0]:.6g}, {edge_branch.interval[1]:.6g})",
        extra=extra,
    )
    return TippingProblem(
        name=scenario.name,
        frozen=frozen,
        input=external,
        sink_branch=sink_branch,
        catalogue=catalogue,
        settings=settings,
        edge_branch=edge_branch,
        edge_candidates=candidates,
        resolution=scenario.resolution,
        orientation=scenario.scan.orientation,
        arclength=scenario.number(scenario.scan.arclength),
    )


def build_path(scenario: Scenario) -> Optional[ParameterPath]:
    """Explicit scan curve, or None to scan along the input itself."""
    if scenario.scan.path == "input":
        return None
    names = ["u", *sorted(scenario.constants)]
    return ExplicitCurve([substitute(parse(src, names), scenario.constants) for src in scenario.scan.path])


def build_source(scenario: Scenario) -> TrajectorySource:
    rates = scenario.rates
    if rates.source == "from_point":
        return TrajectorySource.from_point(scenario.vector(rates.x0), scenario.number(rates.tau0))
    return TrajectorySource.from_e_minus()


def sweep_builder(
    scenario: Scenario, settings: Optional[NumericSettings] = None
) -> Callable[[float], TippingProblem]:
    """Problem factory over the sweep constant; each value rebuilds the whole scenario."""
    if scenario.sweep is None:
        raise ScenarioValidationError("the scenario has no sweep section")
    parameter = scenario.sweep.parameter

    def build(value: float) -> TippingProblem:
        try:
            variant = scenario.with_constant(parameter, value)
        except ValidationError as exc:
            raise ScenarioValidationError(f"{parameter}={value:g}: {_validation_message(exc)}") from exc
        return build_problem(variant, settings)

    return build
