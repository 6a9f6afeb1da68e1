from __future__ import annotations

from typing import Any, Dict, List, Literal, Mapping, Optional, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    StrictInt,
    StrictStr,
    field_validator,
    model_validator,
)

from common.errors import ExprError
from common.types import OutcomeResolution
from expr import evaluate, free_variables, parse
from systems import input_names, state_names

Number = Union[float, StrictStr]

ANALYSES = ("track", "scan", "find-rc", "classify", "construct-input", "diagram")


def resolve_number(value: Number, constants: Mapping[str, float]) -> float:
    """A scenario number: a literal or an expression over the named constants."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    ast = parse(str(value), list(constants))
    return float(evaluate(ast, dict(constants)))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class SystemSpec(_Strict):
    n: StrictInt = Field(ge=1, le=64)
    d: StrictInt = Field(default=1, ge=1, le=16)
    equations: List[StrictStr]

    @model_validator(mode="after")
    def _dimensions(self) -> "SystemSpec":
        if len(self.equations) != self.n:
            raise ValueError(f"system declares n={self.n} but lists {len(self.equations)} equations")
        return self


class InputComponentSpec(_Strict):
    kind: Literal["tanh", "sech_pulse", "expr"]
    lam_minus: Optional[Number] = None
    lam_plus: Optional[Number] = None
    steepness: Optional[Number] = None
    base: Optional[Number] = None
    amplitude: Optional[Number] = None
    width: Optional[Number] = None
    expr: Optional[StrictStr] = None

    @model_validator(mode="after")
    def _required(self) -> "InputComponentSpec":
        needed = {
            "tanh": ("lam_minus", "lam_plus", "steepness"),
            "sech_pulse": ("base", "amplitude", "width"),
            "expr": ("expr", "lam_minus", "lam_plus"),
        }[self.kind]
        missing = [name for name in needed if getattr(self, name) is None]
        if missing:
            raise ValueError(f"{self.kind} input component needs {', '.join(missing)}")
        return self


class InputSpec(_Strict):
    components: List[InputComponentSpec] = Field(min_length=1)
    rho: Number


class SeedSpec(_Strict):
    sink: List[Number]
    sink_at: Union[Literal["past", "future"], float] = "past"
    edge: Optional[List[Number]] = None
    edge_at: Union[Literal["past", "future"], float] = "past"
    attractors: List[List[Number]] = Field(default_factory=list)
    edge_candidates: List[List[Number]] = Field(default_factory=list)


class RateSpec(_Strict):
    r: Optional[Number] = None
    r_lo: Optional[Number] = None
    r_hi: Optional[Number] = None
    tol_r: Optional[Number] = None
    delta: Number = 0.1
    source: Literal["from_e_minus", "from_point"] = "from_e_minus"
    x0: Optional[List[Number]] = None
    tau0: Optional[Number] = None

    @model_validator(mode="after")
    def _point_source(self) -> "RateSpec":
        if self.source == "from_point" and (self.x0 is None or self.tau0 is None):
            raise ValueError("source from_point needs x0 and tau0")
        return self


class SweepSpec(_Strict):
    parameter: StrictStr
    values: Optional[List[float]] = None
    start: Optional[float] = None
    stop: Optional[float] = None
    points: Optional[StrictInt] = Field(default=None, ge=1, le=10_000)

    @model_validator(mode="after")
    def _grid(self) -> "SweepSpec":
        if self.values is None and None in (self.start, self.stop, self.points):
            raise ValueError("sweep needs either values or start, stop and points")
        return self

    def grid(self) -> List[float]:
        if self.values is not None:
            return [float(v) for v in self.values]
        if self.points == 1:
            return [float(self.start)]
        step = (self.stop - self.start) / (self.points - 1)
        return [float(self.start + i * step) for i in range(self.points)]


class ScanSpec(_Strict):
    points: Optional[StrictInt] = Field(default=None, ge=3, le=2_000)
    tau_span: Optional[Number] = None
    path: Union[Literal["input"], List[StrictStr]] = "input"
    orientation: Literal[1, -1] = 1
    arclength: Number = 5.0


class ConstructSpec(_Strict):
    r_star: Number = 1.0
    delta_target: Optional[Number] = None


class Scenario(_Strict):
    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    name: StrictStr = "scenario"
    description: StrictStr = ""
    constants: Dict[str, float] = Field(default_factory=dict)
    system: SystemSpec
    input: InputSpec
    seeds: SeedSpec
    rates: RateSpec = Field(default_factory=RateSpec)
    sweep: Optional[SweepSpec] = None
    scan: ScanSpec = Field(default_factory=ScanSpec)
    construction: ConstructSpec = Field(default_factory=ConstructSpec, alias="construct")
    analysis: Optional[Literal["track", "scan", "find-rc", "classify", "construct-input", "diagram"]] = None
    resolution: OutcomeResolution = OutcomeResolution.ATTRACTOR
    numerics: Dict[str, Any] = Field(default_factory=dict)

    @field_validator("constants")
    @classmethod
    def _constant_names(cls, value: Dict[str, float]) -> Dict[str, float]:
        reserved = set(state_names(64)) | set(input_names(16)) | {"tau", "u"}
        clash = sorted(set(value) & reserved)
        if clash:
            raise ValueError(f"constant names {clash} clash with state, input or time variables")
        return value

    @model_validator(mode="after")
    def _consistency(self) -> "Scenario":
        n, d = self.system.n, self.system.d
        if len(self.input.components) != d:
            raise ValueError(f"system declares d={d} but the input has {len(self.input.components)} components")
        for label, seed in [("sink", self.seeds.sink), ("edge", self.seeds.edge)]:
            if seed is not None and len(seed) != n:
                raise ValueError(f"{label} seed has {len(seed)} entries, expected n={n}")
        for label, seeds in [("attractor", self.seeds.attractors), ("edge candidate", self.seeds.edge_candidates)]:
            for seed in seeds:
                if len(seed) != n:
                    raise ValueError(f"{label} guess has {len(seed)} entries, expected n={n}")
        if self.rates.x0 is not None and len(self.rates.x0) != n:
            raise ValueError(f"x0 has {len(self.rates.x0)} entries, expected n={n}")
        if self.sweep is not None and self.sweep.parameter not in self.constants:
            raise ValueError(f"sweep parameter '{self.sweep.parameter}' is not a named constant")

        names = set(state_names(n) + input_names(d)) | set(self.constants)
        try:
            for source in self.system.equations:
                unknown = sorted(free_variables(parse(source, sorted(names))) - names)
                if unknown:
                    raise ValueError(f"unknown identifier '{unknown[0]}' in {source!r}")
            for comp in self.input.components:
                if comp.expr is not None:
                    parse(comp.expr, ["tau", *sorted(self.constants)])
            if self.scan.path != "input":
                if len(self.scan.path) != d:
                    raise ValueError(f"scan path has {len(self.scan.path)} components, expected d={d}")
                for source in self.scan.path:
                    parse(source, ["u", *sorted(self.constants)])
            rho = resolve_number(self.input.rho, self.constants)
        except ExprError as exc:
            raise ValueError(str(exc)) from exc
        if not rho > 0.0:
            raise ValueError(f"decay coefficient rho={rho:g} must be positive")
        alpha = self.numerics.get("alpha")
        if alpha is not None:
            alpha = resolve_number(alpha, self.constants)
            if not 0.0 < alpha < rho:
                raise ValueError(
                    f"alpha={alpha:g} violates the regularity window 0 < alpha < rho={rho:g}"
                )
        return self

    def number(self, value: Optional[Number]) -> Optional[float]:
        return None if value is None else resolve_number(value, self.constants)

    def vector(self, values: Optional[List[Number]]) -> Optional[List[float]]:
        return None if values is None else [resolve_number(v, self.constants) for v in values]

    def with_constant(self, name: str, value: float) -> "Scenario":
        if name not in self.constants:
            raise ValueError(f"'{name}' is not a named constant")
        payload = self.model_dump(mode="json", by_alias=True)
        payload["constants"] = {**self.constants, name: float(value)}
        return type(self).model_validate(payload)
