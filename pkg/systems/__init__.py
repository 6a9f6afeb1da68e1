from .frozen import FrozenSystem, input_names, state_names
from .inputs import (
    BuiltinSechPulse,
    BuiltinTanh,
    ExternalInput,
    InputCheck,
    InputComponent,
    UserExpr,
    input_derivative,
    input_value,
)
from .nonautonomous import NonautonomousSystem, rhs
from .paths import ExplicitCurve, ParameterPath, PathOfInput, dedupe_points, trace_path

__all__ = [
    "BuiltinSechPulse",
    "BuiltinTanh",
    "ExplicitCurve",
    "ExternalInput",
    "FrozenSystem",
    "InputCheck",
    "InputComponent",
    "NonautonomousSystem",
    "ParameterPath",
    "PathOfInput",
    "UserExpr",
    "dedupe_points",
    "input_derivative",
    "input_names",
    "input_value",
    "rhs",
    "state_names",
    "trace_path",
]
