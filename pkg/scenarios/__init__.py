from .builtins import BUILTINS, builtin_names, builtin_payload
from .loader import (
    build_input,
    build_path,
    build_problem,
    build_source,
    load_scenario,
    scenario_settings,
    sweep_builder,
)
from .schema import ANALYSES, Scenario, resolve_number

__all__ = [
    "ANALYSES",
    "BUILTINS",
    "Scenario",
    "build_input",
    "build_path",
    "build_problem",
    "build_source",
    "builtin_names",
    "builtin_payload",
    "load_scenario",
    "resolve_number",
    "scenario_settings",
    "sweep_builder",
]
