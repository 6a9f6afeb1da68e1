from .lift import LiftedEquilibrium, critical_manifold_sample, lift_equilibrium
from .system import CompactifiedSystem, compactified_jacobian, compactified_rhs
from .transform import (
    choose_alpha,
    g_alpha,
    glued_input,
    glued_input_derivative,
    h_alpha,
)

__all__ = [
    "CompactifiedSystem",
    "LiftedEquilibrium",
    "choose_alpha",
    "compactified_jacobian",
    "compactified_rhs",
    "critical_manifold_sample",
    "g_alpha",
    "glued_input",
    "glued_input_derivative",
    "h_alpha",
    "lift_equilibrium",
]
