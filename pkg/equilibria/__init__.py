from .continuation import (
    Branch,
    branch_frame,
    continue_branch,
    equilibrium_near,
    moving_equilibrium,
)
from .solver import EquilibriumRecord, classify, find_equilibrium, make_record

__all__ = [
    "Branch",
    "EquilibriumRecord",
    "branch_frame",
    "classify",
    "continue_branch",
    "equilibrium_near",
    "find_equilibrium",
    "make_record",
    "moving_equilibrium",
]
