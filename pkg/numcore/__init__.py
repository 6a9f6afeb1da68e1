from .eigen import EigenDecomposition, eigen
from .integrate import Event, Trajectory, integrate, integrate_backward
from .newton import newton

__all__ = [
    "EigenDecomposition",
    "Event",
    "Trajectory",
    "eigen",
    "integrate",
    "integrate_backward",
    "newton",
]
