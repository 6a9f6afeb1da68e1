from __future__ import annotations

import copy
from typing import Any, Dict

SIN_RESTING = "sin(lmax + 0.5235987755982988)"
COS_RESTING = "cos(lmax + 0.5235987755982988)"

_SN1D: Dict[str, Any] = {
    "name": "sn1d",
    "description": "Quadratic shift x' = (x + lam)^2 - 1 driven by a tanh ramp from 0 to lmax.",
    "constants": {"lmax": 3.0},
    "system": {"n": 1, "d": 1, "equations": ["(x1 + lam1)^2 - 1"]},
    "input": {
        "components": [{"kind": "tanh", "lam_minus": 0.0, "lam_plus": "lmax", "steepness": 2.0}],
        "rho": 1.0,
    },
    "seeds": {"sink": [-1.0], "edge": [1.0], "attractors": [["-lmax - 1"]]},
    "rates": {"r": 0.01, "r_lo": 0.05, "r_hi": 20.0, "delta": 0.1},
    "sweep": {"parameter": "lmax", "start": 2.1, "stop": 4.0, "points": 5},
    "scan": {"tau_span": 10.0},
    "construct": {"r_star": 1.0},
    "analysis": "find-rc",
}

_SN1D_REVERSED: Dict[str, Any] = {
    **copy.deepcopy(_SN1D),
    "name": "sn1d-reversed",
    "description": "The quadratic shift driven by the decreasing ramp from lmax to 0.",
    "input": {
        "components": [{"kind": "tanh", "lam_minus": "lmax", "lam_plus": 0.0, "steepness": 2.0}],
        "rho": 1.0,
    },
    "seeds": {"sink": ["-lmax - 1"], "edge": ["1 - lmax"], "attractors": [[-1.0]]},
    "analysis": "scan",
}

_CUBIC1D: Dict[str, Any] = {
    "name": "cubic1d",
    "description": "Two sinks x = lam +- 1 around the edge state x = lam, shifted by a tanh ramp.",
    "constants": {"lmax": 3.0},
    "system": {"n": 1, "d": 1, "equations": ["-(x1 - lam1)^3 + (x1 - lam1)"]},
    "input": {
        "components": [{"kind": "tanh", "lam_minus": 0.0, "lam_plus": "lmax", "steepness": 2.0}],
        "rho": 1.0,
    },
    "seeds": {"sink": [1.0], "edge": [0.0], "attractors": [["lmax + 1"], ["lmax - 1"]]},
    "rates": {"r": 0.01, "r_lo": 0.05, "r_hi": 20.0, "delta": 0.1},
    "sweep": {"parameter": "lmax", "start": 1.0, "stop": 4.0, "points": 4},
    "scan": {"tau_span": 10.0},
    "analysis": "classify",
}

_PLANAR: Dict[str, Any] = {
    "name": "planar-excitable",
    "description": (
        "Phase oscillator on the unit circle, theta' = mu - sin(theta - lam), with radial "
        "attraction; the input rotates the resting state and the saddle."
    ),
    "constants": {"mu": 0.5, "lmax": 5.0},
    "system": {
        "n": 2,
        "d": 1,
        "equations": [
            "x1*(1 - x1^2 - x2^2) - x2*(mu - (x2*cos(lam1) - x1*sin(lam1)))",
            "x2*(1 - x1^2 - x2^2) + x1*(mu - (x2*cos(lam1) - x1*sin(lam1)))",
        ],
    },
    "input": {
        "components": [{"kind": "tanh", "lam_minus": 0.0, "lam_plus": "lmax", "steepness": 2.0}],
        "rho": 1.0,
    },
    "seeds": {
        "sink": [0.8660254037844386, 0.5],
        "edge": [-0.8660254037844386, 0.5],
        "attractors": [[COS_RESTING, SIN_RESTING]],
    },
    "rates": {"r": 0.01, "r_lo": 0.05, "r_hi": 20.0, "delta": 0.1},
    "scan": {"tau_span": 10.0, "arclength": 0.8, "points": 21},
    "resolution": "attractor_and_side",
    "analysis": "classify",
}

_FOLD_BTIP: Dict[str, Any] = {
    "name": "fold-btip",
    "description": "Saddle-node x' = lam - x^2 ramped from lam = 1 to lam = -1 through the fold.",
    "constants": {},
    "system": {"n": 1, "d": 1, "equations": ["lam1 - x1^2"]},
    "input": {
        "components": [{"kind": "tanh", "lam_minus": 1.0, "lam_plus": -1.0, "steepness": 2.0}],
        "rho": 1.0,
    },
    "seeds": {"sink": [1.0], "edge": [-1.0]},
    "rates": {"r": 0.01, "r_lo": 0.05, "r_hi": 20.0, "delta": 0.1},
    "analysis": "track",
}

BUILTINS: Dict[str, Dict[str, Any]] = {
    spec["name"]: spec for spec in (_SN1D, _SN1D_REVERSED, _CUBIC1D, _PLANAR, _FOLD_BTIP)
}


def builtin_names() -> list[str]:
    return sorted(BUILTINS)


def builtin_payload(name: str) -> Dict[str, Any]:
    return copy.deepcopy(BUILTINS[name])
