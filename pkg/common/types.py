from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np


class Stability(str, Enum):
    SINK = "SINK"
    SADDLE = "SADDLE"
    SOURCE = "SOURCE"
    NON_HYPERBOLIC = "NON_HYPERBOLIC"


class BranchEnd(str, Enum):
    PATH_END = "PATH_END"
    FOLD = "FOLD"
    CLASS_CHANGE = "CLASS_CHANGE"
    NEWTON_FAILURE = "NEWTON_FAILURE"


class TerminationReason(str, Enum):
    TIME_LIMIT = "TIME_LIMIT"
    EVENT = "EVENT"
    BLOWUP = "BLOWUP"
    STEP_FAILURE = "STEP_FAILURE"


class OutcomeKind(str, Enum):
    ATTRACTOR = "ATTRACTOR"
    DIVERGENT = "DIVERGENT"
    UNRESOLVED = "UNRESOLVED"


class Verdict(str, Enum):
    REVERSIBLE = "REVERSIBLE"
    IRREVERSIBLE = "IRREVERSIBLE"
    DEGENERATE = "DEGENERATE"
    NO_TIPPING_FOUND = "NO_TIPPING_FOUND"


class ManifoldKind(str, Enum):
    UNSTABLE_OF_PAST_SINK = "UNSTABLE_OF_PAST_SINK"
    STABLE_OF_EDGE_STATE = "STABLE_OF_EDGE_STATE"
    EDGE_TAIL_UPPER = "EDGE_TAIL_UPPER"
    EDGE_TAIL_LOWER = "EDGE_TAIL_LOWER"
    FROZEN_THRESHOLD = "FROZEN_THRESHOLD"


class LimitSide(str, Enum):
    PAST = "PAST"
    FUTURE = "FUTURE"


class OutcomeResolution(str, Enum):
    ATTRACTOR = "attractor"
    ATTRACTOR_AND_SIDE = "attractor_and_side"


@dataclass(slots=True)
class Outcome:
    kind: OutcomeKind
    label: Optional[str] = None
    side: int = 0
    recurrence_hint: bool = False
    final_state: np.ndarray = field(default_factory=lambda: np.zeros(0))
    time: float = 0.0

    def key(self, resolution: OutcomeResolution = OutcomeResolution.ATTRACTOR) -> Tuple:
        if self.kind is OutcomeKind.ATTRACTOR:
            side = self.side if resolution is OutcomeResolution.ATTRACTOR_AND_SIDE else 0
            return (self.kind.value, self.label, side)
        return (self.kind.value,)

    def describe(self) -> str:
        if self.kind is OutcomeKind.ATTRACTOR:
            suffix = {1: "+", -1: "-"}.get(self.side, "")
            return f"{self.label}{suffix}"
        return self.kind.value.lower()
