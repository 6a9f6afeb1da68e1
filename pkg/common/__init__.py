from .errors import (
    ConstructionError,
    EigenConvergenceError,
    EvaluationDomainError,
    ExprError,
    ExprSyntaxError,
    NewtonConvergenceError,
    NonFiniteDerivativeError,
    NonHyperbolicError,
    NotSupportedExplicitly,
    NumericalError,
    PreconditionError,
    RatekitError,
    ScenarioValidationError,
    SingularJacobianError,
    StepSizeUnderflowError,
    TrackingError,
    UnknownFunctionError,
    UnknownIdentifierError,
)
from .metrics import Metrics
from .types import (
    BranchEnd,
    LimitSide,
    ManifoldKind,
    Outcome,
    OutcomeKind,
    OutcomeResolution,
    Stability,
    TerminationReason,
    Verdict,
)

__all__ = [
    "BranchEnd",
    "ConstructionError",
    "EigenConvergenceError",
    "EvaluationDomainError",
    "ExprError",
    "ExprSyntaxError",
    "LimitSide",
    "ManifoldKind",
    "Metrics",
    "NewtonConvergenceError",
    "NonFiniteDerivativeError",
    "NonHyperbolicError",
    "NotSupportedExplicitly",
    "NumericalError",
    "Outcome",
    "OutcomeKind",
    "OutcomeResolution",
    "PreconditionError",
    "RatekitError",
    "ScenarioValidationError",
    "SingularJacobianError",
    "Stability",
    "StepSizeUnderflowError",
    "TerminationReason",
    "TrackingError",
    "UnknownFunctionError",
    "UnknownIdentifierError",
    "Verdict",
]
