from __future__ import annotations

from typing import Optional


class RatekitError(Exception):
    """Root of every error raised by the engine."""


class ExprError(RatekitError, ValueError):
    def __init__(self, message: str, offset: Optional[int] = None) -> None:
        self.offset = offset
        if offset is not None:
            message = f"{message} (at offset {offset})"
        super().__init__(message)


class ExprSyntaxError(ExprError):
    pass


class UnknownIdentifierError(ExprError):
    def __init__(self, name: str, offset: Optional[int] = None) -> None:
        self.name = name
        super().__init__(f"unknown identifier '{name}'", offset)


class UnknownFunctionError(ExprError):
    def __init__(self, name: str, offset: Optional[int] = None) -> None:
        self.name = name
        super().__init__(f"unknown function '{name}'", offset)


class EvaluationDomainError(ExprError):
    pass


class ScenarioValidationError(RatekitError, ValueError):
    pass


class NumericalError(RatekitError, RuntimeError):
    pass


class StepSizeUnderflowError(NumericalError):
    pass


class NonFiniteDerivativeError(NumericalError):
    pass


class NewtonConvergenceError(NumericalError):
    pass


class SingularJacobianError(NumericalError):
    pass


class EigenConvergenceError(NumericalError):
    pass


class NonHyperbolicError(NumericalError):
    pass


class NotSupportedExplicitly(NumericalError):
    pass


class PreconditionError(NumericalError):
    pass


class TrackingError(NumericalError):
    pass


class ConstructionError(NumericalError):
    def __init__(self, message: str, failed_bound: Optional[str] = None) -> None:
        self.failed_bound = failed_bound
        super().__init__(message)
