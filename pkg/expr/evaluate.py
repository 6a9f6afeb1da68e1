from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence, Tuple

import numpy as np

from common.errors import EvaluationDomainError, ExprError

from .ast import BinOp, Call, ExprAst, Neg, Node, Num, Var, free_variables

ScalarFn = Callable[[Sequence[float]], float]
DualFn = Callable[[Sequence[float]], Tuple[float, np.ndarray]]


@dataclass(slots=True)
class DualValue:
    value: float
    partials: np.ndarray


def _sech(a: float) -> float:
    try:
        return 1.0 / math.cosh(a)
    except OverflowError:
        return 0.0


def _exp(a: float, offset: int) -> float:
    try:
        return math.exp(a)
    except OverflowError:
        raise EvaluationDomainError("overflow in exp", offset) from None


def _ln(a: float, offset: int) -> float:
    if a <= 0.0:
        raise EvaluationDomainError("ln of a non-positive value", offset)
    return math.log(a)


def _sqrt(a: float, offset: int) -> float:
    if a < 0.0:
        raise EvaluationDomainError("sqrt of a negative value", offset)
    return math.sqrt(a)


def _divide(a: float, b: float, offset: int) -> float:
    if b == 0.0:
        raise EvaluationDomainError("division by zero", offset)
    return a / b


def _power(a: float, b: float, offset: int) -> float:
    if a == 0.0 and b < 0.0:
        raise EvaluationDomainError("zero raised to a negative power", offset)
    if a < 0.0 and not float(b).is_integer():
        raise EvaluationDomainError("negative base with a non-integer exponent", offset)
    try:
        return a**b
    except OverflowError:
        raise EvaluationDomainError("overflow in power", offset) from None
    except ZeroDivisionError:
        raise EvaluationDomainError("zero raised to a negative power", offset) from None


def _call_value(func: str, a: float, offset: int) -> float:
    if func == "sin":
        return math.sin(a)
    if func == "cos":
        return math.cos(a)
    if func == "tan":
        return math.tan(a)
    if func == "exp":
        return _exp(a, offset)
    if func == "ln":
        return _ln(a, offset)
    if func == "tanh":
        return math.tanh(a)
    if func == "sech":
        return _sech(a)
    if func == "sqrt":
        return _sqrt(a, offset)
    if func == "abs":
        return abs(a)
    raise ExprError(f"unknown function '{func}'", offset)


def _compile_scalar(node: Node, index: Mapping[str, int]) -> ScalarFn:
    if isinstance(node, Num):
        value = float(node.value)
        return lambda env: value
    if isinstance(node, Var):
        try:
            slot = index[node.name]
        except KeyError:
            raise ExprError(f"variable '{node.name}' is not bound", node.offset) from None
        return lambda env: env[slot]
    if isinstance(node, Neg):
        inner = _compile_scalar(node.operand, index)
        return lambda env: -inner(env)
    if isinstance(node, BinOp):
        left = _compile_scalar(node.left, index)
        right = _compile_scalar(node.right, index)
        offset = node.offset
        if node.op == "+":
            return lambda env: left(env) + right(env)
        if node.op == "-":
            return lambda env: left(env) - right(env)
        if node.op == "*":
            return lambda env: left(env) * right(env)
        if node.op == "/":
            return lambda env: _divide(left(env), right(env), offset)
        if node.op == "^":
            return lambda env: _power(left(env), right(env), offset)
        raise ExprError(f"unknown operator '{node.op}'", offset)
    if isinstance(node, Call):
        arg = _compile_scalar(node.arg, index)
        func, offset = node.func, node.offset
        return lambda env: _call_value(func, arg(env), offset)
    raise TypeError(f"not an expression node: {node!r}")


def _derivative(func: str, a: float, value: float, offset: int) -> float:
    if func == "sin":
        return math.cos(a)
    if func == "cos":
        return -math.sin(a)
    if func == "tan":
        c = math.cos(a)
        return 1.0 / (c * c)
    if func == "exp":
        return value
    if func == "ln":
        return 1.0 / a
    if func == "tanh":
        s = _sech(a)
        return s * s
    if func == "sech":
        return -value * math.tanh(a)
    if func == "sqrt":
        if value == 0.0:
            raise EvaluationDomainError("sqrt is not differentiable at 0", offset)
        return 0.5 / value
    if func == "abs":
        if a == 0.0:
            raise EvaluationDomainError("abs is not differentiable at 0", offset)
        return 1.0 if a > 0.0 else -1.0
    raise ExprError(f"unknown function '{func}'", offset)


def _dual_power(
    a: float, ga: np.ndarray, b: float, gb: np.ndarray, offset: int
) -> Tuple[float, np.ndarray]:
    value = _power(a, b, offset)
    if not gb.any():
        if a == 0.0:
            if b == 1.0:
                return value, ga.copy()
            if b > 1.0 or b == 0.0:
                return value, np.zeros_like(ga)
            raise EvaluationDomainError("power is not differentiable at 0", offset)
        return value, (b * _power(a, b - 1.0, offset)) * ga
    if a <= 0.0:
        raise EvaluationDomainError("variable exponent needs a positive base", offset)
    return value, value * (gb * math.log(a) + (b / a) * ga)


def _compile_dual(node: Node, index: Mapping[str, int], size: int) -> DualFn:
    if isinstance(node, Num):
        value = float(node.value)
        zeros = np.zeros(size)
        return lambda env: (value, zeros)
    if isinstance(node, Var):
        try:
            slot = index[node.name]
        except KeyError:
            raise ExprError(f"variable '{node.name}' is not bound", node.offset) from None
        unit = np.zeros(size)
        unit[slot] = 1.0
        return lambda env: (env[slot], unit)
    if isinstance(node, Neg):
        inner = _compile_dual(node.operand, index, size)

        def neg(env):
            v, g = inner(env)
            return -v, -g

        return neg
    if isinstance(node, BinOp):
        left = _compile_dual(node.left, index, size)
        right = _compile_dual(node.right, index, size)
        op, offset = node.op, node.offset

        def binary(env):
            a, ga = left(env)
            b, gb = right(env)
            if op == "+":
                return a + b, ga + gb
            if op == "-":
                return a - b, ga - gb
            if op == "*":
                return a * b, b * ga + a * gb
            if op == "/":
                quotient = _divide(a, b, offset)
                return quotient, (ga - quotient * gb) / b
            return _dual_power(a, ga, b, gb, offset)

        return binary
    if isinstance(node, Call):
        arg = _compile_dual(node.arg, index, size)
        func, offset = node.func, node.offset

        def call(env):
            a, ga = arg(env)
            value = _call_value(func, a, offset)
            return value, _derivative(func, a, value, offset) * ga

        return call
    raise TypeError(f"not an expression node: {node!r}")


class CompiledExpr:
    """Closure-compiled form of an expression over a fixed variable order."""

    def __init__(self, ast: ExprAst, variables: Sequence[str] | None = None) -> None:
        self.ast = ast
        self.variables = tuple(variables) if variables is not None else ast.variables
        index = {name: i for i, name in enumerate(self.variables)}
        self._offset = getattr(ast.root, "offset", 0)
        self._scalar = _compile_scalar(ast.root, index)
        self._dual = _compile_dual(ast.root, index, len(self.variables))

    def value(self, env: Sequence[float]) -> float:
        result = self._scalar(env)
        if not math.isfinite(result):
            raise EvaluationDomainError("non-finite result", self._offset)
        return result

    def dual(self, env: Sequence[float]) -> DualValue:
        value, partials = self._dual(env)
        if not math.isfinite(value):
            raise EvaluationDomainError("non-finite result", self._offset)
        if not np.all(np.isfinite(partials)):
            raise EvaluationDomainError("non-finite derivative", self._offset)
        return DualValue(float(value), np.array(partials, dtype=float))


def compile_expr(ast: ExprAst, variables: Sequence[str] | None = None) -> CompiledExpr:
    return CompiledExpr(ast, variables)


def _env(ast: ExprAst, point: Mapping[str, float]) -> list[float]:
    missing = sorted(free_variables(ast) - set(point))
    if missing:
        raise ExprError(f"unbound variables: {', '.join(missing)}")
    return [float(point.get(name, 0.0)) for name in ast.variables]


def evaluate(ast: ExprAst, point: Mapping[str, float] | None = None) -> float:
    return compile_expr(ast).value(_env(ast, point or {}))


def evaluate_dual(ast: ExprAst, point: Mapping[str, float] | None = None) -> DualValue:
    return compile_expr(ast).dual(_env(ast, point or {}))
