from __future__ import annotations

from typing import Callable, Mapping, Optional, Sequence, Tuple

import numpy as np

from common.errors import UnknownIdentifierError
from expr import CompiledExpr, ExprAst, free_variables, parse, substitute


def state_names(n: int) -> list[str]:
    return [f"x{i + 1}" for i in range(n)]


def input_names(d: int) -> list[str]:
    return [f"lam{j + 1}" for j in range(d)]


class FrozenSystem:
    """Vector field f(x, lam) with x in R^n and lam in R^d."""

    def __init__(self, equations: Sequence[ExprAst], n: int, d: int) -> None:
        if n < 1 or len(equations) != n:
            raise ValueError(f"expected {n} component expressions, got {len(equations)}")
        if d < 1:
            raise ValueError("input dimension must be at least 1")
        self.n = n
        self.d = d
        self.variables = tuple(state_names(n) + input_names(d))
        declared = set(self.variables)
        for ast in equations:
            unknown = sorted(free_variables(ast) - declared)
            if unknown:
                raise UnknownIdentifierError(unknown[0])
        self.equations = tuple(equations)
        self._compiled = [CompiledExpr(ast, self.variables) for ast in self.equations]

    @classmethod
    def from_strings(
        cls,
        sources: Sequence[str],
        n: int,
        d: int,
        constants: Optional[Mapping[str, float]] = None,
    ) -> "FrozenSystem":
        constants = dict(constants or {})
        names = state_names(n) + input_names(d)
        extra = [name for name in constants if name not in names]
        asts = [substitute(parse(src, names + extra), constants) for src in sources]
        return cls(asts, n, d)

    def _env(self, x: Sequence[float], lam: Sequence[float]) -> list[float]:
        return [float(v) for v in x] + [float(v) for v in lam]

    def evaluate(self, x: Sequence[float], lam: Sequence[float]) -> np.ndarray:
        env = self._env(x, lam)
        return np.array([expr.value(env) for expr in self._compiled])

    def jacobians(
        self, x: Sequence[float], lam: Sequence[float]
    ) -> Tuple[np.ndarray, np.ndarray]:
        env = self._env(x, lam)
        rows = np.array([expr.dual(env).partials for expr in self._compiled])
        return rows[:, : self.n], rows[:, self.n :]

    def jacobian_x(self, x: Sequence[float], lam: Sequence[float]) -> np.ndarray:
        return self.jacobians(x, lam)[0]

    def field_at(self, lam: Sequence[float]) -> Callable[[float, np.ndarray], np.ndarray]:
        """Autonomous field t, x -> f(x, lam) for a fixed input value."""
        frozen_lam = [float(v) for v in lam]

        def field(_t: float, x: np.ndarray) -> np.ndarray:
            env = [float(v) for v in x] + frozen_lam
            return np.array([expr.value(env) for expr in self._compiled])

        return field

    def describe(self) -> list[str]:
        return [str(ast) for ast in self.equations]
