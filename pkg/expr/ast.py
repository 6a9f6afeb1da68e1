from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Union

FUNCTIONS = ("sin", "cos", "tan", "exp", "ln", "tanh", "sech", "sqrt", "abs")
BINARY_OPS = ("+", "-", "*", "/", "^")


@dataclass(frozen=True, slots=True)
class Num:
    value: float
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class Neg:
    operand: "Node"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"
    offset: int = field(default=0, compare=False)


@dataclass(frozen=True, slots=True)
class Call:
    func: str
    arg: "Node"
    offset: int = field(default=0, compare=False)


Node = Union[Num, Var, Neg, BinOp, Call]


@dataclass(frozen=True, slots=True)
class ExprAst:
    root: Node
    variables: tuple[str, ...]
    source: str = field(default="", compare=False)

    def __str__(self) -> str:
        from .printer import format_expr

        return format_expr(self)


def walk(node: Node) -> Iterator[Node]:
    yield node
    if isinstance(node, Neg):
        yield from walk(node.operand)
    elif isinstance(node, BinOp):
        yield from walk(node.left)
        yield from walk(node.right)
    elif isinstance(node, Call):
        yield from walk(node.arg)


def depth(node: Node) -> int:
    """Operator nesting depth; leaves count as 0."""
    if isinstance(node, Neg):
        return 1 + depth(node.operand)
    if isinstance(node, BinOp):
        return 1 + max(depth(node.left), depth(node.right))
    if isinstance(node, Call):
        return 1 + depth(node.arg)
    return 0


def free_variables(ast: ExprAst) -> set[str]:
    return {node.name for node in walk(ast.root) if isinstance(node, Var)}
