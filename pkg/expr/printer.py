from __future__ import annotations

from typing import Mapping

from .ast import BinOp, Call, ExprAst, Neg, Node, Num, Var


def _format(node: Node) -> str:
    if isinstance(node, Num):
        text = repr(float(node.value))
        return f"({text})" if node.value < 0 else text
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Neg):
        return f"(-{_format(node.operand)})"
    if isinstance(node, BinOp):
        return f"({_format(node.left)} {node.op} {_format(node.right)})"
    if isinstance(node, Call):
        return f"{node.func}({_format(node.arg)})"
    raise TypeError(f"not an expression node: {node!r}")


def format_expr(ast: ExprAst | Node) -> str:
    """Fully parenthesised source text that parses back to the same tree."""
    root = ast.root if isinstance(ast, ExprAst) else ast
    return _format(root)


def _substitute(node: Node, constants: Mapping[str, float]) -> Node:
    if isinstance(node, Var) and node.name in constants:
        return Num(float(constants[node.name]), node.offset)
    if isinstance(node, Neg):
        return Neg(_substitute(node.operand, constants), node.offset)
    if isinstance(node, BinOp):
        return BinOp(
            node.op,
            _substitute(node.left, constants),
            _substitute(node.right, constants),
            node.offset,
        )
    if isinstance(node, Call):
        return Call(node.func, _substitute(node.arg, constants), node.offset)
    return node


def substitute(ast: ExprAst, constants: Mapping[str, float]) -> ExprAst:
    remaining = tuple(name for name in ast.variables if name not in constants)
    return ExprAst(_substitute(ast.root, constants), remaining, ast.source)
