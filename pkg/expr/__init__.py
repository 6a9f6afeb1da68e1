from .ast import FUNCTIONS, BinOp, Call, ExprAst, Neg, Num, Var, depth, free_variables, walk
from .evaluate import CompiledExpr, DualValue, compile_expr, evaluate, evaluate_dual
from .parser import parse, tokenize
from .printer import format_expr, substitute

__all__ = [
    "FUNCTIONS",
    "BinOp",
    "Call",
    "CompiledExpr",
    "DualValue",
    "ExprAst",
    "Neg",
    "Num",
    "Var",
    "compile_expr",
    "depth",
    "evaluate",
    "evaluate_dual",
    "format_expr",
    "free_variables",
    "parse",
    "substitute",
    "tokenize",
    "walk",
]
