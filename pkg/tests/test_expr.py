"""Expression DSL.

Parsing: precedence and associativity, unary minus against powers, error
offsets, unknown names. Printing: formatted text parses back to the same tree.
Evaluation: domain errors surface as EvaluationDomainError. Derivatives:
forward-mode partials agree with central differences.
"""

import math

import numpy as np
import pytest

from common.errors import (
    EvaluationDomainError,
    ExprSyntaxError,
    UnknownFunctionError,
    UnknownIdentifierError,
)
from expr import compile_expr, evaluate, evaluate_dual, format_expr, free_variables, parse, substitute

_FD_STEP = 1e-6
_FD_TOL = 1e-6


@pytest.mark.parametrize(
    "source, expected",
    [
        ("2 + 3 * 4^2", 50.0),
        ("-2^2", -4.0),
        ("2^3^2", 512.0),
        ("(1 + 2) * 3", 9.0),
        ("10 / 4 / 5", 0.5),
        ("8 - 3 - 2", 3.0),
        ("sech(0) + tanh(0) + abs(-3)", 4.0),
        ("1.5e2 + .5", 150.5),
    ],
)
def test_precedence_and_literals(source, expected):
    assert evaluate(parse(source)) == pytest.approx(expected, rel=1e-15)


def test_unknown_names_are_reported_with_offsets():
    with pytest.raises(UnknownIdentifierError) as info:
        parse("x1 + y", ["x1"])
    assert info.value.name == "y"
    assert info.value.offset == 5

    with pytest.raises(UnknownFunctionError) as info:
        parse("cosh(x1)", ["x1"])
    assert info.value.name == "cosh"


@pytest.mark.parametrize("source", ["", "1 +", "(x1", "x1 x1", "sin", "3 $ 4"])
def test_syntax_errors(source):
    with pytest.raises(ExprSyntaxError):
        parse(source, ["x1"])


@pytest.mark.parametrize(
    "source, point",
    [
        ("ln(x1)", {"x1": 0.0}),
        ("sqrt(x1)", {"x1": -1.0}),
        ("1 / x1", {"x1": 0.0}),
        ("x1^0.5", {"x1": -2.0}),
        ("exp(x1)", {"x1": 1e4}),
    ],
)
def test_domain_errors(source, point):
    with pytest.raises(EvaluationDomainError):
        evaluate(parse(source, ["x1"]), point)


@pytest.mark.parametrize(
    "source",
    [
        "-(x1 - lam1)^3 + (x1 - lam1)",
        "x1*(1 - x1^2 - x2^2) - x2*(0.5 - sin(x2 - lam1))",
        "sech(x1 / 2) * exp(-x2) - -3",
    ],
)
def test_format_parses_back_to_the_same_tree(source):
    names = ["x1", "x2", "lam1"]
    ast = parse(source, names)
    assert parse(format_expr(ast), names) == ast


def test_dual_partials_match_central_differences():
    names = ["x1", "x2", "lam1"]
    ast = parse("sin(x1)*exp(x2) + x1^3/x2 - sech(x1*lam1) + sqrt(x2)*ln(x2)", names)
    point = {"x1": 0.7, "x2": 1.3, "lam1": -0.4}
    dual = evaluate_dual(ast, point)
    assert dual.value == pytest.approx(evaluate(ast, point), rel=1e-15)
    for k, name in enumerate(names):
        up, down = dict(point), dict(point)
        up[name] += _FD_STEP
        down[name] -= _FD_STEP
        fd = (evaluate(ast, up) - evaluate(ast, down)) / (2 * _FD_STEP)
        assert dual.partials[k] == pytest.approx(fd, abs=_FD_TOL)


def test_integer_power_of_negative_base_has_a_derivative():
    ast = parse("x1^3", ["x1"])
    dual = evaluate_dual(ast, {"x1": -2.0})
    assert dual.value == -8.0
    assert dual.partials[0] == pytest.approx(12.0)


def test_substitute_removes_constants_from_the_variable_list():
    ast = parse("a*x1 + b", ["x1", "a", "b"])
    reduced = substitute(ast, {"a": 2.0, "b": -1.0})
    assert reduced.variables == ("x1",)
    assert free_variables(reduced) == {"x1"}
    assert evaluate(reduced, {"x1": 3.0}) == 5.0


def test_compiled_expression_follows_the_given_variable_order():
    ast = parse("x1 - 2*x2", ["x1", "x2"])
    compiled = compile_expr(ast, ("x2", "x1"))
    assert compiled.value([1.0, 5.0]) == 3.0
    partials = compiled.dual([1.0, 5.0]).partials
    assert np.allclose(partials, [-2.0, 1.0])
    assert math.isclose(compiled.value([0.0, 0.0]), 0.0)
