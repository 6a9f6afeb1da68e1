"""Frozen systems, inputs and parameter paths.

Inputs: builtin limits and analytic derivatives, dual-number derivatives for
user expressions, decay-rate validation against the declared rho (the fit window
moves inward past an underflowing tail; a constant input decays infinitely fast). Frozen
systems: constants are folded in, unknown names are rejected, Jacobians match
hand-derived ones. Paths: the input path runs from the past to the future limit.
"""

import math

import numpy as np
import pytest

from common.errors import ScenarioValidationError, UnknownIdentifierError
from expr import parse
from systems import (
    BuiltinSechPulse,
    BuiltinTanh,
    ExplicitCurve,
    ExternalInput,
    FrozenSystem,
    NonautonomousSystem,
    PathOfInput,
    UserExpr,
    trace_path,
)

_FD_STEP = 1e-6
_FD_TOL = 1e-7


def _fd(fn, tau):
    return (fn(tau + _FD_STEP) - fn(tau - _FD_STEP)) / (2 * _FD_STEP)


@pytest.mark.parametrize(
    "component",
    [
        BuiltinTanh(0.0, 3.0, 2.0),
        BuiltinTanh(2.0, -1.0, 0.5),
        BuiltinSechPulse(1.0, 0.5, 2.0),
    ],
)
def test_builtin_derivatives_match_differences(component):
    for tau in (-3.0, -0.4, 0.0, 1.1, 5.0):
        assert component.derivative(tau) == pytest.approx(_fd(component.value, tau), abs=_FD_TOL)


def test_tanh_limits_and_midpoint():
    ramp = BuiltinTanh(0.0, 3.0, 2.0)
    assert ramp.value(0.0) == pytest.approx(1.5)
    assert ramp.value(-40.0) == pytest.approx(0.0, abs=1e-15)
    assert ramp.value(40.0) == pytest.approx(3.0, abs=1e-15)


def test_user_expression_derivative_uses_dual_numbers():
    ast = parse("3 * (1 + tanh(tau)) / 2", ["tau"])
    component = UserExpr(ast, 0.0, 3.0)
    for tau in (-1.0, 0.0, 0.3):
        assert component.derivative(tau) == pytest.approx(_fd(component.value, tau), abs=_FD_TOL)


def test_external_input_limits_and_infinite_times():
    external = ExternalInput([BuiltinTanh(0.0, 3.0, 2.0), BuiltinSechPulse(1.0, 2.0, 1.0)], rho=0.5)
    assert external.d == 2
    assert np.array_equal(external.value(-math.inf), [0.0, 1.0])
    assert np.array_equal(external.value(math.inf), [3.0, 1.0])
    assert np.array_equal(external.derivative(math.inf), [0.0, 0.0])


def test_validation_accepts_a_declared_rate_below_the_decay():
    check = ExternalInput([BuiltinTanh(0.0, 3.0, 2.0)], rho=1.0).validate()
    assert check.ok
    assert check.estimated_rate == pytest.approx(2.0, rel=0.05)


def test_decay_rate_survives_an_underflowing_tail():
    # sech^2 underflows to zero for |tau| > 37 while the check window is [40, 80]
    check = ExternalInput([BuiltinTanh(0.0, 3.0, 20.0)], rho=0.5).validate()
    assert check.ok
    assert check.estimated_rate == pytest.approx(20.0, rel=0.05)


def test_constant_input_has_no_finite_decay_rate():
    assert ExternalInput([BuiltinTanh(1.0, 1.0, 2.0)], rho=1.0).validate().estimated_rate == math.inf


def test_validation_rejects_a_declared_rate_above_the_decay():
    with pytest.raises(ScenarioValidationError, match="decay coefficient"):
        ExternalInput([BuiltinTanh(0.0, 3.0, 2.0)], rho=3.0).validate()


def test_validation_rejects_wrong_limits():
    ast = parse("2 + tanh(tau)", ["tau"])
    with pytest.raises(ScenarioValidationError, match="future limit"):
        ExternalInput([UserExpr(ast, 1.0, 4.0)], rho=1.0).validate()


def test_frozen_system_folds_constants_and_differentiates():
    frozen = FrozenSystem.from_strings(["(x1 + lam1)^2 - c", "x1*x2 - lam1"], 2, 1, {"c": 1.0})
    x, lam = [0.5, -2.0], [0.25]
    assert np.allclose(frozen.evaluate(x, lam), [(0.75) ** 2 - 1.0, -1.0 - 0.25])
    jx, jl = frozen.jacobians(x, lam)
    assert np.allclose(jx, [[1.5, 0.0], [-2.0, 0.5]])
    assert np.allclose(jl, [[1.5], [-1.0]])


def test_frozen_system_rejects_unknown_names():
    with pytest.raises(UnknownIdentifierError):
        FrozenSystem.from_strings(["x1 + lam2"], 1, 1)


def test_nonautonomous_field_is_scaled_by_the_rate():
    frozen = FrozenSystem.from_strings(["lam1 - x1"], 1, 1)
    external = ExternalInput([BuiltinTanh(0.0, 1.0, 2.0)], rho=1.0)
    system = NonautonomousSystem(frozen, external, r=0.5)
    assert system.rhs(0.0, np.array([0.0])) == pytest.approx([1.0])
    assert system.with_rate(2.0).rhs(0.0, np.array([0.0])) == pytest.approx([0.25])


def test_input_path_runs_between_the_limits():
    external = ExternalInput([BuiltinTanh(0.0, 3.0, 2.0)], rho=1.0)
    path = PathOfInput(external)
    assert path.point(0.0) == pytest.approx([0.0])
    assert path.point(1.0) == pytest.approx([3.0])
    values = trace_path(path, 21)[:, 0]
    assert np.all(np.diff(values) > 0.0)


def test_explicit_curve():
    curve = ExplicitCurve([parse("2*u", ["u"]), parse("1 - u", ["u"])])
    assert curve.d == 2
    assert np.allclose(curve.point(0.25), [0.5, 0.75])
