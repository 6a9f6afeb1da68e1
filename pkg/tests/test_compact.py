"""Compactification of the time axis.

Transform: g and h are inverse and send infinite time to s = +-1. Flow: the
boundary layers are invariant. Lifting: limit equilibria gain one eigenvalue
-alpha s with an eigenvector normal to the boundary when alpha < rho. The
regularity window is enforced. Critical set: the moving sink lifts onto zeros
of the compactified field.
"""

import math

import numpy as np
import pytest

from common.errors import PreconditionError
from common.types import LimitSide
from compact import (
    CompactifiedSystem,
    choose_alpha,
    compactified_jacobian,
    compactified_rhs,
    critical_manifold_sample,
    g_alpha,
    h_alpha,
    lift_equilibrium,
)
from equilibria import find_equilibrium, moving_equilibrium
from systems import BuiltinTanh, ExternalInput, FrozenSystem

_FROZEN = FrozenSystem.from_strings(["(x1 + lam1)^2 - 1"], 1, 1)
_INPUT = ExternalInput([BuiltinTanh(0.0, 3.0, 2.0)], rho=1.0)


@pytest.mark.parametrize("tau", [-7.5, -0.3, 0.0, 2.0, 11.0])
def test_transform_inverts(tau):
    assert h_alpha(0.5, g_alpha(0.5, tau)) == pytest.approx(tau, abs=1e-9)


def test_transform_boundaries():
    assert g_alpha(0.5, math.inf) == 1.0
    assert g_alpha(0.5, -math.inf) == -1.0
    assert h_alpha(0.5, -1.0) == -math.inf
    with pytest.raises(PreconditionError):
        h_alpha(0.5, 1.5)


def test_boundary_layers_are_invariant():
    cs = CompactifiedSystem(_FROZEN, _INPUT, r=2.0, alpha=0.5)
    for s in (-1.0, 1.0):
        assert cs.rhs(0.0, np.array([0.3, s]))[-1] == 0.0
    assert cs.rhs(0.0, np.array([0.3, 0.0]))[-1] == pytest.approx(0.25)
    assert np.allclose(cs.lam_at(1.0), [3.0])


@pytest.mark.parametrize("side, s", [(LimitSide.PAST, -1.0), (LimitSide.FUTURE, 1.0)])
def test_lifted_sink_gains_the_boundary_eigenvalue(fast_settings, side, s):
    r, alpha = 0.5, 0.5
    lam = _INPUT.lam_minus if side is LimitSide.PAST else _INPUT.lam_plus
    sink = find_equilibrium(_FROZEN, lam, [-lam[0] - 1.0], fast_settings)
    lifted = lift_equilibrium(CompactifiedSystem(_FROZEN, _INPUT, r, alpha), sink, side)
    assert lifted.s == s
    assert lifted.extra_value.real == pytest.approx(-alpha * s)
    assert lifted.v_normal_to_S
    values = sorted(lifted.eigen.values.real)
    assert values[0] == pytest.approx(-2.0 / r)


def test_lifting_checks_the_limit():
    sink = find_equilibrium(_FROZEN, [1.0], [-2.0])
    cs = CompactifiedSystem(_FROZEN, _INPUT, r=1.0, alpha=0.5)
    with pytest.raises(PreconditionError):
        lift_equilibrium(cs, sink, LimitSide.PAST)


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.5])
def test_regularity_window(alpha):
    with pytest.raises(PreconditionError):
        CompactifiedSystem(_FROZEN, _INPUT, r=1.0, alpha=alpha)


def test_choose_alpha_respects_both_bounds():
    assert choose_alpha(_INPUT, 2.0) == pytest.approx(0.5)
    assert choose_alpha(_INPUT, 4.0, -2.0) == pytest.approx(0.25)
    with pytest.raises(PreconditionError):
        choose_alpha(_INPUT, 1.0, 0.5)


def test_moving_sink_lies_on_the_critical_set(fast_settings):
    cs = CompactifiedSystem(_FROZEN, _INPUT, r=0.5, alpha=0.5)
    seed = find_equilibrium(_FROZEN, _INPUT.lam_minus, [-1.0], fast_settings)
    branch = moving_equilibrium(_FROZEN, _INPUT, seed, LimitSide.PAST, fast_settings)
    points = critical_manifold_sample(cs, branch)
    assert points.shape == (len(branch.records), 2)
    assert np.all(np.abs(points[:, -1]) <= 1.0)
    assert np.all(np.diff(points[:, -1]) >= 0.0)
    for point in points[:: max(len(points) // 8, 1)]:
        assert abs(compactified_rhs(cs, point)[0]) < 1e-8
        assert np.array_equal(compactified_jacobian(cs, point), cs.jacobian(point))
