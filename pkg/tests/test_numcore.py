"""Numerical core.

Integration: accuracy on a linear decay, event stops in either direction,
blowup detection, backward integration reorders time. Newton: quadratic
roots polished to roundoff, singular Jacobians reported. Eigen: ordering by
real part, eigenvalue sums and products against trace and determinant,
biorthonormal left vectors.
"""

import math

import numpy as np
import pytest

from common.errors import (
    NewtonConvergenceError,
    PreconditionError,
    SingularJacobianError,
)
from common.types import TerminationReason
from numcore import Event, eigen, integrate, integrate_backward, newton

_RTOL = 1e-10
_ATOL = 1e-12


def _decay(_t, y):
    return -y


def test_linear_decay_matches_the_exponential():
    traj = integrate(_decay, [1.0, -2.0], 0.0, 3.0, rtol=_RTOL, atol=_ATOL)
    assert traj.reason is TerminationReason.TIME_LIMIT
    assert traj.final_time == 3.0
    assert np.allclose(traj.final_state, [math.exp(-3.0), -2.0 * math.exp(-3.0)], rtol=1e-8)
    assert np.allclose(traj(1.5), [math.exp(-1.5), -2.0 * math.exp(-1.5)], rtol=1e-6)


def test_event_stops_at_the_crossing():
    level = Event(lambda _t, y: y[0] - 0.5, direction=-1, name="half")
    traj = integrate(_decay, [1.0], 0.0, 10.0, rtol=_RTOL, atol=_ATOL, events=[level])
    assert traj.reason is TerminationReason.EVENT
    assert traj.event_index == 0
    assert traj.event_time == pytest.approx(math.log(2.0), abs=1e-8)
    assert traj.final_state[0] == pytest.approx(0.5, abs=1e-8)


def test_event_direction_filters_crossings():
    rising = Event(lambda _t, y: y[0] - 0.5, direction=1)
    traj = integrate(_decay, [1.0], 0.0, 2.0, rtol=_RTOL, atol=_ATOL, events=[rising])
    assert traj.reason is TerminationReason.TIME_LIMIT


def test_blowup_is_reported_not_raised():
    traj = integrate(lambda _t, y: y * y, [1.0], 0.0, 2.0, rtol=1e-8, atol=1e-10, blowup_norm=1e6)
    assert traj.reason is TerminationReason.BLOWUP
    assert traj.final_time < 1.0


def test_backward_integration_returns_increasing_times():
    traj = integrate_backward(_decay, [1.0], 0.0, -1.0, rtol=_RTOL, atol=_ATOL)
    assert np.all(np.diff(traj.times) > 0.0)
    assert traj.times[0] == pytest.approx(-1.0)
    assert traj.states[0][0] == pytest.approx(math.e, rel=1e-8)
    assert traj.states[-1][0] == 1.0


def test_integration_rejects_an_empty_interval():
    with pytest.raises(PreconditionError):
        integrate(_decay, [1.0], 1.0, 1.0)


def test_newton_polishes_a_root():
    root = newton(lambda x: x * x - 2.0, lambda x: np.diag(2.0 * x), [1.0])
    assert root[0] == pytest.approx(math.sqrt(2.0), abs=1e-15)


def test_newton_solves_a_planar_system():
    def residual(z):
        return np.array([z[0] ** 2 + z[1] ** 2 - 4.0, z[0] - z[1]])

    def jacobian(z):
        return np.array([[2.0 * z[0], 2.0 * z[1]], [1.0, -1.0]])

    root = newton(residual, jacobian, [1.0, 0.5])
    assert np.allclose(root, [math.sqrt(2.0), math.sqrt(2.0)], atol=1e-13)


def test_newton_reports_singular_jacobians():
    with pytest.raises(SingularJacobianError):
        newton(lambda x: x * x + 1.0, lambda x: np.diag(2.0 * x), [0.0])


def test_newton_gives_up_without_a_root():
    with pytest.raises((NewtonConvergenceError, SingularJacobianError)):
        newton(lambda x: x * x + 1.0, lambda x: np.diag(2.0 * x), [0.7], max_iter=30)


@pytest.mark.parametrize(
    "matrix",
    [
        [[-1.0, 2.0], [0.0, -3.0]],
        [[0.0, 1.0], [-2.0, -0.5]],
        [[1.0, 2.0, 0.0], [-1.0, 0.5, 0.3], [0.2, 0.0, -2.0]],
    ],
)
def test_eigen_matches_trace_and_determinant(matrix):
    A = np.array(matrix)
    decomposition = eigen(A)
    assert np.all(np.diff(decomposition.values.real) <= 1e-12)
    assert decomposition.values.sum() == pytest.approx(np.trace(A), abs=1e-12)
    assert np.prod(decomposition.values) == pytest.approx(np.linalg.det(A), abs=1e-12)
    for i in range(decomposition.dimension):
        pairing = np.vdot(decomposition.left[:, i], decomposition.vectors[:, i])
        assert pairing == pytest.approx(1.0, abs=1e-10)


def test_eigen_orients_real_vectors():
    decomposition = eigen([[-1.0, 0.0], [0.0, -3.0]])
    assert decomposition.leading == -1.0
    assert np.allclose(decomposition.vector(0), [1.0, 0.0])
    assert decomposition.is_real(1)


def test_eigen_rejects_non_square_input():
    with pytest.raises(PreconditionError):
        eigen(np.ones((2, 3)))
