"""Equilibria and their branches.

Solver: Newton roots classified by linear stability; single unstable direction
marks edge candidates. Continuation: straight branches reach the path end,
folds stop the branch near the turning point. Moving equilibria: the limit
records are attached when a branch spans the whole input, and missing when a
fold cuts it.
"""

import numpy as np
import pytest

from common.errors import PreconditionError
from common.types import BranchEnd, LimitSide, Stability
from equilibria import branch_frame, continue_branch, find_equilibrium, moving_equilibrium
from systems import BuiltinTanh, ExternalInput, FrozenSystem

_SADDLE_NODE = FrozenSystem.from_strings(["(x1 + lam1)^2 - 1"], 1, 1)
_FOLD = FrozenSystem.from_strings(["lam1 - x1^2"], 1, 1)


def test_roots_are_classified(fast_settings):
    sink = find_equilibrium(_SADDLE_NODE, [0.0], [-1.3], fast_settings)
    assert sink.x == pytest.approx([-1.0], abs=1e-12)
    assert sink.stability is Stability.SINK
    assert sink.leading.real == pytest.approx(-2.0)
    assert not sink.is_edge_candidate

    edge = find_equilibrium(_SADDLE_NODE, [0.0], [0.8], fast_settings)
    assert edge.stability is Stability.SOURCE
    assert edge.unstable_dim == 1
    assert edge.is_edge_candidate


def test_planar_saddle_is_an_edge_candidate(fast_settings):
    frozen = FrozenSystem.from_strings(["x1 - lam1", "-2*x2"], 2, 1)
    record = find_equilibrium(frozen, [0.5], [0.4, 0.1], fast_settings)
    assert np.allclose(record.x, [0.5, 0.0])
    assert record.stability is Stability.SADDLE
    assert record.is_edge_candidate


def test_guess_dimension_is_checked(fast_settings):
    with pytest.raises(PreconditionError):
        find_equilibrium(_SADDLE_NODE, [0.0], [1.0, 2.0], fast_settings)


def test_straight_branch_reaches_the_path_end(fast_settings):
    seed = find_equilibrium(_SADDLE_NODE, [0.0], [-1.0], fast_settings)
    branch = continue_branch(_SADDLE_NODE, seed, lambda u: np.array([3.0 * u]), 0.0, 1.0, settings=fast_settings)
    assert branch.end_hi is BranchEnd.PATH_END
    assert branch.interval == (0.0, 1.0)
    assert np.allclose(branch.xs()[:, 0], -branch.lams()[:, 0] - 1.0, atol=1e-10)


def test_fold_ends_the_branch(fast_settings):
    seed = find_equilibrium(_FOLD, [1.0], [1.0], fast_settings)
    branch = continue_branch(_FOLD, seed, lambda u: np.array([1.0 - u]), 0.0, 2.0, settings=fast_settings)
    assert branch.end_hi is BranchEnd.FOLD
    assert branch.interval[1] == pytest.approx(1.0, abs=1e-2)
    assert np.all(branch.xs() > 0.0)


def test_moving_sink_spans_the_whole_input(fast_settings):
    external = ExternalInput([BuiltinTanh(0.0, 3.0, 2.0)], rho=1.0)
    seed = find_equilibrium(_SADDLE_NODE, external.lam_minus, [-1.0], fast_settings)
    branch = moving_equilibrium(_SADDLE_NODE, external, seed, LimitSide.PAST, fast_settings)
    assert branch.stability is Stability.SINK
    assert branch.parameter == "tau"
    assert branch.limit_minus.x == pytest.approx([-1.0])
    assert branch.limit_plus.x == pytest.approx([-4.0])
    assert np.all(np.diff(branch.params) > 0.0)

    frame = branch_frame(branch)
    assert list(frame.columns) == ["u_or_tau", "lam1", "x1", "re_eig1", "class"]
    assert set(frame["class"]) == {"SINK"}


def test_moving_sink_stops_at_a_fold(fast_settings):
    external = ExternalInput([BuiltinTanh(1.0, -1.0, 2.0)], rho=1.0)
    seed = find_equilibrium(_FOLD, external.lam_minus, [1.0], fast_settings)
    branch = moving_equilibrium(_FOLD, external, seed, LimitSide.PAST, fast_settings)
    assert branch.limit_minus is not None
    assert branch.limit_plus is None
    assert branch.end_hi is BranchEnd.FOLD
    assert branch.interval[1] == pytest.approx(0.0, abs=0.1)
