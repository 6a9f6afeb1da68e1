"""Invariant manifolds and outcome classification.

Catalogue: sinks found from guesses, labelled by coordinate order, saddles
dropped. Outcomes: capture with the approach side, finite-time blowup.
Distances: Hausdorff axioms, curve distances that ignore the sampling, signed
distances on both sides of a threshold. Approach sides are read where a path
last enters the capture ball.
Thresholds: the stable manifold of a planar saddle. Pullback attractor: at a
slow rate it ends next to the future sink. Edge tails reach different sinks.
"""

import math

import numpy as np
import pytest

from common.errors import PreconditionError
from common.types import ManifoldKind, OutcomeKind, TerminationReason
from compact import CompactifiedSystem, choose_alpha
from equilibria import find_equilibrium, make_record
from manifolds import (
    AttractorCatalogue,
    classify_omega_limit,
    edge_tails,
    frozen_threshold,
    hausdorff_distance,
    hausdorff_semi,
    local_linear_threshold,
    polyline_hausdorff,
    pullback_attractor,
    signed_distance,
)
from systems import BuiltinTanh, ExternalInput, FrozenSystem

_CUBIC = FrozenSystem.from_strings(["-(x1 - lam1)^3 + (x1 - lam1)"], 1, 1)
_SADDLE_NODE = FrozenSystem.from_strings(["(x1 + lam1)^2 - 1"], 1, 1)
_LINEAR_SADDLE = FrozenSystem.from_strings(["x1", "-x2"], 2, 1)


@pytest.fixture(scope="module")
def cubic_catalogue(fast_settings):
    return AttractorCatalogue.build(_CUBIC, [3.0], [[4.2], [1.7], [3.05]], settings=fast_settings)


def test_catalogue_keeps_sinks_in_coordinate_order(cubic_catalogue):
    assert cubic_catalogue.labels == ["A0", "A1"]
    assert cubic_catalogue.get("A0").center == pytest.approx([2.0])
    assert cubic_catalogue.get("A1").center == pytest.approx([4.0])
    assert cubic_catalogue.label_of([4.0]) == "A1"
    assert cubic_catalogue.label_of([3.0]) is None


@pytest.mark.parametrize("x0, label, side", [(3.5, "A1", -1), (5.0, "A1", 1), (2.5, "A0", 1)])
def test_outcomes_record_the_attractor_and_side(fast_settings, cubic_catalogue, x0, label, side):
    outcome = classify_omega_limit(_CUBIC, [3.0], [x0], cubic_catalogue, settings=fast_settings)
    assert outcome.kind is OutcomeKind.ATTRACTOR
    assert outcome.label == label
    assert outcome.side == side
    assert outcome.final_state.shape == (1,)


def test_blowup_is_a_divergent_outcome(fast_settings):
    catalogue = AttractorCatalogue.build(_SADDLE_NODE, [3.0], [[-4.0]], settings=fast_settings)
    outcome = classify_omega_limit(_SADDLE_NODE, [3.0], [0.0], catalogue, settings=fast_settings)
    assert outcome.kind is OutcomeKind.DIVERGENT
    assert outcome.describe() == "divergent"


def test_hausdorff_axioms():
    rng = np.random.default_rng(7)
    A, B, C = (rng.normal(size=(30, 2)) for _ in range(3))
    assert hausdorff_distance(A, A) == 0.0
    assert hausdorff_distance(A, B) == hausdorff_distance(B, A)
    assert hausdorff_distance(A, C) <= hausdorff_distance(A, B) + hausdorff_distance(B, C) + 1e-12
    assert hausdorff_semi([[0.0, 0.0]], [[0.0, 0.0], [5.0, 0.0]]) == 0.0
    assert hausdorff_distance([[0.0, 0.0], [1.0, 0.0]], [[0.0, 1.0]]) == pytest.approx(math.sqrt(2.0))


def test_hausdorff_rejects_empty_sets():
    with pytest.raises(PreconditionError):
        hausdorff_semi(np.empty((0, 2)), [[0.0, 0.0]])


def test_one_dimensional_threshold_is_the_edge_point(fast_settings):
    edge = find_equilibrium(_SADDLE_NODE, [0.0], [1.0], fast_settings)
    threshold = frozen_threshold(_SADDLE_NODE, [0.0], edge, arclength=1.0, settings=fast_settings)
    assert threshold.kind is ManifoldKind.FROZEN_THRESHOLD
    assert signed_distance([1.5], threshold) == pytest.approx(0.5)
    assert signed_distance([0.2], threshold) == pytest.approx(-0.8)


def test_planar_threshold_is_the_stable_axis(fast_settings):
    edge = make_record(_LINEAR_SADDLE, [0.0, 0.0], [0.0], fast_settings.hyperbolicity_tol)
    threshold = frozen_threshold(_LINEAR_SADDLE, [0.0], edge, arclength=2.0, settings=fast_settings)
    assert np.allclose(threshold.points[:, 0], 0.0, atol=1e-12)
    assert threshold.points[:, 1].max() == pytest.approx(2.0, abs=1e-3)
    assert signed_distance([0.3, 0.2], threshold) == pytest.approx(0.3)
    assert signed_distance([-0.3, -0.1], threshold) == pytest.approx(-0.3)
    assert signed_distance([0.1, 5.0], threshold) == math.inf


def test_local_linear_threshold_has_a_validity_radius(fast_settings):
    edge = make_record(_LINEAR_SADDLE, [0.0, 0.0], [0.0], fast_settings.hyperbolicity_tol)
    threshold = local_linear_threshold(edge, validity_radius=0.5)
    assert signed_distance([0.2, 0.1], threshold) == pytest.approx(0.2)
    assert signed_distance([1.0, 0.0], threshold) == math.inf


def test_sinks_have_no_threshold(fast_settings):
    sink = find_equilibrium(_SADDLE_NODE, [0.0], [-1.0], fast_settings)
    with pytest.raises(PreconditionError):
        frozen_threshold(_SADDLE_NODE, [0.0], sink, arclength=1.0, settings=fast_settings)


def test_slow_pullback_attractor_ends_next_to_the_future_sink(fast_settings):
    external = ExternalInput([BuiltinTanh(0.0, 3.0, 2.0)], rho=1.0)
    r = 0.1
    cs = CompactifiedSystem(_SADDLE_NODE, external, r, choose_alpha(external, r, -2.0))
    e_minus = find_equilibrium(_SADDLE_NODE, external.lam_minus, [-1.0], fast_settings)
    sample = pullback_attractor(cs, e_minus, 1e-6, 0.9, fast_settings)
    assert sample.kind is ManifoldKind.UNSTABLE_OF_PAST_SINK
    assert sample.reason is TerminationReason.EVENT
    assert sample.points[-1, -1] == pytest.approx(0.9, abs=1e-9)
    lam_end = external.value(sample.times[-1])[0]
    assert sample.points[-1, 0] == pytest.approx(-lam_end - 1.0, abs=0.05)


def test_seed_offset_is_bounded(fast_settings):
    external = ExternalInput([BuiltinTanh(0.0, 3.0, 2.0)], rho=1.0)
    cs = CompactifiedSystem(_SADDLE_NODE, external, 1.0, 0.5)
    e_minus = find_equilibrium(_SADDLE_NODE, external.lam_minus, [-1.0], fast_settings)
    with pytest.raises(PreconditionError):
        pullback_attractor(cs, e_minus, 1e-2, 0.9, fast_settings)


def test_edge_tails_reach_both_sinks(fast_settings, cubic_catalogue):
    edge = find_equilibrium(_CUBIC, [3.0], [3.0], fast_settings)
    upper, lower = edge_tails(_CUBIC, [3.0], edge, cubic_catalogue, settings=fast_settings)
    assert upper.kind is ManifoldKind.EDGE_TAIL_UPPER
    assert upper.outcome.label == "A1"
    assert lower.outcome.label == "A0"
    assert upper.seed_offsets[0] == -lower.seed_offsets[0]


def test_approach_side_is_read_at_the_last_entry(cubic_catalogue):
    entry = cubic_catalogue.get("A1")
    r = entry.radius
    overshoot = np.array([[4.0 + 3.0 * r], [4.0 + 0.5 * r], [4.0 - 0.01 * r]])
    assert entry.side(overshoot[-1]) == -1
    assert entry.approach_side(overshoot) == 1
    reentry = np.vstack([overshoot, [[4.0 - 2.0 * r], [4.0 - 0.5 * r], [4.0 + 0.01 * r]]])
    assert entry.approach_side(reentry) == -1
    assert entry.approach_side(overshoot[-1:]) == -1


def test_polyline_hausdorff_ignores_the_sampling():
    coarse = [[0.0, 0.0], [1.0, 0.0]]
    fine = np.column_stack([np.linspace(0.0, 1.0, 7), np.zeros(7)])
    assert hausdorff_distance(coarse, fine) > 0.4
    assert polyline_hausdorff(coarse, fine) == pytest.approx(0.0, abs=1e-15)
    assert polyline_hausdorff(coarse, fine + [0.0, 0.1]) == pytest.approx(0.1)
    assert polyline_hausdorff([[0.5, 0.3]], coarse) == pytest.approx(math.sqrt(0.34))
