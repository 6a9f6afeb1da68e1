"""Rate-induced tipping analyses on the builtin scenarios.

Instability: Delta for the quadratic shift is lam(tau2) - lam(tau1) - 2, so the
increasing ramp is forward threshold unstable and the decreasing one is not;
along the path it is unstable exactly when lmax > 2. Tracking: the deviation
from the moving sink and the threshold sections shrink with the rate; the
pullback attractor agrees with a deep-past start; a fold leaves no end point.
Critical rates: outcomes differ on either side of r_c and a dense scan of
direct runs flips at the same place; extra hints never drop a bracket. The
quadratic shift tips to infinity, the cubic tips irreversibly and the planar
phase slip is reversible; cubic and planar tails match the nearby outcomes. Time
changes: sigma maps 0 and eps onto the chosen pair and is linear outside.
Construction: the built input splits the outcomes at r_star and its solution
passes next to eta+. Diagrams: failing sweep values are reported in place and
the job count does not change the verdicts.
"""

import asyncio
import math

import numpy as np
import pytest

from common.errors import PreconditionError, ScenarioValidationError
from common.metrics import Metrics
from common.types import Outcome, OutcomeKind, OutcomeResolution, Verdict
from scenarios import build_problem, load_scenario, scenario_settings
from systems import BuiltinTanh, ExternalInput
from tipping import (
    RateProbe,
    ReparametrizedInput,
    SigmaReparam,
    TrajectorySource,
    analyse_tipping,
    bisect_rate,
    check_threshold_tracking,
    check_tracking,
    classify_tipping,
    construct_tipping_input,
    delta_value,
    diagram_frame,
    find_critical_rate,
    locate_transitions,
    scan_forward_threshold_instability,
    scan_frame,
    scan_threshold_instability,
    sign_change_pairs,
    tipping_diagram,
)

_R_LO = 0.05
_R_HI = 20.0
_TAU_SPAN = 10.0


def _stub(r: float) -> Outcome:
    if r < 0.7:
        return Outcome(OutcomeKind.ATTRACTOR, "A0", side=-1)
    if r < 3.0:
        return Outcome(OutcomeKind.DIVERGENT)
    return Outcome(OutcomeKind.ATTRACTOR, "A0", side=1)


def test_sign_change_pairs_follow_the_zero_set():
    grid = np.linspace(0.0, 1.0, 6)
    values = grid[None, :] - grid[:, None] - 0.3
    pairs = sign_change_pairs(grid, values)
    assert pairs
    assert all(abs(b - a - 0.3) < 1e-12 for a, b in pairs)
    assert sign_change_pairs(grid, np.full((6, 6), math.nan)) == []


def test_locate_transitions_brackets_every_change():
    brackets, coarse = locate_transitions(_stub, 0.1, 10.0, 1e-6, 8)
    assert len(coarse) == 8
    assert len(brackets) == 2
    for (lo, hi, out_lo, out_hi), edge in zip(brackets, (0.7, 3.0)):
        assert lo < edge <= hi
        assert hi - lo <= 1e-6
        assert out_lo.key() != out_hi.key()


def test_hints_join_the_full_coarse_grid():
    brackets, coarse = locate_transitions(_stub, 0.1, 10.0, 1e-6, 8, hints=[0.69, 0.71, 50.0])
    assert len(coarse) == 10
    assert [r for r, _ in coarse if r in (0.69, 0.71)] == [0.69, 0.71]
    assert [round(lo, 3) for lo, *_ in brackets] == [0.7, 3.0]


def test_side_resolution_separates_approach_sides():
    outcome_of = lambda r: Outcome(OutcomeKind.ATTRACTOR, "A0", side=-1 if r < 1.0 else 1)
    brackets, _ = locate_transitions(outcome_of, 0.1, 10.0, 1e-4, 6)
    assert brackets == []
    brackets, _ = locate_transitions(
        outcome_of, 0.1, 10.0, 1e-4, 6, OutcomeResolution.ATTRACTOR_AND_SIDE
    )
    assert len(brackets) == 1


def test_bisection_needs_different_ends():
    with pytest.raises(PreconditionError):
        bisect_rate(_stub, 0.1, 0.2, 1e-3)
    with pytest.raises(PreconditionError):
        locate_transitions(_stub, 2.0, 1.0, 1e-3, 4)


def test_sigma_maps_zero_and_eps_onto_the_pair():
    rng = np.random.default_rng(11)
    for _ in range(100):
        tau_alpha = rng.uniform(-5.0, 5.0)
        gap = rng.uniform(0.5, 5.0)
        eps = rng.uniform(0.05, 0.95) * math.sqrt(gap)
        sigma = SigmaReparam(tau_alpha, tau_alpha + gap, eps)
        assert sigma(0.0) == pytest.approx(tau_alpha, abs=1e-12)
        assert sigma(eps) == pytest.approx(tau_alpha + gap, abs=1e-12)
        assert sigma(-1.0) == pytest.approx(tau_alpha - eps, abs=1e-12)
        assert sigma(eps + 2.0) == pytest.approx(tau_alpha + gap + 2.0 * eps, abs=1e-12)
        inside = np.linspace(0.0, eps, 17)
        assert all(sigma.derivative(t) >= eps for t in inside)
        assert np.all(np.diff([sigma(t) for t in inside]) > 0.0)


def test_sigma_checks_its_window():
    with pytest.raises(PreconditionError):
        SigmaReparam(1.0, 0.5, 0.1)
    with pytest.raises(PreconditionError):
        SigmaReparam(0.0, 1.0, 1.5)


def test_reparametrized_input_decays_at_the_scaled_rate():
    base = ExternalInput([BuiltinTanh(0.0, 3.0, 2.0)], rho=1.0)
    external = ReparametrizedInput(base, SigmaReparam(-1.0, 2.0, 0.25))
    assert external.rho == pytest.approx(0.25)
    assert external.value(0.0) == pytest.approx(base.value(-1.0))
    assert external.value(0.25) == pytest.approx(base.value(2.0))
    assert np.array_equal(external.value(math.inf), base.lam_plus)


@pytest.mark.parametrize("tau1, tau2", [(-1.0, 2.0), (0.5, 0.0), (-3.0, 0.3), (1.0, 1.0)])
def test_delta_on_the_quadratic_shift(sn1d, tau1, tau2):
    lam = sn1d.input.value
    expected = lam(tau2)[0] - lam(tau1)[0] - 2.0
    assert delta_value(sn1d, tau1, tau2) == pytest.approx(expected, abs=1e-9)


def test_increasing_ramp_is_forward_threshold_unstable(sn1d):
    scan = scan_forward_threshold_instability(sn1d, tau_span=_TAU_SPAN)
    assert scan.unstable
    assert scan.summary()["forward_threshold_unstable"] is True
    assert all(a < b for a, b in scan.pairs)
    frame = scan_frame(scan)
    assert list(frame.columns) == ["tau1", "tau2", "delta"]
    assert (frame["tau1"] < frame["tau2"]).all()


def test_decreasing_ramp_is_forward_threshold_stable(sn1d_reversed):
    scan = scan_forward_threshold_instability(sn1d_reversed, tau_span=_TAU_SPAN)
    assert not scan.unstable
    assert scan.basin_unstable is False
    assert np.nanmax(scan.values) <= -2.0 + 1e-9


@pytest.mark.parametrize("lmax, unstable", [(3.0, True), (1.5, False)])
def test_path_scan_depends_on_the_ramp_height(make_problem, lmax, unstable):
    problem = make_problem("sn1d", lmax=lmax)
    scan = scan_threshold_instability(problem)
    assert scan.unstable is unstable
    assert np.nanmax(scan.values) == pytest.approx(lmax - 2.0, abs=1e-9)


def test_slower_rates_track_closer(sn1d):
    reports = [check_tracking(sn1d, r, 0.1) for r in (0.04, 0.02, 0.01)]
    deviations = [report.sup_deviation for report in reports]
    assert deviations[0] > deviations[1] > deviations[2]
    assert all(report.delta_close and report.end_point for report in reports)
    assert reports[0].end_outcome.label == "A0"


def test_planar_tracking_tightens_with_the_rate(planar):
    reports = [check_tracking(planar, r, 0.1) for r in (0.02, 0.01, 0.005)]
    deviations = [report.sup_deviation for report in reports]
    assert deviations[0] > deviations[1] > deviations[2]
    assert all(report.delta_close and report.end_point for report in reports)


@pytest.mark.parametrize("r", [0.1, 1.0])
def test_pullback_attractor_matches_a_deep_past_start(make_problem, r):
    problem = make_problem("sn1d", lmax=1.5)
    n = problem.frozen.n
    _, seeded = problem.solution(r)
    _, direct = problem.solution(r, TrajectorySource.from_point(problem.e_minus.x, -60.0))
    lo = max(seeded.times[0], direct.times[0], -30.0)
    hi = min(seeded.times[-1], direct.times[-1], 30.0)
    assert lo <= -5.0 and hi >= 5.0
    gap = max(np.linalg.norm(seeded(t)[:n] - direct(t)[:n]) for t in np.linspace(lo, hi, 601))
    assert gap <= 1e-4


def test_threshold_sections_approach_the_frozen_threshold(sn1d):
    taus = np.linspace(-2.0, 2.0, 5)
    distances = [float(np.max(check_threshold_tracking(sn1d, r, taus))) for r in (0.04, 0.02, 0.01)]
    assert distances[0] > distances[1] > distances[2]


def test_planar_threshold_sections_are_curves(planar):
    near, settled = check_threshold_tracking(planar, 0.1, [0.0, 8.0])
    coarse, _ = check_threshold_tracking(planar, 0.2, [0.0, 8.0])
    assert coarse > near > 1e-2
    assert settled < 1e-3


def test_fold_leaves_no_end_point(fold_btip):
    report = check_tracking(fold_btip, 0.1, 0.1)
    assert report.end_point is False
    assert any("future limit" in note for note in report.notes)


def test_quadratic_shift_tips_to_infinity(sn1d):
    metrics = Metrics()
    probe = RateProbe(sn1d, metrics=metrics)
    report = find_critical_rate(sn1d, _R_LO, _R_HI, probe=probe)
    assert len(report.critical) == 1
    critical = report.critical[0]
    tol = report.tol_r
    assert critical.bracket_width <= tol
    assert probe(critical.r_c - 2 * tol).key() == ("ATTRACTOR", "A0", 0)
    assert probe(critical.r_c + 2 * tol).kind is OutcomeKind.DIVERGENT
    assert metrics.snapshot()["critical_rates"] == 1.0

    classify_tipping(sn1d, critical)
    assert critical.verdict is Verdict.DEGENERATE


def test_cubic_tips_irreversibly(cubic1d):
    report = analyse_tipping(cubic1d, _R_LO, _R_HI, tol_r=1e-7)
    assert report.verdict is Verdict.IRREVERSIBLE
    critical = report.critical[0]
    assert critical.outcome_lo.label == "A1"
    assert critical.outcome_hi.label == "A0"
    assert critical.eta_plus.x == pytest.approx([3.0])
    assert {critical.upper_tail.outcome.label, critical.lower_tail.outcome.label} == {"A0", "A1"}
    assert critical.correspondence


def test_planar_phase_slip_is_reversible(planar):
    report = analyse_tipping(planar, _R_LO, _R_HI)
    assert report.verdict is Verdict.REVERSIBLE
    critical = report.critical[0]
    assert critical.outcome_lo.label == critical.outcome_hi.label == "A0"
    assert critical.outcome_lo.side == -critical.outcome_hi.side != 0
    assert critical.correspondence
    tails = (critical.upper_tail.outcome, critical.lower_tail.outcome)
    assert {tail.label for tail in tails} == {"A0"}
    assert {tail.side for tail in tails} == {-1, 1}


@pytest.mark.parametrize("name", ["sn1d", "cubic1d"])
def test_critical_rate_matches_a_dense_scan_of_direct_runs(request, name):
    problem = request.getfixturevalue(name)
    critical = find_critical_rate(problem, _R_LO, _R_HI, tol_r=1e-5).critical[0]
    direct = RateProbe(problem, TrajectorySource.from_point(problem.e_minus.x, -30.0))
    rates = critical.r_c + 1e-4 * np.arange(-4, 5)
    keys = [direct(r).key(problem.resolution) for r in rates]
    changes = [i for i in range(len(keys) - 1) if keys[i] != keys[i + 1]]
    assert len(changes) == 1
    assert abs(0.5 * (rates[changes[0]] + rates[changes[0] + 1]) - critical.r_c) <= 2e-4
    assert keys[0] == critical.outcome_lo.key(problem.resolution)
    assert keys[-1] == critical.outcome_hi.key(problem.resolution)


def test_no_tipping_below_the_critical_rate(sn1d):
    report = find_critical_rate(sn1d, _R_LO, 0.1)
    assert report.critical == []
    assert report.verdict is Verdict.NO_TIPPING_FOUND


def test_constructed_input_splits_outcomes(sn1d):
    scan = scan_forward_threshold_instability(sn1d, tau_span=_TAU_SPAN)
    result = construct_tipping_input(sn1d, 1.0, scan)
    assert result.tau_alpha < result.tau_beta
    assert 0.0 < result.eps <= 0.5
    assert all(value <= result.delta / 3.0 for value in result.bounds.values())
    assert min(abs(d) for *_, d in result.trace) <= sn1d.settings.connect_tol
    assert result.outcomes_split
    assert result.input.rho == pytest.approx(result.eps * sn1d.input.rho)


def test_constructed_solution_passes_the_edge_state(fast_settings):
    settings = fast_settings.with_overrides({"rtol": 1e-11, "atol": 1e-13, "connect_tol": 1e-9})
    scenario = load_scenario("sn1d")
    problem = build_problem(scenario, scenario_settings(scenario, settings))
    scan = scan_forward_threshold_instability(problem, tau_span=_TAU_SPAN)
    result = construct_tipping_input(problem, 1.0, scan)
    assert result.outcomes_split
    assert result.min_eta_distance <= 1e-3


def test_construction_needs_an_unstable_scan(sn1d_reversed):
    scan = scan_forward_threshold_instability(sn1d_reversed, tau_span=_TAU_SPAN)
    with pytest.raises(PreconditionError):
        construct_tipping_input(sn1d_reversed, 1.0, scan)


def test_diagram_reports_failures_in_place(make_problem):
    def build(value):
        if value < 0.0:
            raise ScenarioValidationError(f"lmax={value} is negative")
        return make_problem("sn1d", lmax=value)

    points = asyncio.run(tipping_diagram(build, [2.5, -1.0], _R_LO, _R_HI, jobs=2))
    assert [p.index for p in points] == [0, 1]
    assert points[0].error is None
    assert len(points[0].r_c) == 1
    assert points[0].verdict == Verdict.DEGENERATE.value
    assert points[1].verdict == "ERROR"
    assert "ScenarioValidationError" in points[1].error

    frame = diagram_frame(points)
    assert list(frame["verdict"]) == ["DEGENERATE", "ERROR"]
    assert math.isnan(frame["r_c"][1])


def test_diagram_does_not_depend_on_the_job_count(make_problem, fast_settings):
    def build(value):
        return make_problem("sn1d", lmax=value)

    values = [2.5, 3.0, 3.5]
    serial = asyncio.run(tipping_diagram(build, values, _R_LO, _R_HI, jobs=1))
    parallel = asyncio.run(tipping_diagram(build, values, _R_LO, _R_HI, jobs=3))
    tol = fast_settings.tol_r
    assert [p.warm_started for p in serial] == [False, True, True]
    assert not any(p.warm_started for p in parallel)
    for a, b in zip(serial, parallel):
        assert a.verdicts == b.verdicts
        assert len(a.r_c) == len(b.r_c) == 1
        assert a.r_c[0] == pytest.approx(b.r_c[0], abs=2 * tol)
