from __future__ import annotations

import logging
from typing import Optional, Sequence

from common.errors import NumericalError
from common.metrics import Metrics
from common.types import ManifoldKind, OutcomeKind, Verdict
from manifolds import ManifoldSample, edge_tails, hausdorff_distance

from .critical import CriticalRate, RateProbe, TippingReport, find_critical_rate
from .problem import TippingProblem, TrajectorySource

logger = logging.getLogger(__name__)


def _as_kind(sample: ManifoldSample, kind: ManifoldKind) -> ManifoldSample:
    sample.kind = kind
    return sample


def _match_tails(
    problem: TippingProblem, critical: CriticalRate, plus: ManifoldSample, minus: ManifoldSample
) -> tuple[ManifoldSample, ManifoldSample, bool]:
    """(upper, lower, correspondence): upper is the tail reached just above r_c."""
    resolution = problem.resolution
    below = critical.outcome_below.key(resolution) if critical.outcome_below else None
    above = critical.outcome_above.key(resolution) if critical.outcome_above else None
    key_plus, key_minus = plus.outcome.key(resolution), minus.outcome.key(resolution)
    if below == key_minus and above == key_plus:
        return plus, minus, True
    if below == key_plus and above == key_minus:
        return minus, plus, True
    return plus, minus, False


def classify_tipping(problem: TippingProblem, critical: CriticalRate) -> CriticalRate:
    """Reversible, irreversible or degenerate, from the two edge tails of eta+."""
    extra = {"scenario": problem.name, "analysis": "classify", "rate": critical.r_c}
    if critical.verdict is Verdict.DEGENERATE:
        return critical
    eta = critical.eta_plus
    if eta is None:
        critical.verdict = Verdict.DEGENERATE
        critical.reason = "no regular edge state identified"
        logger.warning("Critical solution at r_c=%.10g approaches no edge state", critical.r_c, extra=extra)
        return critical

    try:
        plus, minus = edge_tails(
            problem.frozen, problem.input.lam_plus, eta, problem.catalogue, settings=problem.settings
        )
    except NumericalError as exc:
        critical.verdict = Verdict.DEGENERATE
        critical.reason = f"edge tails failed: {exc}"
        return critical

    upper, lower, correspondence = _match_tails(problem, critical, plus, minus)
    critical.upper_tail = _as_kind(upper, ManifoldKind.EDGE_TAIL_UPPER)
    critical.lower_tail = _as_kind(lower, ManifoldKind.EDGE_TAIL_LOWER)
    critical.correspondence = correspondence
    if not correspondence:
        logger.warning(
            "Outcomes next to r_c do not match the edge tails (%s, %s vs %s, %s)",
            critical.outcome_below.describe(), critical.outcome_above.describe(),
            plus.outcome.describe(), minus.outcome.describe(), extra=extra,
        )

    kinds = (upper.outcome.kind, lower.outcome.kind)
    if OutcomeKind.DIVERGENT in kinds:
        critical.verdict, critical.reason = Verdict.DEGENERATE, "divergent tail"
    elif OutcomeKind.UNRESOLVED in kinds:
        critical.verdict, critical.reason = Verdict.DEGENERATE, "unresolved tail"
    elif hausdorff_distance(upper.points, lower.points) <= problem.settings.identical_tail_tol:
        critical.verdict, critical.reason = Verdict.DEGENERATE, "identical tails"
    elif upper.outcome.label == lower.outcome.label:
        critical.verdict, critical.reason = Verdict.REVERSIBLE, f"both tails reach {upper.outcome.label}"
    else:
        critical.verdict = Verdict.IRREVERSIBLE
        critical.reason = f"tails reach {lower.outcome.label} and {upper.outcome.label}"
    logger.info(
        "Tipping at r_c=%.10g is %s (%s)", critical.r_c, critical.verdict.value, critical.reason,
        extra=extra,
    )
    return critical


def analyse_tipping(
    problem: TippingProblem,
    r_lo: float,
    r_hi: float,
    source: Optional[TrajectorySource] = None,
    tol_r: Optional[float] = None,
    probe: Optional[RateProbe] = None,
    metrics: Optional[Metrics] = None,
    hints: Sequence[float] = (),
) -> TippingReport:
    """Critical-rate search followed by classification of every critical rate found."""
    report = find_critical_rate(problem, r_lo, r_hi, source, tol_r, probe, metrics, hints)
    for critical in report.critical:
        classify_tipping(problem, critical)
    return report
