from .classify import analyse_tipping, classify_tipping
from .construct import ConstructionResult, construct_tipping_input
from .critical import (
    CriticalRate,
    ProbeResult,
    RateProbe,
    TippingReport,
    bisect_rate,
    dwell_near,
    find_critical_rate,
    identify_eta_plus,
    locate_transitions,
)
from .diagram import DiagramPoint, diagram_frame, tipping_diagram
from .instability import (
    InstabilityScan,
    basin_unstable_at,
    delta_value,
    scan_forward_threshold_instability,
    scan_frame,
    scan_threshold_instability,
    sign_change_pairs,
)
from .problem import TippingProblem, TrajectorySource
from .reparam import ReparametrizedInput, SigmaReparam, sigma_reparam
from .tracking import TrackingReport, check_threshold_tracking, check_tracking

__all__ = [
    "ConstructionResult",
    "CriticalRate",
    "DiagramPoint",
    "InstabilityScan",
    "ProbeResult",
    "RateProbe",
    "ReparametrizedInput",
    "SigmaReparam",
    "TippingProblem",
    "TippingReport",
    "TrackingReport",
    "TrajectorySource",
    "analyse_tipping",
    "basin_unstable_at",
    "bisect_rate",
    "check_threshold_tracking",
    "check_tracking",
    "classify_tipping",
    "construct_tipping_input",
    "delta_value",
    "diagram_frame",
    "dwell_near",
    "find_critical_rate",
    "identify_eta_plus",
    "locate_transitions",
    "scan_forward_threshold_instability",
    "scan_frame",
    "scan_threshold_instability",
    "sigma_reparam",
    "sign_change_pairs",
    "tipping_diagram",
]
