from .attractors import (
    AttractorCatalogue,
    CatalogueEntry,
    classify_omega_limit,
    classify_with_path,
)
from .distance import hausdorff_distance, hausdorff_semi, polyline_hausdorff, signed_distance
from .sample import ManifoldSample, manifold_frame
from .sections import threshold_section
from .tails import edge_tails
from .thresholds import frozen_threshold, local_linear_threshold, threshold_at
from .unstable import check_seed_delta, compact_orbit, pullback_attractor

__all__ = [
    "AttractorCatalogue",
    "CatalogueEntry",
    "ManifoldSample",
    "check_seed_delta",
    "classify_omega_limit",
    "classify_with_path",
    "compact_orbit",
    "edge_tails",
    "frozen_threshold",
    "hausdorff_distance",
    "hausdorff_semi",
    "polyline_hausdorff",
    "local_linear_threshold",
    "manifold_frame",
    "pullback_attractor",
    "signed_distance",
    "threshold_at",
    "threshold_section",
]
