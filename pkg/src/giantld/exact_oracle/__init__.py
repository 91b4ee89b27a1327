"""Exact finite-n probabilities for G(n, p) and brute-force cross-checks."""

from .brute import (
    BRUTE_MAX_N,
    GROUNDED_MAX_N,
    brute_force_connectivity_inhomogeneous,
    brute_force_enumerate,
    brute_force_grounded,
    brute_force_Q,
    graph_census_table,
)
from .dp import (
    FLOAT_MAX_N,
    RATIONAL_MAX_N,
    connectivity_table,
    exact_connectivity,
    exact_event,
    exact_forest,
    exact_macro_volume,
    exact_Q,
    exact_small_components,
    forest_from_Q,
    macro_volume_distribution,
)
from .types import (
    EdgeProb,
    EventSpec,
    LogProb,
    LogValue,
    PrecisionLossError,
    as_edge_prob,
)

__all__ = [
    "BRUTE_MAX_N",
    "GROUNDED_MAX_N",
    "FLOAT_MAX_N",
    "RATIONAL_MAX_N",
    "EdgeProb",
    "EventSpec",
    "LogProb",
    "LogValue",
    "PrecisionLossError",
    "as_edge_prob",
    "brute_force_connectivity_inhomogeneous",
    "brute_force_enumerate",
    "brute_force_grounded",
    "brute_force_Q",
    "connectivity_table",
    "exact_connectivity",
    "exact_event",
    "exact_forest",
    "exact_macro_volume",
    "exact_Q",
    "exact_small_components",
    "forest_from_Q",
    "graph_census_table",
    "macro_volume_distribution",
]
