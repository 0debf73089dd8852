"""Link prediction in multiplex networks with correlation-weighted heuristics."""

from .core import (
    LayerGraph,
    MultiplexNetwork,
    PropertyMatrix,
    build_network,
    degree_property_matrix,
    edge_property_matrix,
    index_to_pair,
    pair_to_index,
)
from .correlation import (
    CorrelationMatrix,
    OverlapStats,
    admissible_layers,
    correlation_matrix,
    cosine_overlap,
    expected_overlap,
    network_correlation,
    overlap_stats,
)
from .monoplex import MonoplexHeuristic, ScoreTable, score_layer
from .mplx import MplxConfig, score_candidates
from .synth import SynthSpec, calibrate, generate

__version__ = "0.1.0"

__all__ = [
    "LayerGraph",
    "MultiplexNetwork",
    "PropertyMatrix",
    "build_network",
    "degree_property_matrix",
    "edge_property_matrix",
    "index_to_pair",
    "pair_to_index",
    "CorrelationMatrix",
    "OverlapStats",
    "admissible_layers",
    "correlation_matrix",
    "cosine_overlap",
    "expected_overlap",
    "network_correlation",
    "overlap_stats",
    "MonoplexHeuristic",
    "ScoreTable",
    "score_layer",
    "MplxConfig",
    "score_candidates",
    "SynthSpec",
    "calibrate",
    "generate",
]
