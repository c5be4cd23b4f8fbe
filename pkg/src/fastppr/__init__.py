"""Single-pair personalized PageRank estimation on directed graphs.

Bidirectional estimation (reverse frontier push + forward random walks)
with Monte-Carlo and local-update baselines, exact oracles, a precomputed
frontier store, and a benchmark harness.
"""

from .estimators import (ACCEPT, REJECT, Estimate, QueryParams,
                         TheoreticalParams, balanced_fast_ppr, detect_high,
                         fast_ppr, local_update, monte_carlo,
                         theoretical_fast_ppr)
from .frontier import FrontierResult, balanced_frontier, frontier_push
from .graph import (Graph, GraphFormatError, degrees, from_edges,
                    load_edge_list, load_edge_list_path, to_edge_list_text)
from .oracle import (FrontierStore, PprVector, brute_force_walk_enum,
                     dense_ppr_matrix, exact_inverse_ppr, global_pagerank,
                     power_iteration_ppr, precompute_frontiers,
                     query_with_store)
from .walks import RngStream, WalkOutcome, sample_geometric, target_avoiding_score, walk_first_hit

__version__ = "0.1.0"

__all__ = [
    "ACCEPT", "REJECT", "Estimate", "QueryParams", "TheoreticalParams",
    "Graph", "GraphFormatError", "FrontierResult", "FrontierStore",
    "PprVector", "RngStream", "WalkOutcome",
    "balanced_fast_ppr", "balanced_frontier", "brute_force_walk_enum",
    "degrees", "dense_ppr_matrix", "detect_high", "exact_inverse_ppr",
    "fast_ppr", "from_edges", "frontier_push", "global_pagerank",
    "load_edge_list", "load_edge_list_path", "local_update", "monte_carlo",
    "power_iteration_ppr", "precompute_frontiers", "query_with_store",
    "sample_geometric", "target_avoiding_score", "theoretical_fast_ppr",
    "to_edge_list_text", "walk_first_hit",
]
