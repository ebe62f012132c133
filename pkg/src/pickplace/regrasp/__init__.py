from .edges import RegraspEdgeCache, check_regrasp, build_edge_cache
from .fixture import PlacementFixture, place_check
from .graph import RegraspGraph, Plan, build_graph, shortest_path, min_handoff_counts

__all__ = [
    "RegraspEdgeCache", "check_regrasp", "build_edge_cache",
    "PlacementFixture", "place_check", "RegraspGraph", "Plan",
    "build_graph", "shortest_path", "min_handoff_counts",
]
