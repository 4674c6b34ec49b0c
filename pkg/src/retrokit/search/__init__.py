"""Multi-step retrosynthetic search over AND-OR graphs."""

from .graph import (
    ChemNode,
    DomainError,
    RxnNode,
    SearchConfig,
    SearchGraph,
    serialize_graph,
    uct_score,
)
from .engine import (
    Expander,
    TargetUnparsable,
    mcts_search,
    retro_star_search,
    run_search,
)
from .routes import Route, RouteChem, RouteReaction, enumerate_routes, serialize_route

__all__ = [
    "ChemNode",
    "DomainError",
    "Expander",
    "Route",
    "RouteChem",
    "RouteReaction",
    "RxnNode",
    "SearchConfig",
    "SearchGraph",
    "TargetUnparsable",
    "enumerate_routes",
    "mcts_search",
    "retro_star_search",
    "run_search",
    "serialize_graph",
    "serialize_route",
    "uct_score",
]
