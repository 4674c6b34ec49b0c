"""Route metrics, ranking, and filtering.

Length for ranking purposes is the total reaction count; the longest
linear sequence (reactions on the deepest root-to-leaf path) is reported
separately and equals the route depth for tree-shaped routes.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .buyables import Catalog
from .chem import canonicalize, parse_smiles
from .search.routes import Route, RouteChem


@dataclass(frozen=True)
class RouteMetrics:
    depth: int
    reaction_count: int
    longest_linear_sequence: int
    avg_plausibility: float
    avg_template_score: float
    atom_economy: float
    starting_material_cost: float
    cost_is_lower_bound: bool = False

    def as_dict(self) -> dict:
        return asdict(self)


def compute_metrics(
    route: Route, catalog: Catalog | None = None, max_price: float = 100.0
) -> RouteMetrics:
    """Metrics for one route.

    Atom economy is the target weight over the summed leaf weights
    (counted once per use).  Leaves missing a catalog price contribute
    the price cap and mark the cost as a lower bound.
    """

    def depth_of(chem: RouteChem) -> int:
        if chem.reaction is None:
            return 0
        return 1 + max(depth_of(c) for c in chem.reaction.children)

    reactions = route.reactions()
    count = len(reactions)
    depth = depth_of(route.root)

    target_weight = parse_smiles(route.root.smiles).molecular_weight()
    leaf_weight = 0.0
    cost = 0.0
    lower_bound = False
    for leaf in route.leaves():
        leaf_weight += parse_smiles(leaf.smiles).molecular_weight()
        entry = catalog.lookup_canonical(leaf.smiles) if catalog is not None else None
        if entry is None:
            cost += max_price
            lower_bound = True
        else:
            cost += entry.price_per_gram

    return RouteMetrics(
        depth=depth,
        reaction_count=count,
        longest_linear_sequence=depth,
        avg_plausibility=(
            sum(r.plausibility for r in reactions) / count if count else 0.0
        ),
        avg_template_score=(
            sum(r.score for r in reactions) / count if count else 0.0
        ),
        atom_economy=target_weight / leaf_weight if leaf_weight else 1.0,
        starting_material_cost=cost,
        cost_is_lower_bound=lower_bound,
    )


def sort_routes(
    scored: list[tuple[Route, RouteMetrics]]
) -> list[tuple[Route, RouteMetrics]]:
    """Stable rank: fewest steps, best average plausibility, best
    average template score."""
    return sorted(
        scored,
        key=lambda pair: (
            pair[1].reaction_count,
            -pair[1].avg_plausibility,
            -pair[1].avg_template_score,
        ),
    )


@dataclass(frozen=True)
class RouteFilter:
    must_include: frozenset = frozenset()
    must_exclude: frozenset = frozenset()
    max_depth: int | None = None
    min_avg_plausibility: float | None = None

    @classmethod
    def from_raw(
        cls,
        must_include: list[str] | None = None,
        must_exclude: list[str] | None = None,
        max_depth: int | None = None,
        min_avg_plausibility: float | None = None,
    ) -> "RouteFilter":
        """Canonicalize criteria SMILES; raises on unparsable input."""
        return cls(
            must_include=frozenset(canonicalize(s) for s in must_include or []),
            must_exclude=frozenset(canonicalize(s) for s in must_exclude or []),
            max_depth=max_depth,
            min_avg_plausibility=min_avg_plausibility,
        )


def filter_routes(
    scored: list[tuple[Route, RouteMetrics]], criteria: RouteFilter
) -> list[tuple[Route, RouteMetrics]]:
    """Keep routes satisfying every criterion (conjunctive)."""
    out = []
    for route, metrics in scored:
        chemicals = {canonicalize(c.smiles) for c in route.chemicals()}
        if criteria.must_include and not criteria.must_include <= chemicals:
            continue
        if criteria.must_exclude and criteria.must_exclude & chemicals:
            continue
        if criteria.max_depth is not None and metrics.depth > criteria.max_depth:
            continue
        if (
            criteria.min_avg_plausibility is not None
            and metrics.avg_plausibility < criteria.min_avg_plausibility
        ):
            continue
        out.append((route, metrics))
    return out
