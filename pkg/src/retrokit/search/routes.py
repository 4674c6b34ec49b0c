"""Route extraction from a finished search graph.

A route is one acyclic synthesis tree: the target at the root, exactly
one reaction chosen per non-leaf chemical, every leaf buyable, and no
molecule repeated along any root-to-leaf path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .graph import ChemNode, SearchConfig, SearchGraph

_ENUMERATION_SAFETY_CAP = 100_000


@dataclass(frozen=True)
class RouteReaction:
    score: float
    plausibility: float
    template_ids: frozenset
    provenance: frozenset
    precedent_ids: frozenset
    children: tuple["RouteChem", ...]


@dataclass(frozen=True)
class RouteChem:
    smiles: str
    buyable: bool
    reaction: RouteReaction | None = None


@dataclass(frozen=True)
class Route:
    root: RouteChem

    def reactions(self) -> list[RouteReaction]:
        out = []

        def walk(chem: RouteChem) -> None:
            if chem.reaction is not None:
                out.append(chem.reaction)
                for child in chem.reaction.children:
                    walk(child)

        walk(self.root)
        return out

    def chemicals(self) -> list[RouteChem]:
        out = []

        def walk(chem: RouteChem) -> None:
            out.append(chem)
            if chem.reaction is not None:
                for child in chem.reaction.children:
                    walk(child)

        walk(self.root)
        return out

    def leaves(self) -> list[RouteChem]:
        return [c for c in self.chemicals() if c.reaction is None]

    def key(self):
        """Order-independent identity of the route tree."""

        def node_key(chem: RouteChem):
            if chem.reaction is None:
                return (chem.smiles,)
            return (
                chem.smiles,
                tuple(sorted(node_key(c) for c in chem.reaction.children)),
            )

        return node_key(self.root)


def enumerate_routes(graph: SearchGraph, cfg: SearchConfig | None = None) -> list[Route]:
    """All proven acyclic routes, sorted and truncated to max_routes.

    Sort order follows the pathway ranking rule: fewest reactions first,
    then highest average plausibility, then highest average reaction
    score, then discovery order.
    """
    cfg = cfg or graph.config
    counter = itertools.count()

    def subroutes(node: ChemNode, path: frozenset, budget: int) -> list[RouteChem]:
        if node.buyable:
            return [RouteChem(node.smiles, True)]
        if budget <= 0 or not node.reactions:
            return []
        results: list[RouteChem] = []
        next_path = path | {node.smiles}
        for rxn in node.reactions:
            if any(child.smiles in next_path for child in rxn.children):
                continue
            child_options = [
                subroutes(child, next_path, budget - 1) for child in rxn.children
            ]
            if any(not options for options in child_options):
                continue
            for combo in itertools.product(*child_options):
                results.append(
                    RouteChem(
                        node.smiles,
                        False,
                        RouteReaction(
                            score=rxn.s_r,
                            plausibility=rxn.plausibility,
                            template_ids=rxn.template_ids,
                            provenance=rxn.provenance,
                            precedent_ids=rxn.precedent_ids,
                            children=combo,
                        ),
                    )
                )
                if len(results) > _ENUMERATION_SAFETY_CAP:
                    return results
        return results

    roots = subroutes(graph.root, frozenset(), cfg.max_depth)
    routes = [(Route(root), next(counter)) for root in roots]

    def sort_key(item: tuple[Route, int]):
        route, order = item
        rxns = route.reactions()
        count = len(rxns)
        avg_plausibility = sum(r.plausibility for r in rxns) / count if count else 0.0
        avg_score = sum(r.score for r in rxns) / count if count else 0.0
        return (count, -avg_plausibility, -avg_score, order)

    routes.sort(key=sort_key)
    return [route for route, _order in routes[: cfg.max_routes]]


def serialize_route(route: Route, metrics: dict | None = None) -> dict:
    """Nested route document matching the graph export shape."""
    rxn_counter = itertools.count()

    def chem_doc(chem: RouteChem) -> dict:
        doc = {
            "type": "chemical",
            "smiles": chem.smiles,
            "attributes": {"buyable": chem.buyable},
            "children": [],
        }
        if chem.reaction is not None:
            rxn = chem.reaction
            doc["children"] = [
                {
                    "type": "reaction",
                    "id": f"step-{next(rxn_counter)}",
                    "attributes": {
                        "score": round(rxn.score, 9),
                        "plausibility": round(rxn.plausibility, 9),
                        "template_ids": sorted(rxn.template_ids),
                        "provenance": sorted(rxn.provenance),
                        "precedent_ids": sorted(rxn.precedent_ids),
                    },
                    "children": [chem_doc(c) for c in rxn.children],
                }
            ]
        return doc

    doc = chem_doc(route.root)
    if metrics is not None:
        doc["metrics"] = metrics
    return doc
