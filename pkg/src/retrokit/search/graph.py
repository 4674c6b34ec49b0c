"""AND-OR search graph shared by the MCTS and best-first algorithms.

Chemical nodes are OR nodes (any one reaction proves them); reaction
nodes are AND nodes (every precursor must be proven).  Identical
molecules at different tree positions share a single chemical node, so
the structure is a graph; route extraction re-imposes per-path acyclicity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class DomainError(ValueError):
    """Inputs outside the defined domain of a scoring formula."""


def uct_score(s_r: float, v_r: float, n_r: int, n_parent: int, c: float) -> float:
    """Upper-confidence score of a reaction node.

    Exploitation is s_r * v_r / n_r; exploration is c * sqrt(ln N / n_r)
    with N the parent chemical's visit count.
    """
    if n_r < 1 or n_parent < 1:
        raise DomainError(
            f"visit counts must be >= 1 (n_r={n_r}, N_parent={n_parent})"
        )
    return (s_r * v_r) / n_r + c * math.sqrt(math.log(n_parent) / n_r)


@dataclass(frozen=True)
class SearchConfig:
    algorithm: str = "mcts"
    max_depth: int = 6
    max_branching: int = 25
    max_chemicals: int = 5000
    max_price: float = 100.0
    expansion_time_s: float | None = None
    exploration_c: float = 1.0
    return_first: bool = False
    max_routes: int = 200
    random_seed: int = 0
    strategies: tuple[str, ...] = ("template_relevance",)

    def __post_init__(self):
        if self.algorithm not in ("mcts", "retro_star"):
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        for name in ("max_depth", "max_branching", "max_chemicals", "max_routes"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_price <= 0:
            raise ValueError("max_price must be positive")
        if self.expansion_time_s is not None and self.expansion_time_s <= 0:
            raise ValueError("expansion_time_s must be positive")
        if self.exploration_c < 0:
            raise ValueError("exploration_c must be >= 0")


class RxnNode:
    """AND node: one suggested reaction under a parent chemical."""

    __slots__ = (
        "index", "parent", "children", "s_r", "plausibility",
        "template_ids", "provenance", "precedent_ids",
        "n_r", "v_r", "proven",
    )

    def __init__(self, index, parent, children, s_r, plausibility,
                 template_ids, provenance, precedent_ids):
        self.index = index
        self.parent = parent
        self.children: list[ChemNode] = children
        self.s_r = s_r
        self.plausibility = plausibility
        self.template_ids = template_ids
        self.provenance = provenance
        self.precedent_ids = precedent_ids
        self.n_r = 1
        self.v_r = 0.0
        self.proven = False

    def recompute_value(self) -> None:
        self.v_r = sum(c.value for c in self.children) / len(self.children)

    def cost(self) -> float:
        """Best-first edge cost, -ln of the reaction score."""
        return -math.log(max(self.s_r, 1e-12))

    def precursor_smiles(self) -> tuple[str, ...]:
        return tuple(sorted(c.smiles for c in self.children))


class ChemNode:
    """OR node: one molecule, shared across every position it occurs."""

    __slots__ = (
        "smiles", "index", "depth", "visit_count", "buyable", "proven",
        "expanded", "value", "reactions", "parents",
    )

    def __init__(self, smiles: str, index: int, depth: int, buyable: bool):
        self.smiles = smiles
        self.index = index
        self.depth = depth
        self.visit_count = 1
        self.buyable = buyable
        self.proven = buyable
        self.expanded = False
        self.value = 1.0 if buyable else 0.0
        self.reactions: list[RxnNode] = []
        self.parents: list[RxnNode] = []

    def recompute_value(self) -> None:
        if self.buyable:
            self.value = 1.0
        elif self.reactions:
            self.value = max(r.s_r * r.v_r for r in self.reactions)
        else:
            self.value = 0.0


class SearchGraph:
    """The whole AND-OR structure plus run statistics."""

    def __init__(self, target_smiles: str, config: SearchConfig):
        self.config = config
        self.nodes: dict[str, ChemNode] = {}
        self.rxn_count = 0
        self.expansions = 0
        self.dropped_suggestions = 0
        self.root = self._new_chem(target_smiles, 0, buyable=False)

    def _new_chem(self, smiles: str, depth: int, buyable: bool) -> ChemNode:
        node = ChemNode(smiles, len(self.nodes), depth, buyable)
        self.nodes[smiles] = node
        return node

    def get_or_create(self, smiles: str, depth: int, buyable: bool) -> ChemNode:
        node = self.nodes.get(smiles)
        if node is None:
            return self._new_chem(smiles, depth, buyable)
        if depth < node.depth:
            self._relax_depth(node, depth)
        return node

    def _relax_depth(self, node: ChemNode, depth: int) -> None:
        node.depth = depth
        for rxn in node.reactions:
            for child in rxn.children:
                if depth + 1 < child.depth:
                    self._relax_depth(child, depth + 1)

    @property
    def chem_count(self) -> int:
        return len(self.nodes)

    def expandable(self, node: ChemNode) -> bool:
        return (
            not node.expanded
            and not node.buyable
            and node.depth < self.config.max_depth
        )

    def open_set(self) -> set[str]:
        """Chemicals from which an expandable node is still reachable.

        Computed by walking parent links upward from every expandable
        node; used to steer selection and detect exhaustion.
        """
        open_nodes: set[str] = set()
        stack = [n for n in self.nodes.values() if self.expandable(n)]
        for node in stack:
            open_nodes.add(node.smiles)
        while stack:
            node = stack.pop()
            for rxn in node.parents:
                parent = rxn.parent
                if parent.smiles not in open_nodes:
                    open_nodes.add(parent.smiles)
                    stack.append(parent)
        return open_nodes

    def propagate_values(self, seeds: list[ChemNode]) -> None:
        """Recompute v_r and chemical values upward from changed nodes.

        Values only increase after an expansion, so the worklist
        terminates even across shared-node cycles.
        """
        work = list(seeds)
        while work:
            node = work.pop()
            for rxn in node.parents:
                old = rxn.v_r
                rxn.recompute_value()
                parent = rxn.parent
                before = parent.value
                parent.recompute_value()
                if parent.value != before or rxn.v_r != old:
                    work.append(parent)

    def propagate_proven(self, seeds: list[ChemNode]) -> None:
        work = [n for n in seeds if n.proven]
        while work:
            node = work.pop()
            for rxn in node.parents:
                if rxn.proven:
                    continue
                if all(c.proven for c in rxn.children):
                    rxn.proven = True
                    parent = rxn.parent
                    if not parent.proven:
                        parent.proven = True
                        work.append(parent)

    def stats(self) -> dict:
        return {
            "chemicals": self.chem_count,
            "reactions": self.rxn_count,
            "expansions": self.expansions,
            "proven": self.root.proven,
        }


def serialize_graph(graph: SearchGraph) -> dict:
    """Nested document for export: chemicals and reactions alternate.

    Shared chemicals are re-emitted per position; a chemical already on
    the current path is emitted as a reference stub to cut cycles.
    """

    def chem_doc(node: ChemNode, path: frozenset) -> dict:
        doc = {
            "type": "chemical",
            "smiles": node.smiles,
            "attributes": {
                "buyable": node.buyable,
                "proven": node.proven,
                "depth": node.depth,
                "value": round(node.value, 9),
                "visit_count": node.visit_count,
                "expanded": node.expanded,
            },
        }
        if node.smiles in path:
            doc["attributes"]["cycle_ref"] = True
            doc["children"] = []
            return doc
        doc["children"] = [
            rxn_doc(rxn, path | {node.smiles}) for rxn in node.reactions
        ]
        return doc

    def rxn_doc(rxn: RxnNode, path: frozenset) -> dict:
        return {
            "type": "reaction",
            "id": f"rxn-{rxn.index}",
            "attributes": {
                "score": round(rxn.s_r, 9),
                "plausibility": round(rxn.plausibility, 9),
                "visit_count": rxn.n_r,
                "child_value_mean": round(rxn.v_r, 9),
                "proven": rxn.proven,
                "template_ids": sorted(rxn.template_ids),
                "provenance": sorted(rxn.provenance),
                "precedent_ids": sorted(rxn.precedent_ids),
            },
            "children": [chem_doc(c, path) for c in rxn.children],
        }

    return {
        "target": graph.root.smiles,
        "stats": graph.stats(),
        "tree": chem_doc(graph.root, frozenset()),
    }
