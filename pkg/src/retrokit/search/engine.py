"""Multi-step search engines: MCTS and best-first (Retro* style).

Both share the expansion machinery and the AND-OR graph; they differ
only in how the next molecule to expand is chosen.  With no time limit
and ``return_first`` off, both run until every reachable molecule within
the depth budget is expanded, so they enumerate the same route set.
"""

from __future__ import annotations

import math
import time

from ..buyables import BuyablesView
from ..chem import ChemError, parse_smiles, write_canonical_smiles
from ..onestep import (
    ReactionCorpus,
    StrategyConfig,
    Suggestion,
    TemplateStore,
    one_step_expand,
)
from .graph import ChemNode, RxnNode, SearchConfig, SearchGraph, uct_score


class TargetUnparsable(ChemError):
    pass


class Expander:
    """One-step expansion facade bound to stores, bans, and settings."""

    def __init__(
        self,
        store: TemplateStore | None,
        corpus: ReactionCorpus | None = None,
        strategies: tuple[str, ...] = ("template_relevance",),
        strategy_config: StrategyConfig | None = None,
        buyables: BuyablesView | None = None,
        banned_chemicals: frozenset = frozenset(),
        banned_reactions: frozenset = frozenset(),
    ):
        self.store = store
        self.corpus = corpus
        self.strategies = tuple(strategies)
        self.strategy_config = strategy_config or StrategyConfig()
        self.buyables = buyables
        self.banned_chemicals = banned_chemicals
        self.banned_reactions = banned_reactions

    def expand(self, smiles: str) -> list[Suggestion]:
        return one_step_expand(
            parse_smiles(smiles),
            list(self.strategies),
            self.strategy_config,
            self.store,
            self.corpus,
            self.buyables,
            self.banned_chemicals,
            self.banned_reactions,
        )


class _Engine:
    def __init__(self, target: str, cfg: SearchConfig, expander: Expander,
                 buyables: BuyablesView):
        try:
            mol = parse_smiles(target)
            canonical = write_canonical_smiles(mol)
        except ChemError as exc:
            raise TargetUnparsable(str(exc)) from exc
        self.cfg = cfg
        self.expander = expander
        self.buyables = buyables
        self.graph = SearchGraph(canonical, cfg)
        root = self.graph.root
        if buyables.is_buyable(canonical):
            root.buyable = True
            root.proven = True
            root.value = 1.0
        self.start_time = time.monotonic()

    # -- shared plumbing -------------------------------------------------

    def _timed_out(self) -> bool:
        limit = self.cfg.expansion_time_s
        return limit is not None and time.monotonic() - self.start_time >= limit

    def _should_stop(self) -> bool:
        if self._timed_out():
            return True
        if self.cfg.return_first and self.graph.root.proven:
            return True
        return False

    def _expand_node(self, node: ChemNode) -> None:
        """Instantiate the top suggestions as reaction children."""
        graph = self.graph
        node.expanded = True
        graph.expansions += 1
        suggestions = self.expander.expand(node.smiles)
        changed: list[ChemNode] = []
        added = 0
        for suggestion in suggestions:
            if added >= self.cfg.max_branching:
                break
            new_needed = sum(
                1 for p in set(suggestion.precursors) if p not in graph.nodes
            )
            if graph.chem_count + new_needed > self.cfg.max_chemicals:
                graph.dropped_suggestions += 1
                continue
            children = []
            for precursor in suggestion.precursors:
                child = graph.get_or_create(
                    precursor,
                    node.depth + 1,
                    buyable=self.buyables.is_buyable(precursor),
                )
                children.append(child)
            rxn = RxnNode(
                index=graph.rxn_count,
                parent=node,
                children=children,
                s_r=suggestion.rank_score,
                plausibility=suggestion.plausibility,
                template_ids=suggestion.template_ids,
                provenance=suggestion.strategy_provenance,
                precedent_ids=suggestion.precedent_reaction_ids,
            )
            graph.rxn_count += 1
            node.reactions.append(rxn)
            for child in children:
                child.parents.append(rxn)
            rxn.recompute_value()
            changed.extend(children)
            added += 1
        node.recompute_value()
        graph.propagate_values([node])
        # Every new reaction's children are in `changed`, so this also
        # marks reactions whose precursors were all proven on arrival.
        graph.propagate_proven([c for c in changed if c.proven])

    # -- MCTS ------------------------------------------------------------

    def run_mcts(self) -> SearchGraph:
        graph = self.graph
        root = graph.root
        while not self._should_stop():
            if graph.chem_count >= self.cfg.max_chemicals:
                break
            open_nodes = graph.open_set()
            if root.smiles not in open_nodes:
                break
            path = self._select(open_nodes)
            if path is None:
                break
            chems, rxns = path
            leaf = chems[-1]
            self._expand_node(leaf)
            for chem in chems:
                chem.visit_count += 1
            for rxn in rxns:
                rxn.n_r += 1
        return graph

    def _select(self, open_nodes: set[str]) -> tuple[list[ChemNode], list[RxnNode]] | None:
        """Descend via UCT through open branches to an expandable node.

        At each chemical: best-UCT reaction child with an open, not yet
        visited chemical; at each reaction: the lowest-value unproven
        such child, falling back to any open one when the unproven ones
        are closed off.  Ties break by insertion order.

        Shared nodes make the graph cyclic, so the walk never revisits a
        chemical within one descent; if that strands it in a branch
        whose only open descendants sit behind the path itself, it falls
        back to the oldest expandable node outright, which keeps
        exhaustive runs exhaustive.
        """
        graph = self.graph
        node = graph.root
        chems = [node]
        rxns: list[RxnNode] = []
        visited = {node.smiles}
        while True:
            if graph.expandable(node):
                return chems, rxns
            candidates = [
                r
                for r in node.reactions
                if any(
                    c.smiles in open_nodes and c.smiles not in visited
                    for c in r.children
                )
            ]
            if not candidates:
                return self._fallback_selection()
            best = max(
                candidates,
                key=lambda r: (
                    uct_score(r.s_r, r.v_r, r.n_r, node.visit_count,
                              self.cfg.exploration_c),
                    -r.index,
                ),
            )
            rxns.append(best)
            open_children = [
                c
                for c in best.children
                if c.smiles in open_nodes and c.smiles not in visited
            ]
            unproven = [c for c in open_children if not c.proven]
            pool = unproven or open_children
            node = min(pool, key=lambda c: (c.value, c.index))
            visited.add(node.smiles)
            chems.append(node)

    def _fallback_selection(self) -> tuple[list[ChemNode], list[RxnNode]] | None:
        expandable = [
            n for n in self.graph.nodes.values() if self.graph.expandable(n)
        ]
        if not expandable:
            return None
        oldest = min(expandable, key=lambda n: n.index)
        return [oldest], []

    # -- best-first (Retro* style) ----------------------------------------

    def run_retro_star(self) -> SearchGraph:
        graph = self.graph
        while not self._should_stop():
            frontier = [n for n in graph.nodes.values() if graph.expandable(n)]
            if not frontier:
                break
            if graph.chem_count >= self.cfg.max_chemicals:
                break
            costs = self._proof_costs()
            context = self._context_costs(costs)
            best = min(
                frontier,
                key=lambda n: (context.get(n.smiles, math.inf), n.index),
            )
            self._expand_node(best)
        return graph

    def _proof_costs(self) -> dict[str, float]:
        """Bottom-up cheapest proof cost per molecule.

        Buyables cost 0; unexpanded molecules use the admissible 0
        heuristic; expanded ones take the best reaction cost plus the
        children's costs.  Computed by relaxation to a fixpoint.
        """
        graph = self.graph
        costs: dict[str, float] = {}
        for node in graph.nodes.values():
            if node.buyable or graph.expandable(node):
                costs[node.smiles] = 0.0
            else:
                costs[node.smiles] = math.inf
        changed = True
        while changed:
            changed = False
            for node in graph.nodes.values():
                if node.buyable or graph.expandable(node):
                    continue
                best = math.inf
                for rxn in node.reactions:
                    total = rxn.cost()
                    for child in rxn.children:
                        total += costs[child.smiles]
                        if total == math.inf:
                            break
                    best = min(best, total)
                if best < costs[node.smiles]:
                    costs[node.smiles] = best
                    changed = True
        return costs

    def _context_costs(self, costs: dict[str, float]) -> dict[str, float]:
        """Top-down estimated total route cost through each molecule."""
        graph = self.graph
        context = {graph.root.smiles: 0.0}
        work = [graph.root]
        while work:
            node = work.pop()
            base = context[node.smiles]
            for rxn in node.reactions:
                total = base + rxn.cost()
                child_sum = 0.0
                for child in rxn.children:
                    child_sum += costs[child.smiles]
                if math.isinf(child_sum) or math.isinf(total):
                    continue
                total += child_sum
                for child in rxn.children:
                    through = total - costs[child.smiles]
                    if through < context.get(child.smiles, math.inf) - 1e-15:
                        context[child.smiles] = through
                        work.append(child)
        return context


def mcts_search(target: str, cfg: SearchConfig, expander: Expander,
                buyables: BuyablesView) -> SearchGraph:
    """Select-expand-update loop over the AND-OR graph, no rollout."""
    return _Engine(target, cfg, expander, buyables).run_mcts()


def retro_star_search(target: str, cfg: SearchConfig, expander: Expander,
                      buyables: BuyablesView) -> SearchGraph:
    """Best-first expansion minimizing the estimated total proof cost."""
    return _Engine(target, cfg, expander, buyables).run_retro_star()


def run_search(target: str, cfg: SearchConfig, expander: Expander,
               buyables: BuyablesView) -> SearchGraph:
    if cfg.algorithm == "retro_star":
        return retro_star_search(target, cfg, expander, buyables)
    return mcts_search(target, cfg, expander, buyables)
