"""One-step retrosynthetic expansion.

Two strategies produce scored precursor suggestions for a target:

* ``template_relevance`` scores every stored template by its precedent
  count prior and applies the best ones until the count or cumulative
  probability budget runs out.
* ``retrosim`` retrieves the most similar precedent reactions by product
  fingerprint and re-applies their stored templates, scoring by the
  product of the two similarity terms.

Suggestions from any mix of strategies are merged on their canonical
precursor sets, filtered by a plausibility heuristic, reranked by
buyability and complexity, and optionally clustered.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .buyables import BuyablesView
from .chem import (
    Fingerprint,
    MolGraph,
    RetroTemplate,
    apply_retro_template,
    canonicalize,
    morgan_fingerprint,
    parse_retro_template,
    parse_smiles,
    tanimoto,
    union_fingerprint,
    write_canonical_smiles,
)

TEMPLATE_RELEVANCE = "template_relevance"
RETROSIM = "retrosim"
USER = "user"


class EmptyCorpus(ValueError):
    pass


class ReactingAtomsUnavailable(LookupError):
    """The suggestion has no recorded pattern match (e.g. user-added)."""


@dataclass(frozen=True)
class StrategyConfig:
    max_num_templates: int = 1000
    max_cum_prob: float = 0.999
    retrosim_k: int = 10
    filter_threshold: float = 0.001
    top_n_returned: int = 5
    cluster_cutoff: float = 0.3

    def __post_init__(self):
        if not 0 < self.max_cum_prob <= 1:
            raise ValueError("max_cum_prob must be in (0, 1]")
        if not 0 <= self.filter_threshold <= 1:
            raise ValueError("filter_threshold must be in [0, 1]")
        if not 0 <= self.cluster_cutoff <= 1:
            raise ValueError("cluster_cutoff must be in [0, 1]")
        if self.max_num_templates < 1 or self.retrosim_k < 1 or self.top_n_returned < 1:
            raise ValueError("count limits must be positive")


@dataclass(frozen=True)
class Suggestion:
    """One proposed precursor set, with provenance and scores.

    ``precursors`` are canonical SMILES, sorted.  ``reacting_atoms`` is
    the union footprint of the product-pattern matches that produced the
    set, or None for suggestions without a match record.
    """

    precursors: tuple[str, ...]
    rank_score: float
    strategy_provenance: frozenset = frozenset()
    template_ids: frozenset = frozenset()
    precedent_reaction_ids: frozenset = frozenset()
    plausibility: float = 0.0
    reacting_atoms: frozenset | None = None
    cluster_id: int | None = None


@dataclass(frozen=True)
class CorpusReaction:
    reaction_id: str
    reactants: tuple[str, ...]
    product: str
    template_id: str
    product_fp: Fingerprint
    reactants_fp: Fingerprint


class TemplateStore:
    """Retro templates with precedent-count priors."""

    def __init__(self, templates: list[RetroTemplate] | None = None):
        self._templates: list[RetroTemplate] = []
        self._by_id: dict[str, RetroTemplate] = {}
        for template in templates or []:
            self.add(template)

    def add(self, template: RetroTemplate) -> None:
        if template.id in self._by_id:
            raise ValueError(f"duplicate template id {template.id!r}")
        self._templates.append(template)
        self._by_id[template.id] = template

    def __len__(self) -> int:
        return len(self._templates)

    def __iter__(self):
        return iter(self._templates)

    def get(self, template_id: str) -> RetroTemplate | None:
        return self._by_id.get(template_id)

    def priors(self) -> list[tuple[RetroTemplate, float]]:
        """Templates with prior p(t) = count / total, best first.

        Ties break by insertion order, which keeps expansion
        deterministic.
        """
        total = sum(t.precedent_count for t in self._templates)
        if total == 0:
            return []
        indexed = list(enumerate(self._templates))
        indexed.sort(key=lambda pair: (-pair[1].precedent_count, pair[0]))
        return [(t, t.precedent_count / total) for _i, t in indexed]

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "TemplateStore":
        store = cls()
        with open(path, encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                try:
                    template = parse_retro_template(
                        rec["retro_smarts"],
                        template_id=rec["id"],
                        precedent_count=int(rec.get("count", 1)),
                        reference_ids=tuple(rec.get("references", [])),
                    )
                except Exception as exc:
                    raise ValueError(
                        f"{path}:{line_number}: bad template {rec.get('id')!r}: {exc}"
                    ) from exc
                store.add(template)
        return store


class ReactionCorpus:
    """Precedent reactions with a product fingerprint index."""

    def __init__(self, reactions: list[CorpusReaction] | None = None):
        self.reactions: list[CorpusReaction] = list(reactions or [])
        self._by_template: dict[str, list[CorpusReaction]] = {}
        self._by_id: dict[str, CorpusReaction] = {}
        for rxn in self.reactions:
            self._by_template.setdefault(rxn.template_id, []).append(rxn)
            self._by_id[rxn.reaction_id] = rxn

    def __len__(self) -> int:
        return len(self.reactions)

    def for_template(self, template_id: str) -> list[CorpusReaction]:
        return self._by_template.get(template_id, [])

    def by_id(self, reaction_id: str) -> CorpusReaction | None:
        return self._by_id.get(reaction_id)

    def nearest_products(
        self, fp: Fingerprint, k: int
    ) -> list[tuple[float, CorpusReaction]]:
        """The k corpus reactions whose products are most similar."""
        scored = [
            (tanimoto(fp, rxn.product_fp), i, rxn)
            for i, rxn in enumerate(self.reactions)
        ]
        scored.sort(key=lambda item: (-item[0], item[1]))
        return [(sim, rxn) for sim, _i, rxn in scored[:k]]

    @classmethod
    def from_jsonl(cls, path: str | Path) -> "ReactionCorpus":
        reactions = []
        with open(path, encoding="utf-8") as handle:
            for line_number, line in enumerate(handle, start=1):
                line = line.strip()
                if not line:
                    continue
                rec = json.loads(line)
                try:
                    lhs, rhs = rec["rxn_smiles"].split(">>")
                    reactants = tuple(sorted(canonicalize(lhs).split(".")))
                    product = canonicalize(rhs)
                except Exception as exc:
                    raise ValueError(
                        f"{path}:{line_number}: bad reaction "
                        f"{rec.get('reaction_id')!r}: {exc}"
                    ) from exc
                reactions.append(
                    CorpusReaction(
                        reaction_id=rec["reaction_id"],
                        reactants=reactants,
                        product=product,
                        template_id=rec["template_id"],
                        product_fp=morgan_fingerprint(parse_smiles(product)),
                        reactants_fp=_set_fingerprint(reactants),
                    )
                )
        return cls(reactions)


def _set_fingerprint(smiles_set: tuple[str, ...]) -> Fingerprint:
    fps = [morgan_fingerprint(parse_smiles(s)) for s in smiles_set]
    return union_fingerprint(fps)


_SET_FP_CACHE: dict[tuple[str, ...], Fingerprint] = {}


def _cached_set_fingerprint(smiles_set: tuple[str, ...]) -> Fingerprint:
    fp = _SET_FP_CACHE.get(smiles_set)
    if fp is None:
        fp = _set_fingerprint(smiles_set)
        if len(_SET_FP_CACHE) > 50000:
            _SET_FP_CACHE.clear()
        _SET_FP_CACHE[smiles_set] = fp
    return fp


# Molecules are immutable and applications are pure, so both cache
# safely across expansions; keys use the template text rather than its
# id because ids are only unique within one store.
_APPLY_CACHE: dict[tuple[str, str], "TemplateApplication"] = {}


def _cached_application(template: RetroTemplate, mol: MolGraph, mol_key: str):
    key = (template.text or template.id, mol_key)
    app = _APPLY_CACHE.get(key)
    if app is None:
        app = apply_retro_template(template, mol)
        if len(_APPLY_CACHE) > 20000:
            _APPLY_CACHE.clear()
        _APPLY_CACHE[key] = app
    return app


def expand_template_relevance(
    target: MolGraph, cfg: StrategyConfig, store: TemplateStore
) -> list[Suggestion]:
    """Apply templates in descending prior order within the budget.

    A template that crosses the cumulative probability threshold is still
    applied before the cutoff takes effect.  Inapplicable templates are
    skipped but count toward both budgets.
    """
    suggestions: list[Suggestion] = []
    cumulative = 0.0
    applied = 0
    target_key = write_canonical_smiles(target)
    for template, prior in store.priors():
        if applied >= cfg.max_num_templates:
            break
        applied += 1
        application = _cached_application(template, target, target_key)
        for outcome in application.outcomes:
            suggestions.append(
                Suggestion(
                    precursors=outcome.smiles,
                    rank_score=prior,
                    strategy_provenance=frozenset({TEMPLATE_RELEVANCE}),
                    template_ids=frozenset({template.id}),
                    reacting_atoms=outcome.matched_atoms,
                )
            )
        cumulative += prior
        if cumulative > cfg.max_cum_prob:
            break
    return suggestions


def expand_retrosim(
    target: MolGraph,
    cfg: StrategyConfig,
    corpus: ReactionCorpus,
    store: TemplateStore,
) -> list[Suggestion]:
    """Retrieve similar precedents and re-apply their stored templates.

    The rank score is the product of target-to-precedent-product and
    precursors-to-precedent-reactants similarities.
    """
    if len(corpus) == 0:
        raise EmptyCorpus("retrosim requires a non-empty reaction corpus")
    target_key = write_canonical_smiles(target)
    target_fp = _cached_set_fingerprint((target_key,))
    suggestions: list[Suggestion] = []
    for product_sim, precedent in corpus.nearest_products(target_fp, cfg.retrosim_k):
        template = store.get(precedent.template_id)
        if template is None:
            continue
        application = _cached_application(template, target, target_key)
        for outcome in application.outcomes:
            precursor_sim = tanimoto(
                _cached_set_fingerprint(outcome.smiles), precedent.reactants_fp
            )
            suggestions.append(
                Suggestion(
                    precursors=outcome.smiles,
                    rank_score=product_sim * precursor_sim,
                    strategy_provenance=frozenset({RETROSIM}),
                    template_ids=frozenset({template.id}),
                    precedent_reaction_ids=frozenset({precedent.reaction_id}),
                    reacting_atoms=outcome.matched_atoms,
                )
            )
    return suggestions


def make_manual_suggestion(precursors: list[str]) -> Suggestion:
    """A user-provided precursor set: full rank and plausibility, no
    template provenance."""
    canonical = tuple(sorted(canonicalize(p) for p in precursors))
    return Suggestion(
        precursors=canonical,
        rank_score=1.0,
        strategy_provenance=frozenset({USER}),
        plausibility=1.0,
    )


def score_plausibility(
    target: MolGraph,
    suggestion: Suggestion,
    corpus: ReactionCorpus | None,
    store: TemplateStore | None = None,
    target_fp: Fingerprint | None = None,
) -> float:
    """Deterministic plausibility heuristic in [0, 1].

    Best precedent agreement wins: the maximum over the suggestion's
    resolvable precedents of sim(target, precedent product) *
    sim(precursors, precedent reactants).  Falls back to the best
    template prior when no precedent resolves, and to the existing
    plausibility (user suggestions carry 1.0) when there is nothing to
    score against.
    """
    precedents: list[CorpusReaction] = []
    if corpus is not None:
        for template_id in suggestion.template_ids:
            precedents.extend(corpus.for_template(template_id))
        for reaction_id in suggestion.precedent_reaction_ids:
            rxn = corpus.by_id(reaction_id)
            if rxn is not None:
                precedents.append(rxn)
    if precedents:
        if target_fp is None:
            target_fp = morgan_fingerprint(target)
        set_fp = _cached_set_fingerprint(suggestion.precursors)
        return max(
            tanimoto(target_fp, rxn.product_fp) * tanimoto(set_fp, rxn.reactants_fp)
            for rxn in precedents
        )
    if store is not None and suggestion.template_ids:
        priors = dict(
            (t.id, p) for t, p in store.priors() if t.id in suggestion.template_ids
        )
        if priors:
            return max(priors.values())
    return suggestion.plausibility


def with_plausibility(
    target: MolGraph,
    suggestions: list[Suggestion],
    corpus: ReactionCorpus | None,
    store: TemplateStore | None = None,
) -> list[Suggestion]:
    target_fp = morgan_fingerprint(target) if suggestions else None
    return [
        replace(
            s,
            plausibility=score_plausibility(target, s, corpus, store, target_fp),
        )
        for s in suggestions
    ]


_COMPLEXITY_CACHE: dict[str, int] = {}


def _complexity(smiles: str) -> int:
    value = _COMPLEXITY_CACHE.get(smiles)
    if value is None:
        mol = parse_smiles(smiles)
        value = mol.heavy_atom_count + mol.ring_count
        if len(_COMPLEXITY_CACHE) > 50000:
            _COMPLEXITY_CACHE.clear()
        _COMPLEXITY_CACHE[smiles] = value
    return value


def merge_and_rerank(
    lists: list[list[Suggestion]],
    buyables: BuyablesView | None,
    cfg: StrategyConfig,
) -> list[Suggestion]:
    """Merge multi-strategy suggestions, filter, and order them.

    Duplicate precursor sets union their provenance and metadata and
    keep their best scores.  Entries below the plausibility threshold
    are dropped.  Order: rank score, then buyable fraction, then total
    complexity, then first appearance.
    """
    merged: dict[tuple[str, ...], Suggestion] = {}
    first_seen: dict[tuple[str, ...], int] = {}
    counter = 0
    for suggestions in lists:
        for s in suggestions:
            counter += 1
            key = s.precursors
            if key not in merged:
                merged[key] = s
                first_seen[key] = counter
                continue
            old = merged[key]
            atoms = old.reacting_atoms
            if s.reacting_atoms is not None:
                atoms = (atoms or frozenset()) | s.reacting_atoms
            merged[key] = replace(
                old,
                rank_score=max(old.rank_score, s.rank_score),
                plausibility=max(old.plausibility, s.plausibility),
                strategy_provenance=old.strategy_provenance | s.strategy_provenance,
                template_ids=old.template_ids | s.template_ids,
                precedent_reaction_ids=(
                    old.precedent_reaction_ids | s.precedent_reaction_ids
                ),
                reacting_atoms=atoms,
            )

    survivors = [
        s for s in merged.values() if s.plausibility >= cfg.filter_threshold
    ]

    def buyable_fraction(s: Suggestion) -> float:
        if buyables is None or not s.precursors:
            return 0.0
        hits = sum(1 for p in s.precursors if buyables.is_buyable(p))
        return hits / len(s.precursors)

    survivors.sort(
        key=lambda s: (
            -s.rank_score,
            -buyable_fraction(s),
            sum(_complexity(p) for p in s.precursors),
            first_seen[s.precursors],
        )
    )
    return survivors


def cluster_precursors(
    suggestions: list[Suggestion], cutoff: float = 0.3
) -> list[Suggestion]:
    """Single-linkage clusters on Tanimoto distance of precursor sets.

    Two suggestions join one cluster when 1 - similarity <= cutoff;
    cluster ids are numbered by first appearance.
    """
    n = len(suggestions)
    if n == 0:
        return []
    fps = [_cached_set_fingerprint(s.precursors) for s in suggestions]
    parent = list(range(n))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if 1.0 - tanimoto(fps[i], fps[j]) <= cutoff:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    cluster_ids: dict[int, int] = {}
    out = []
    for i, s in enumerate(suggestions):
        root = find(i)
        if root not in cluster_ids:
            cluster_ids[root] = len(cluster_ids)
        out.append(replace(s, cluster_id=cluster_ids[root]))
    return out


def reacting_atoms(target: MolGraph, suggestion: Suggestion) -> frozenset:
    """Product-atom footprint of the matches behind a suggestion."""
    if suggestion.reacting_atoms is None:
        raise ReactingAtomsUnavailable(
            "suggestion carries no pattern match record"
        )
    return suggestion.reacting_atoms


def one_step_expand(
    target: MolGraph,
    strategies: list[str],
    cfg: StrategyConfig,
    store: TemplateStore | None,
    corpus: ReactionCorpus | None,
    buyables: BuyablesView | None,
    banned_chemicals: frozenset = frozenset(),
    banned_reactions: frozenset = frozenset(),
) -> list[Suggestion]:
    """Full expansion pipeline: strategies, plausibility, merge, bans,
    clustering."""
    target_smiles = write_canonical_smiles(target)
    lists = []
    for name in strategies:
        if name == TEMPLATE_RELEVANCE:
            if store is None:
                raise ValueError("template_relevance strategy needs a template store")
            lists.append(expand_template_relevance(target, cfg, store))
        elif name == RETROSIM:
            if corpus is None or store is None:
                raise ValueError("retrosim strategy needs a corpus and template store")
            lists.append(expand_retrosim(target, cfg, corpus, store))
        else:
            raise KeyError(f"unknown strategy {name!r}")
    lists = [with_plausibility(target, chunk, corpus, store) for chunk in lists]
    merged = merge_and_rerank(lists, buyables, cfg)
    if banned_chemicals or banned_reactions:
        merged = [
            s
            for s in merged
            if not any(p in banned_chemicals for p in s.precursors)
            and reaction_key(s.precursors, target_smiles) not in banned_reactions
        ]
    return cluster_precursors(merged, cfg.cluster_cutoff)


def reaction_key(precursors: tuple[str, ...], product: str) -> str:
    """Canonical ban-list key for a reaction: sorted precursors >> product."""
    return ".".join(sorted(precursors)) + ">>" + product
