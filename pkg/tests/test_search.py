import json
import math
import random

import pytest

from retrokit.buyables import BuyablesView, Catalog
from retrokit.chem import canonicalize, parse_retro_template
from retrokit.datasets import load_buyables, load_corpus, load_templates
from retrokit.onestep import StrategyConfig, TemplateStore
from retrokit.search import (
    DomainError,
    Expander,
    SearchConfig,
    TargetUnparsable,
    enumerate_routes,
    mcts_search,
    retro_star_search,
    run_search,
    serialize_graph,
    serialize_route,
    uct_score,
)

from oracles import brute_force_route_keys


def make_catalog(smiles_list, price=1.0) -> Catalog:
    catalog = Catalog()
    catalog.import_entries(
        [{"smiles": s, "price_per_g": price} for s in smiles_list]
    )
    return catalog


def toy_world():
    """One template splits the ester target into two catalog molecules."""
    store = TemplateStore(
        [parse_retro_template("[C:1](=[O:2])O[C:3]>>[C:1](=[O:2])O.[C:3]O", "ester", 10)]
    )
    catalog = make_catalog(["CC(=O)O", "CCO"])
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, None, ("template_relevance",), StrategyConfig(), view)
    return store, view, expander


# -- UCT ---------------------------------------------------------------


def test_uct_worked_example():
    value = uct_score(0.5, 1.0, 2, 8, 1.0)
    assert value == pytest.approx(1.2697, abs=1e-4)


def test_uct_no_exploration_at_first_visit():
    assert uct_score(0.7, 0.5, 1, 1, 1.0) == pytest.approx(0.35)


def test_uct_zero():
    assert uct_score(0.9, 0.0, 3, 5, 0.0) == 0.0


def test_uct_domain_errors():
    with pytest.raises(DomainError):
        uct_score(0.5, 0.5, 0, 5, 1.0)
    with pytest.raises(DomainError):
        uct_score(0.5, 0.5, 1, 0, 1.0)


def test_uct_matches_closed_form_randomized():
    rng = random.Random(99)
    for _ in range(2000):
        s = rng.uniform(1e-6, 1.0)
        v = rng.uniform(0.0, 1.0)
        n = rng.randint(1, 10_000)
        big_n = rng.randint(1, 10_000)
        c = rng.uniform(0.0, 3.0)
        reference = s * v / n + c * math.sqrt(math.log(big_n) / n)
        assert abs(uct_score(s, v, n, big_n, c) - reference) < 1e-9


# -- MCTS and best-first behavior ---------------------------------------


def test_single_step_solve_mcts():
    _store, view, expander = toy_world()
    cfg = SearchConfig(max_depth=3)
    graph = mcts_search("CCOC(C)=O", cfg, expander, view)
    assert graph.root.proven
    assert graph.rxn_count == 1
    routes = enumerate_routes(graph, cfg)
    assert len(routes) == 1
    assert routes[0].reactions()[0].children[0].buyable


def test_single_step_solve_retro_star():
    _store, view, expander = toy_world()
    cfg = SearchConfig(algorithm="retro_star", max_depth=3)
    graph = retro_star_search("CCOC(C)=O", cfg, expander, view)
    assert graph.root.proven
    assert enumerate_routes(graph, cfg)


def test_max_chemicals_one_stops_before_expansion():
    _store, view, expander = toy_world()
    cfg = SearchConfig(max_chemicals=1)
    graph = mcts_search("CCOC(C)=O", cfg, expander, view)
    assert graph.chem_count == 1
    assert not graph.root.proven
    assert not graph.root.expanded


def test_buyable_target_returns_solitary_proven_root():
    _store, view, expander = toy_world()
    for algo in ("mcts", "retro_star"):
        graph = run_search("CCO", SearchConfig(algorithm=algo), expander, view)
        assert graph.root.proven and graph.root.buyable
        assert graph.chem_count == 1 and graph.rxn_count == 0


def test_unparsable_target():
    _store, view, expander = toy_world()
    with pytest.raises(TargetUnparsable):
        mcts_search("C1CC", SearchConfig(), expander, view)


def test_determinism_byte_identical_serialization():
    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig(max_depth=4, max_chemicals=200, random_seed=7)
    docs = []
    for _ in range(2):
        graph = mcts_search("CC(=O)Nc1ccc(O)cc1", cfg, expander, view)
        docs.append(json.dumps(serialize_graph(graph), sort_keys=True))
    assert docs[0] == docs[1]


def test_retro_star_prefers_cheaper_proof():
    # Two competing one-step solutions; the higher-score reaction is the
    # minimum-cost proof and must be expandable first.
    store = TemplateStore(
        [
            parse_retro_template("[C:1](=[O:2])O[C:3]>>[C:1](=[O:2])O.[C:3]O", "good", 9),
            parse_retro_template("[C:1][O:2][CH2:3]>>[C:1][O:2].Br[CH2:3]", "rare", 1),
        ]
    )
    catalog = make_catalog(["CC(=O)O", "CCO", "CCBr"])
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, None, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig(algorithm="retro_star", max_depth=2)
    graph = retro_star_search("CCOC(C)=O", cfg, expander, view)
    assert graph.root.proven
    routes = enumerate_routes(graph, cfg)
    assert routes
    best = routes[0].reactions()[0]
    assert -math.log(0.9) < -math.log(0.2)
    assert best.score == max(r.score for r in routes[0].reactions())


def test_route_invariants_on_bundled_targets():
    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig(max_depth=4, max_chemicals=500)
    graph = mcts_search("O=C(O)c1ccc(-c2ccccc2)cc1", cfg, expander, view)
    routes = enumerate_routes(graph, cfg)
    assert routes
    for route in routes:
        # Leaves buyable, depth bounded, acyclic per path.
        for leaf in route.leaves():
            assert view.is_buyable(leaf.smiles)
        def max_path_reactions(chem):
            if chem.reaction is None:
                return 0
            return 1 + max(max_path_reactions(c) for c in chem.reaction.children)
        assert max_path_reactions(route.root) <= cfg.max_depth

        def no_repeats(chem, seen):
            assert chem.smiles not in seen
            if chem.reaction is not None:
                for child in chem.reaction.children:
                    no_repeats(child, seen | {chem.smiles})
        no_repeats(route.root, frozenset())


def test_limits_honored_graph_wide():
    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig(max_depth=3, max_chemicals=40, max_branching=5)
    graph = mcts_search("NC(=O)OC(Cn1ncnn1)c1ccccc1Cl", cfg, expander, view)
    assert graph.chem_count <= cfg.max_chemicals
    for node in graph.nodes.values():
        assert len(node.reactions) <= cfg.max_branching
        assert node.depth <= cfg.max_depth


def test_v_r_equals_children_mean_after_search():
    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    graph = mcts_search(
        "CC(=O)Nc1ccc(O)cc1", SearchConfig(max_depth=3, max_chemicals=100),
        expander, view,
    )
    for node in graph.nodes.values():
        for rxn in node.reactions:
            mean = sum(c.value for c in rxn.children) / len(rxn.children)
            assert rxn.v_r == pytest.approx(mean, abs=1e-12)


def test_proven_monotone():
    # Once proven, deeper exploration must never unprove the root.
    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig(max_depth=4, max_chemicals=300)
    graph = mcts_search("CC(=O)Nc1ccc(O)cc1", cfg, expander, view)
    assert graph.root.proven


def test_return_first_stops_early():
    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    full = mcts_search(
        "CC(=O)Nc1ccc(O)cc1", SearchConfig(max_depth=4, max_chemicals=300),
        expander, view,
    )
    quick = mcts_search(
        "CC(=O)Nc1ccc(O)cc1",
        SearchConfig(max_depth=4, max_chemicals=300, return_first=True),
        expander, view,
    )
    assert quick.root.proven
    assert quick.expansions <= full.expansions


def test_route_serialization_shape():
    _store, view, expander = toy_world()
    cfg = SearchConfig(max_depth=2)
    graph = mcts_search("CCOC(C)=O", cfg, expander, view)
    route = enumerate_routes(graph, cfg)[0]
    doc = serialize_route(route, metrics={"depth": 1})
    assert doc["type"] == "chemical"
    assert doc["children"][0]["type"] == "reaction"
    assert doc["metrics"]["depth"] == 1


# -- oracle equivalence -------------------------------------------------

SYNTH_TEMPLATES = [
    "[C:1][N:2]>>[C:1]O.[N:2]",
    "[C:1][O:2]>>[C:1]Br.[O:2]",
    "[C:1](=[O:2])[C:3]>>[C:1](=[O:2])O.[C:3]",
    "[C:1]=[C:2]>>[C:1]Br.[C:2]Br",
    "[C:1][CH2:2][C:3]>>[C:1][CH2:2].[C:3]I",
    "[N:1][CH2:2]>>[N:1].[CH2:2]=O",
    "[C:1][OH:2]>>[C:1]Br.[OH2:2]",
    "[C:1]#[N:2]>>[C:1]Br.[N:2]",
    "[c:1][C:2]>>[c:1]Br.[C:2]O",
    "[c:1][N:2]>>[c:1]F.[N:2]",
]


def synthetic_case(seed: int):
    from retrokit.chem import apply_retro_template, parse_smiles

    rng = random.Random(seed)
    atoms = ["C", "C", "C", "N", "O"]
    if rng.random() < 0.25:
        tail = rng.choice(["CN", "CCO", "NC", "CC(C)O", "C#N"])
        parts = [tail, rng.choice(["c1ccccc1", "c1ccncc1", "c1ccoc1"])]
    else:
        n = rng.randint(4, 7)
        parts = []
        for i in range(n):
            if i and rng.random() < 0.2:
                parts.append("=")
                parts.append("C")
                continue
            parts.append(rng.choice(atoms))
            if rng.random() < 0.25 and i < n - 1:
                parts.append("(" + rng.choice(["C", "N", "O"]) + ")")
    try:
        target = canonicalize("".join(parts))
    except Exception:
        return None
    chosen = rng.sample(SYNTH_TEMPLATES, rng.randint(2, 4))
    templates = [
        parse_retro_template(text, f"s{seed}-{i}", rng.randint(1, 9))
        for i, text in enumerate(chosen)
    ]

    # Reachable universe to depth 3 with the same cycle rule the
    # engines use.
    universe: set[str] = set()
    over_branching = False

    def explore(smiles, path, budget):
        nonlocal over_branching
        universe.add(smiles)
        if budget <= 0 or len(universe) > 30:
            return
        sets = set()
        for template in templates:
            for outcome in apply_retro_template(template, parse_smiles(smiles)).outcomes:
                sets.add(outcome.smiles)
        if len(sets) > 25:
            over_branching = True
            return
        for pset in sets:
            if any(p in path or p == smiles for p in pset):
                continue
            for p in pset:
                explore(p, path | {smiles}, budget - 1)

    explore(target, frozenset(), 3)
    if over_branching or len(universe) > 30 or len(universe) < 3:
        return None
    candidates = sorted(universe - {target})
    buyables = [s for s in candidates if rng.random() < 0.5]
    if not buyables:
        return None
    return target, templates, buyables


def test_search_oracle_equivalence_small():
    found = 0
    seed = 0
    while found < 6 and seed < 400:
        seed += 1
        case = synthetic_case(seed)
        if case is None:
            continue
        found += 1
        target, templates, buyables = case
        store = TemplateStore(templates)
        catalog = make_catalog(buyables)
        view = BuyablesView(catalog, 100.0)
        expander = Expander(
            store, None, ("template_relevance",),
            StrategyConfig(max_cum_prob=1.0, filter_threshold=0.0), view,
        )
        oracle = brute_force_route_keys(target, templates, view.is_buyable, 3)
        for algo in ("mcts", "retro_star"):
            cfg = SearchConfig(
                algorithm=algo, max_depth=3, max_chemicals=5000,
                max_branching=25, max_routes=100_000,
            )
            graph = run_search(target, cfg, expander, view)
            keys = {route.key() for route in enumerate_routes(graph, cfg)}
            assert keys == oracle, f"seed {seed} algo {algo}"
    assert found == 6


def test_expansion_time_limit_terminates():
    # A chain-splitting template over a long alkane explodes
    # combinatorially; the wall-clock limit must cut the search off.
    store = TemplateStore(
        [parse_retro_template("[CH2:1][CH2:2]>>[CH2:1]O.[CH2:2]O", "split", 1)]
    )
    catalog = make_catalog(["CO"])
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, None, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig(max_depth=6, max_chemicals=5000, expansion_time_s=0.2)
    import time as _time

    start = _time.monotonic()
    graph = mcts_search("C" * 30, cfg, expander, view)
    elapsed = _time.monotonic() - start
    assert elapsed < 5.0
    assert graph.chem_count < 5000


def test_cyclic_graph_serializes_and_enumerates():
    # Two templates that invert each other create a shared-node cycle:
    # alcohol <-> bromide.  Serialization must emit a cycle stub and
    # enumeration must respect the per-path repeat guard.
    store = TemplateStore(
        [
            parse_retro_template("[CH3:1][CH2:2]O>>[CH3:1][CH2:2]Br", "to-br", 2),
            parse_retro_template("[CH3:1][CH2:2]Br>>[CH3:1][CH2:2]O", "to-oh", 1),
        ]
    )
    catalog = make_catalog(["CC"])  # nothing relevant is buyable
    view = BuyablesView(catalog, 100.0)
    expander = Expander(
        store, None, ("template_relevance",),
        StrategyConfig(max_cum_prob=1.0, filter_threshold=0.0), view,
    )
    cfg = SearchConfig(max_depth=4, max_chemicals=50)
    graph = mcts_search("CCO", cfg, expander, view)
    doc = serialize_graph(graph)
    text = json.dumps(doc)
    assert "cycle_ref" in text
    assert enumerate_routes(graph, cfg) == []


def test_retrosim_list_order_follows_retrieval_similarity():
    from retrokit.chem import parse_smiles as _parse
    from retrokit.onestep import ReactionCorpus, CorpusReaction, expand_retrosim
    from retrokit.chem import morgan_fingerprint
    from retrokit.onestep import _set_fingerprint

    store = TemplateStore(
        [parse_retro_template("[C:1](=[O:2])O[C:3]>>[C:1](=[O:2])O.[C:3]O", "ester", 1)]
    )
    def corpus_reaction(rid, reactants, product):
        return CorpusReaction(
            reaction_id=rid,
            reactants=tuple(sorted(reactants)),
            product=product,
            template_id="ester",
            product_fp=morgan_fingerprint(_parse(product)),
            reactants_fp=_set_fingerprint(tuple(sorted(reactants))),
        )

    near = corpus_reaction("near", ("CC(=O)O", "CCO"), "CCOC(C)=O")
    far = corpus_reaction("far", ("CCCCCC(=O)O", "CCCCCO"), "CCCCCOC(=O)CCCCC")
    corpus = ReactionCorpus([far, near])
    out = expand_retrosim(
        _parse("CCOC(C)=O"), StrategyConfig(retrosim_k=2), corpus, store
    )
    first_ids = [sorted(s.precedent_reaction_ids)[0] for s in out]
    assert first_ids.index("near") < first_ids.index("far")


def test_exhaustion_with_growth_templates_and_shared_cycles():
    # Protection-style templates grow molecules and revisit shared
    # nodes; both engines must still expand every reachable molecule
    # within the depth budget (regression for a selection dead-end).
    store = TemplateStore(
        [
            parse_retro_template("[NH2:1][C:2]>>[C:2][NH:1]C(=O)OC(C)(C)C", "protect", 3),
            parse_retro_template("[CH2:1][CH2:2]>>[CH2:1]O.[CH2:2]O", "split", 2),
            parse_retro_template("[C:1][OH:2]>>[C:1]Br.[OH2:2]", "brominate", 1),
            parse_retro_template("[C:1](=[O:2])[N:3]>>[C:1](=[O:2])O.[N:3]", "amide", 1),
        ]
    )
    catalog = make_catalog(["CO"])
    view = BuyablesView(catalog, 100.0)
    expander = Expander(
        store, None, ("template_relevance",),
        StrategyConfig(max_cum_prob=1.0), view,
    )
    results = {}
    for algo in ("mcts", "retro_star"):
        cfg = SearchConfig(algorithm=algo, max_depth=4, max_chemicals=3000)
        graph = run_search("NCCCCCCN", cfg, expander, view)
        leftovers = [n for n in graph.nodes.values() if graph.expandable(n)]
        assert leftovers == [], f"{algo} left {len(leftovers)} expandable nodes"
        results[algo] = {n for n in graph.nodes}
    assert results["mcts"] == results["retro_star"]


class RecordingExpander(Expander):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.calls = []

    def expand(self, smiles):
        self.calls.append(smiles)
        return super().expand(smiles)


def _ordering_world():
    store = TemplateStore(
        [
            parse_retro_template(
                "[C:1](=[O:2])O[C:3]>>[C:1](=[O:2])O.[C:3]O", "likely", 9
            ),
            parse_retro_template(
                "[C:1][O:2][CH2:3]>>[C:1][O:2].Br[CH2:3]", "rare", 1
            ),
        ]
    )
    catalog = make_catalog(["C"])  # nothing relevant buyable
    view = BuyablesView(catalog, 100.0)
    expander = RecordingExpander(
        store, None, ("template_relevance",),
        StrategyConfig(max_cum_prob=1.0, filter_threshold=0.0), view,
    )
    return expander, view


def test_retro_star_expands_cheapest_estimate_first():
    expander, view = _ordering_world()
    cfg = SearchConfig(algorithm="retro_star", max_depth=3, max_chemicals=100)
    retro_star_search("CCOC(C)=O", cfg, expander, view)
    # Root first; then the children of the -ln(0.9) reaction (acid and
    # ethanol, in insertion order) before the -ln(0.1) reaction's
    # bromoethane.
    assert expander.calls == ["C(C)(=O)OCC", "C(C)(=O)O", "C(C)O", "BrCC"]


def test_mcts_exploration_revisits_underexplored_branch():
    expander, view = _ordering_world()
    cfg = SearchConfig(algorithm="mcts", max_depth=3, max_chemicals=100)
    mcts_search("CCOC(C)=O", cfg, expander, view)
    # First descent exploits the higher-scored reaction (acid child);
    # the second is pulled to the unvisited reaction by the exploration
    # term, reaching bromoethane before ethanol.
    assert expander.calls == ["C(C)(=O)OCC", "C(C)(=O)O", "BrCC", "C(C)O"]


def test_max_routes_truncates_after_sorting():
    # A convergent graph with 20 x 15 = 300 distinct proofs must return
    # exactly max_routes of them, best-ranked first.
    from retrokit.search.graph import RxnNode, SearchGraph

    cfg = SearchConfig(max_depth=6, max_routes=200)
    graph = SearchGraph("T", cfg)
    root = graph.root

    def add_reaction(parent, children, s_r, plausibility):
        rxn = RxnNode(
            index=graph.rxn_count, parent=parent, children=children,
            s_r=s_r, plausibility=plausibility,
            template_ids=frozenset(), provenance=frozenset(),
            precedent_ids=frozenset(),
        )
        graph.rxn_count += 1
        parent.reactions.append(rxn)
        for child in children:
            child.parents.append(rxn)
        return rxn

    a = graph.get_or_create("A", 1, buyable=False)
    b = graph.get_or_create("B", 1, buyable=False)
    root.expanded = a.expanded = b.expanded = True
    add_reaction(root, [a, b], 0.9, 0.9)
    for i in range(20):
        leaf = graph.get_or_create(f"La{i}", 2, buyable=True)
        add_reaction(a, [leaf], 0.5, 1.0 - i * 0.01)
    for j in range(15):
        leaf = graph.get_or_create(f"Lb{j}", 2, buyable=True)
        add_reaction(b, [leaf], 0.5, 1.0 - j * 0.01)

    routes = enumerate_routes(graph, cfg)
    assert len(routes) == 200
    # Every returned route is a full proof of three reactions, and the
    # first one pairs the two most plausible branch choices.
    assert all(len(r.reactions()) == 3 for r in routes)
    best = routes[0]
    plausibilities = sorted((x.plausibility for x in best.reactions()), reverse=True)
    assert plausibilities[0] == 0.9 or plausibilities[0] == 1.0
    avg_first = sum(x.plausibility for x in best.reactions()) / 3
    for other in routes[1:]:
        avg_other = sum(x.plausibility for x in other.reactions()) / 3
        assert avg_first >= avg_other


def test_route_metrics_invariants_on_engine_routes():
    from retrokit.pathways import compute_metrics

    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig(max_depth=4, max_chemicals=300)
    for target in ("CCNC(=O)c1ccccc1", "O=C(O)c1ccc(-c2ccccc2)cc1"):
        graph = mcts_search(target, cfg, expander, view)
        for route in enumerate_routes(graph, cfg):
            metrics = compute_metrics(route, catalog, cfg.max_price)
            assert metrics.longest_linear_sequence <= metrics.reaction_count
            assert metrics.depth == metrics.longest_linear_sequence
            assert 0 < metrics.atom_economy <= 1.0 + 1e-9
            assert metrics.starting_material_cost > 0
            assert not metrics.cost_is_lower_bound


def test_engine_invariants_after_every_update():
    # Drive the loop manually: after each expansion, every reaction's
    # v_r must equal its children's mean value, chemical values must be
    # consistent with their reactions, and proven flags must only grow.
    from retrokit.search.engine import _Engine

    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    engine = _Engine(
        "NC(=O)OC(Cn1ncnn1)c1ccccc1Cl",
        SearchConfig(max_depth=4, max_chemicals=120),
        expander, view,
    )
    graph = engine.graph
    proven_so_far: set[str] = set()
    steps = 0
    while True:
        open_nodes = graph.open_set()
        if graph.root.smiles not in open_nodes or graph.chem_count >= 120:
            break
        path = engine._select(open_nodes)
        if path is None:
            break
        chems, rxns = path
        engine._expand_node(chems[-1])
        for chem in chems:
            chem.visit_count += 1
        for rxn in rxns:
            rxn.n_r += 1
        steps += 1

        for node in graph.nodes.values():
            for rxn in node.reactions:
                mean = sum(c.value for c in rxn.children) / len(rxn.children)
                assert rxn.v_r == pytest.approx(mean, abs=1e-12)
            if node.buyable:
                assert node.value == 1.0
            elif node.reactions:
                assert node.value == pytest.approx(
                    max(r.s_r * r.v_r for r in node.reactions), abs=1e-12
                )
            else:
                assert node.value == 0.0
        now_proven = {s for s, n in graph.nodes.items() if n.proven}
        assert proven_so_far <= now_proven, "a proven chemical became unproven"
        proven_so_far = now_proven
    assert steps > 5
    assert graph.root.proven


def test_exploration_constant_zero_is_pure_exploitation():
    # With c = 0 the second descent keeps exploiting the better-scored
    # branch instead of being pulled to the unvisited one.
    expander, view = _ordering_world()
    cfg = SearchConfig(max_depth=3, max_chemicals=100, exploration_c=0.0)
    mcts_search("CCOC(C)=O", cfg, expander, view)
    assert expander.calls[0] == "C(C)(=O)OCC"
    # Both children of the 0.9-scored reaction come before bromoethane.
    assert set(expander.calls[1:3]) == {"C(C)(=O)O", "C(C)O"}
    assert expander.calls[3] == "BrCC"


def test_real_drug_targets_search_within_budget():
    # The SI-sized structures from the parser corpus must run under the
    # paper-scale wall-clock anchor even when unsolvable on toy data.
    import time as _time

    from test_acceptance import SI_TARGETS

    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig(max_chemicals=400)
    for target in SI_TARGETS[:8]:
        started = _time.monotonic()
        graph = run_search(target, cfg, expander, view)
        elapsed = _time.monotonic() - started
        assert elapsed < 60.0, f"{elapsed:.1f}s for {target}"
        assert graph.chem_count <= cfg.max_chemicals
        for node in graph.nodes.values():
            assert len(node.reactions) <= cfg.max_branching


def test_ibuprofen_three_step_route_on_bundled_data():
    # A real multi-step solve on the bundled stores: acid via nitrile
    # hydrolysis, alpha-methylation down to a buyable nitrile, and an
    # aromatic alkylation for the side chain.
    from retrokit.pathways import compute_metrics

    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    view = BuyablesView(catalog, 100.0)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    cfg = SearchConfig()
    graph = run_search("CC(C)Cc1ccc(C(C)C(=O)O)cc1", cfg, expander, view)
    assert graph.root.proven
    routes = enumerate_routes(graph, cfg)
    assert routes
    best = compute_metrics(routes[0], catalog, cfg.max_price)
    assert best.reaction_count == 3
    assert best.longest_linear_sequence == 3
    leaves = {leaf.smiles for leaf in routes[0].leaves()}
    assert "C(Cc1ccccc1)#N" in leaves  # phenylacetonitrile
    for leaf in routes[0].leaves():
        assert view.is_buyable(leaf.smiles)
