"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with `pytest -s tests/test_acceptance.py` to see the per-criterion
report.  Tolerances and limits are pinned here, not configurable.
"""

import json
import math
import random
import time

import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

from retrokit.buyables import BuyablesView, Catalog
from retrokit.chem import (
    canonicalize,
    match_pattern,
    parse_pattern,
    parse_smiles,
    write_canonical_smiles,
)
from retrokit.cli import main as cli_main
from retrokit.datasets import (
    data_path,
    load_buyables,
    load_corpus,
    load_drug_smiles,
    load_templates,
    load_toy_targets,
)
from retrokit.gateway import AppConfig, create_app
from retrokit.onestep import StrategyConfig, TemplateStore
from retrokit.pathways import compute_metrics, sort_routes
from retrokit.search import (
    Expander,
    SearchConfig,
    enumerate_routes,
    run_search,
    uct_score,
)
from retrokit.search.routes import Route, RouteChem, RouteReaction

from oracles import brute_force_matches, brute_force_route_keys, is_isomorphic
from test_canon import permute_graph
from test_search import synthetic_case, make_catalog

SI_TARGETS = [
    "NC(=O)OC(Cn1ncnn1)c1ccccc1Cl",
    "CCCS(=O)(=O)NC1CC(N(C)c2ncnc3[nH]ccc23)C1",
    "O=C(Nc1ccc(OC(F)(F)Cl)cc1)c1cnc(N2CC[C@@H](O)C2)c(-c2ccn[nH]2)c1",
    "CC1(C)CC(=O)N(CCCCN2CCN(c3ncccn3)CC2)C(=O)C1",
    "CC(C)Nc1nc2cc(Cl)c(Cl)cc2n1[C@H]1O[C@@H](CO)[C@H](O)[C@@H]1O",
    "CCOC(=O)[C@H](Cc1ccc(F)cc1)NC(=O)[C@@H](N)Cc1ccc(N(CCCl)CCCl)cc1",
    "C[C@H](Nc1ccc(C#N)n(C)c1=O)c1cc2cc(Cl)ccc2[nH]c1=O",
    "CC(C)OC(=O)CNc1cccc(CN(Cc2ccc(-n3cccn3)cc2)S(=O)(=O)c2cccnc2)n1",
    "CC1(C)CCC(C)(C)c2cc(Cn3cccn3)c(/C=C/c3ccc(C(=O)O)cc3)cc21",
    "CCCN=C1S/C(=C\\c2ccc(OC[C@H](O)CO)c(Cl)c2)C(=O)N1c1ccccc1C",
    "Cc1cc(C[C@@H](NC(=O)N2CCC(c3cc4ccccc4[nH]c3=O)CC2)C(=O)N2CCN(C3CCN(C)CC3)CC2)cc2cn[nH]c12",
    "Cc1cc(C2=NO[C@@](c3cc(Cl)c(Cl)c(Cl)c3)(C(F)(F)F)C2)sc1C(=O)NCC(=O)NCC(F)(F)F",
    "CCN1C(=O)N(c2c(F)c(OC)cc(OC)c2F)Cc2cnc3[nH]c(CN4CCOCC4)cc3c21",
    "O=C(O)C[C@H]1CCc2c1[nH]c1ccc(OCc3ccc(C4CCCC4)c(C(F)(F)F)c3)cc21",
    "COC1(C(=O)N[C@@H](C)c2ccc(-n3cc(F)cn3)nc2)CCC(c2nc(C)cc(Nc3cc(C)[nH]n3)n2)CC1",
    "CN(C)P(=O)(OC[C@@H]1CNC[C@H](n2ccc(N)nc2=O)O1)N1CCN(C(=O)OCCOCCOCCO)CC1",
    "CCNCCc1ccc(CN(CC)c2cc(OC)ccc2[C@@H]2CCc3cc(O)ccc3C2)cc1",
    "Cc1ncc(OC[C@@]2(c3cccc(F)c3)C[C@H]2C(=O)Nc2ccc(F)cn2)c(C)n1",
    "COC(=O)[C@H](c1ccccc1)[C@H]1CCCCN1C(=O)OC[n+]1cccc(C(=O)N[C@@H](CO)C(=O)[O-])c1",
    "C[C@@H]1[C@H](c2ccccc2)C[C@H](NC(=O)c2cnc3c(c2)C[C@@]2(C3)C(=O)Nc3ncccc32)C(=O)N1CC(F)(F)F",
]


def report(name: str, detail: str = "") -> None:
    suffix = f" ({detail})" if detail else ""
    print(f"[ACCEPTANCE] {name}: PASS{suffix}")


def test_acceptance_parser_suite():
    started = time.monotonic()
    corpus = load_drug_smiles()
    assert len(corpus) >= 200, "bundled corpus must hold at least 200 molecules"
    listed = {smiles for smiles, _name in corpus}
    for target in SI_TARGETS:
        assert target in listed, f"missing target {target}"

    # 100% round-trip isomorphism.
    for smiles, name in corpus:
        mol = parse_smiles(smiles)
        again = parse_smiles(write_canonical_smiles(mol))
        assert is_isomorphic(mol, again), name

    # Canonical invariance: >= 1000 random permutations over >= 50
    # molecules.
    rng = random.Random(20240817)
    sample = [corpus[i][0] for i in range(0, len(corpus), len(corpus) // 52)][:52]
    assert len(sample) >= 50
    permutations = 0
    for smiles in sample:
        mol = parse_smiles(smiles)
        reference = write_canonical_smiles(mol)
        for _ in range(20):
            permutations += 1
            assert write_canonical_smiles(permute_graph(mol, rng)) == reference
    assert permutations >= 1000

    cenobamate = parse_smiles("NC(=O)OC(Cn1ncnn1)c1ccccc1Cl")
    assert cenobamate.heavy_atom_count == 18
    assert cenobamate.ring_count == 2

    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"parser suite took {elapsed:.1f}s"
    report(
        "parser suite",
        f"{len(corpus)} molecules round-trip, {permutations} permutations, "
        f"{elapsed:.1f}s",
    )


MOL_ALPHABET = ["C", "C", "C", "N", "O"]
AROMATIC_CORES = [
    "c1ccccc1", "c1ccncc1", "c1cc[nH]c1", "c1ccoc1", "c1ccsc1", "c1ccnnc1",
]
AROMATIC_TAILS = ["", "C", "O", "N", "CC", "C=O", "Cl", "Br"]
PATTERN_ATOMS = ["C", "N", "O", "c", "n", "[*]", "[CH3]", "[CH2]", "[OH]", "[NH2]"]
PATTERN_BONDS = ["", "", "-", "=", "~"]


def _random_molecule(rng: random.Random) -> str:
    if rng.random() < 0.3:
        core = rng.choice(AROMATIC_CORES)
        tail = rng.choice(AROMATIC_TAILS)
        return tail + core if tail else core
    n = rng.randint(2, 10)
    parts = []
    ring_open = False
    for i in range(n):
        element = rng.choice(MOL_ALPHABET)
        if i and rng.random() < 0.2:
            parts.append("=")
            element = "C"
        parts.append(element)
        if not ring_open and 0 < i < n - 3 and rng.random() < 0.15:
            parts.append("1")
            ring_open = True
        elif ring_open and rng.random() < 0.3:
            parts.append("1")
            ring_open = False
        if rng.random() < 0.15 and i < n - 1:
            parts.append("(" + rng.choice(["C", "O", "N"]) + ")")
    if ring_open:
        parts.append("1")
    return "".join(parts)


def _random_pattern(rng: random.Random) -> str:
    k = rng.randint(1, 4)
    parts = [rng.choice(PATTERN_ATOMS)]
    for _ in range(k - 1):
        parts.append(rng.choice(PATTERN_BONDS))
        parts.append(rng.choice(PATTERN_ATOMS))
    return "".join(parts)


def test_acceptance_matcher_oracle():
    started = time.monotonic()
    rng = random.Random(7081)
    checked = 0
    while checked < 500:
        try:
            mol = parse_smiles(_random_molecule(rng))
            pattern = parse_pattern(_random_pattern(rng))
        except Exception:
            continue
        if len(mol.atoms) > 12:
            continue
        checked += 1
        assert match_pattern(pattern, mol) == brute_force_matches(pattern, mol)
    elapsed = time.monotonic() - started
    assert elapsed < 60.0, f"matcher oracle took {elapsed:.1f}s"
    report("matcher oracle", f"500 pairs, exact set equality, {elapsed:.1f}s")


def test_acceptance_template_forward_validation():
    store = load_templates()
    total = 0
    for line in open(data_path("reactions.jsonl"), encoding="utf-8"):
        rec = json.loads(line)
        lhs, rhs = rec["rxn_smiles"].split(">>")
        expected = tuple(sorted(canonicalize(lhs).split(".")))
        template = store.get(rec["template_id"])
        from retrokit.chem import apply_retro_template

        app = apply_retro_template(template, parse_smiles(rhs))
        assert expected in app.precursor_sets, rec["reaction_id"]
        total += 1
    assert total >= 50
    report("template forward-validation", f"{total}/{total} triples regenerate")


def test_acceptance_uct():
    assert uct_score(0.5, 1.0, 2, 8, 1.0) == pytest.approx(1.2697, abs=1e-4)
    rng = random.Random(515151)
    for _ in range(10_000):
        s = rng.uniform(1e-9, 1.0)
        v = rng.uniform(0.0, 1.0)
        n = rng.randint(1, 10**6)
        big_n = rng.randint(1, 10**6)
        c = rng.uniform(0.0, 5.0)
        reference = (s * v) / n + c * math.sqrt(math.log(big_n) / n)
        assert abs(uct_score(s, v, n, big_n, c) - reference) < 1e-9
    report("uct", "10000 random inputs at 1e-9, worked example 1.2697")


def test_acceptance_search_oracle():
    started = time.monotonic()
    cases = 0
    seed = 0
    while cases < 20:
        seed += 1
        assert seed < 20_000, "synthetic store generation exhausted its budget"
        case = synthetic_case(seed)
        if case is None:
            continue
        cases += 1
        target, templates, buyables = case
        store = TemplateStore(templates)
        view = BuyablesView(make_catalog(buyables), 100.0)
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
    elapsed = time.monotonic() - started
    assert elapsed < 120.0, f"search oracle took {elapsed:.1f}s"
    report("search oracle", f"20 stores, both algorithms match, {elapsed:.1f}s")


def test_acceptance_limits_honored():
    store, corpus, catalog = load_templates(), load_corpus(), load_buyables()
    cfg = SearchConfig()  # SI defaults
    assert cfg.max_chemicals == 5000
    assert cfg.max_branching == 25
    assert cfg.max_depth == 6
    assert cfg.max_routes == 200
    assert cfg.max_price == 100.0
    view = BuyablesView(catalog, cfg.max_price)
    expander = Expander(store, corpus, ("template_relevance",), StrategyConfig(), view)
    # The $100/g gate is inclusive above and exclusive beyond.
    assert catalog.lookup("OB(O)c1ccc(F)cc1", cfg.max_price) is not None  # 100.00
    assert catalog.lookup("O=C(O)c1ccc(I)cc1", cfg.max_price) is None  # 104.00
    for target in load_toy_targets():
        graph = run_search(target, cfg, expander, view)
        assert graph.chem_count <= cfg.max_chemicals
        routes = enumerate_routes(graph, cfg)
        assert len(routes) <= cfg.max_routes
        for node in graph.nodes.values():
            assert len(node.reactions) <= cfg.max_branching
            assert node.depth <= cfg.max_depth
        for route in routes:
            for leaf in route.leaves():
                entry = catalog.lookup_canonical(leaf.smiles, cfg.max_price)
                assert entry is not None and entry.price_per_gram <= cfg.max_price
    report("limits honored", "chemicals<=5000 branching<=25 depth<=6 routes<=200 $100/g")


def _fixture_route(smiles: str, steps: int, plausibility: float, score: float) -> Route:
    node = RouteChem("LEAF", True)
    for i in range(steps):
        node = RouteChem(
            f"{smiles}-{i}",
            False,
            RouteReaction(
                score=score,
                plausibility=plausibility,
                template_ids=frozenset(),
                provenance=frozenset(),
                precedent_ids=frozenset(),
                children=(node,),
            ),
        )
    return Route(node)


def test_acceptance_sorting_contract():
    shorter = _fixture_route("a", 2, 0.2, 0.2)
    longer_good = _fixture_route("b", 3, 0.9, 0.9)
    tie_high_plaus = _fixture_route("c", 3, 0.9, 0.1)
    tie_low_plaus = _fixture_route("d", 3, 0.5, 0.9)
    tie_full_first = _fixture_route("e", 3, 0.5, 0.9)

    def metrics(route: Route):
        rxns = route.reactions()
        from retrokit.pathways import RouteMetrics

        return RouteMetrics(
            depth=len(rxns),
            reaction_count=len(rxns),
            longest_linear_sequence=len(rxns),
            avg_plausibility=sum(r.plausibility for r in rxns) / len(rxns),
            avg_template_score=sum(r.score for r in rxns) / len(rxns),
            atom_economy=1.0,
            starting_material_cost=0.0,
        )

    scored = [
        (longer_good, metrics(longer_good)),
        (tie_low_plaus, metrics(tie_low_plaus)),
        (shorter, metrics(shorter)),
        (tie_high_plaus, metrics(tie_high_plaus)),
        (tie_full_first, metrics(tie_full_first)),
    ]
    ordered = [route for route, _m in sort_routes(scored)]
    # Shortest first regardless of scores; then plausibility descending;
    # then template score; full ties keep input order.
    assert ordered[0] is shorter
    assert ordered[1] is longer_good
    assert ordered[2] is tie_high_plaus
    assert ordered[3] is tie_low_plaus
    assert ordered[4] is tie_full_first
    assert [r for r, _m in sort_routes(sort_routes(scored))] == ordered
    report("sorting contract", "length, then avg plausibility, then avg score; stable")


def test_acceptance_end_to_end_batch(tmp_path):
    runner = CliRunner()
    config = tmp_path / "config.yaml"
    config.write_text("search:\n  random_seed: 17\n")
    outputs = []
    per_target = None
    targets = load_toy_targets()
    assert len(targets) == 10
    for tag in ("first", "second"):
        out = tmp_path / tag
        started = time.monotonic()
        result = runner.invoke(
            cli_main,
            [
                "plan",
                "--targets", str(data_path("toy_targets.txt")),
                "--config", str(config),
                "--out", str(out),
                "--jobs", "2",
            ],
        )
        elapsed = time.monotonic() - started
        assert result.exit_code == 0, result.output
        assert "solved 9/10" in result.output
        per_target = elapsed / len(targets)
        assert per_target < 60.0, f"{per_target:.1f}s per target"
        outputs.append([p.read_bytes() for p in sorted(out.glob("target_*.json"))])
    assert outputs[0] == outputs[1], "plan output must be byte-deterministic"
    report(
        "end-to-end batch",
        f"10 targets, {per_target:.2f}s/target, byte-identical reruns",
    )


def test_acceptance_gateway_contract(tmp_path):
    config = AppConfig(data_dir=tmp_path / "gw")
    with TestClient(create_app(config)) as client:
        # Synchronous expansion.
        expand = client.post(
            "/api/retro/expand",
            json={
                "smiles": "CC(=O)Nc1ccc(O)cc1",
                "strategies": ["template_relevance", "retrosim"],
            },
        )
        assert expand.status_code == 200
        suggestions = expand.json()["suggestions"]
        assert suggestions

        # Async lifecycle started -> completed.
        submitted = client.post(
            "/api/tree-search/call-async",
            json={"smiles": "CCOC(=O)c1ccccc1", "config": {"max_depth": 3, "max_chemicals": 100}},
        )
        assert submitted.status_code == 202
        job_id = submitted.json()["job_id"]
        assert client.get(f"/api/results/{job_id}").json()["status"] in (
            "started",
            "completed",
        )
        deadline = time.monotonic() + 30
        status = "started"
        while time.monotonic() < deadline and status == "started":
            doc = client.get(f"/api/results/{job_id}").json()
            status = doc["status"]
            time.sleep(0.05)
        assert status == "completed"
        assert doc["result"]["routes"]

        # 404 for unknown ids.
        assert client.get("/api/results/not-a-job").status_code == 404

        # Ban list exclusion.
        acid = "C(C)(=O)O"
        target = {"smiles": "CC(=O)Nc1ccc(O)cc1", "strategies": ["template_relevance"]}
        assert any(
            acid in s["precursors"]
            for s in client.post("/api/retro/expand", json=target).json()["suggestions"]
        )
        client.post("/api/banlist/chemicals", json={"smiles": "CC(=O)O"})
        assert not any(
            acid in s["precursors"]
            for s in client.post("/api/retro/expand", json=target).json()["suggestions"]
        )

        # Buyables bulk upload.
        upload = client.post(
            "/api/buyables",
            json={"entries": [
                {"smiles": "OCCCCCCO", "price_per_g": 9.0},
                {"smiles": "NCCCCCCN", "price_per_g": 8.0},
                {"smiles": "OCCCCCCN", "price_per_g": 7.0},
            ]},
        )
        assert upload.status_code == 200 and upload.json()["count"] == 3
        assert client.get("/api/buyables", params={"q": "OCCCCCCO"}).json()["entries"]
    report("gateway contract", "expand, async lifecycle, 404, banlist, bulk upload")
