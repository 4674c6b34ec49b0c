"""Gateway runtime state: stores, ban lists, and the async job registry.

Jobs run on an in-process worker pool.  Every status transition is
appended to ``jobs.jsonl`` and completed payloads land in
``results/<job_id>.json``, so a restarted service can still serve every
finished result.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, replace
from pathlib import Path

from ..buyables import BuyablesView, Catalog
from ..chem import ChemError, canonicalize
from ..datasets import load_buyables, load_corpus, load_templates
from ..onestep import ReactionCorpus, TemplateStore, reaction_key
from ..pathways import compute_metrics, sort_routes
from ..search import (
    Expander,
    SearchConfig,
    enumerate_routes,
    run_search,
    serialize_graph,
    serialize_route,
)
from .config import AppConfig

STARTED = "started"
COMPLETED = "completed"
FAILED = "failed"


@dataclass(frozen=True)
class JobRecord:
    job_id: str
    kind: str
    status: str
    settings: dict
    created_at: float
    finished_at: float | None = None
    error: str | None = None
    result_ref: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


class BanList:
    """Per-user banned chemicals and reactions, canonical and persisted."""

    def __init__(self, path: Path):
        self._path = path
        self._lock = threading.Lock()
        self._data: dict[str, dict[str, list[str]]] = {}
        if path.exists():
            self._data = json.loads(path.read_text(encoding="utf-8"))

    def _bucket(self, user: str, kind: str) -> list[str]:
        return self._data.get(user, {}).get(kind, [])

    def chemicals(self, user: str) -> frozenset:
        return frozenset(self._bucket(user, "chemicals"))

    def reactions(self, user: str) -> frozenset:
        return frozenset(self._bucket(user, "reactions"))

    def add_chemical(self, user: str, smiles: str) -> str:
        canonical = canonicalize(smiles)
        self._mutate(user, "chemicals", canonical, add=True)
        return canonical

    def remove_chemical(self, user: str, smiles: str) -> str:
        canonical = canonicalize(smiles)
        self._mutate(user, "chemicals", canonical, add=False)
        return canonical

    def add_reaction(self, user: str, rxn_smiles: str) -> str:
        key = _canonical_reaction_key(rxn_smiles)
        self._mutate(user, "reactions", key, add=True)
        return key

    def remove_reaction(self, user: str, rxn_smiles: str) -> str:
        key = _canonical_reaction_key(rxn_smiles)
        self._mutate(user, "reactions", key, add=False)
        return key

    def _mutate(self, user: str, kind: str, value: str, add: bool) -> None:
        with self._lock:
            buckets = self._data.setdefault(user, {})
            entries = set(buckets.get(kind, []))
            if add:
                entries.add(value)
            else:
                entries.discard(value)
            buckets[kind] = sorted(entries)
            self._path.parent.mkdir(parents=True, exist_ok=True)
            self._path.write_text(
                json.dumps(self._data, indent=2, sort_keys=True), encoding="utf-8"
            )


def _canonical_reaction_key(rxn_smiles: str) -> str:
    if ">>" not in rxn_smiles:
        raise ChemError("reaction must be written as precursors>>product")
    lhs, rhs = rxn_smiles.split(">>", 1)
    precursors = tuple(sorted(canonicalize(lhs).split(".")))
    return reaction_key(precursors, canonicalize(rhs))


class JobStore:
    """Append-only job journal with result payload files."""

    def __init__(self, data_dir: Path):
        self._dir = data_dir
        self._journal = data_dir / "jobs.jsonl"
        self._results = data_dir / "results"
        self._lock = threading.Lock()
        self._records: dict[str, JobRecord] = {}
        self._results.mkdir(parents=True, exist_ok=True)
        if self._journal.exists():
            for line in self._journal.read_text(encoding="utf-8").splitlines():
                if line.strip():
                    record = JobRecord(**json.loads(line))
                    self._records[record.job_id] = record
        # Jobs that were running when the previous process died can
        # never complete now.
        for job_id, record in list(self._records.items()):
            if record.status == STARTED:
                self._records[job_id] = replace(
                    record, status=FAILED, error="interrupted by restart",
                    finished_at=time.time(),
                )

    def create(self, kind: str, settings: dict) -> JobRecord:
        record = JobRecord(
            job_id=uuid.uuid4().hex,
            kind=kind,
            status=STARTED,
            settings=settings,
            created_at=time.time(),
        )
        self._append(record)
        return record

    def get(self, job_id: str) -> JobRecord | None:
        return self._records.get(job_id)

    def all_records(self) -> list[JobRecord]:
        return sorted(self._records.values(), key=lambda r: r.created_at)

    def pending_count(self) -> int:
        return sum(1 for r in self._records.values() if r.status == STARTED)

    def complete(self, job_id: str, payload: dict) -> JobRecord:
        self._require_running(job_id)
        path = self._results / f"{job_id}.json"
        path.write_text(json.dumps(payload, sort_keys=True), encoding="utf-8")
        record = replace(
            self._records[job_id],
            status=COMPLETED,
            finished_at=time.time(),
            result_ref=path.name,
        )
        self._append(record)
        return record

    def fail(self, job_id: str, error: str) -> JobRecord:
        self._require_running(job_id)
        record = replace(
            self._records[job_id],
            status=FAILED,
            finished_at=time.time(),
            error=error,
        )
        self._append(record)
        return record

    def _require_running(self, job_id: str) -> None:
        # Terminal records are immutable: started -> completed/failed
        # are the only legal transitions.
        status = self._records[job_id].status
        if status != STARTED:
            raise RuntimeError(f"job {job_id} already {status}")

    def payload(self, record: JobRecord) -> dict | None:
        if record.status != COMPLETED or record.result_ref is None:
            return None
        path = self._results / record.result_ref
        return json.loads(path.read_text(encoding="utf-8"))

    def _append(self, record: JobRecord) -> None:
        with self._lock:
            self._records[record.job_id] = record
            self._dir.mkdir(parents=True, exist_ok=True)
            with open(self._journal, "a", encoding="utf-8") as handle:
                handle.write(json.dumps(record.as_dict(), sort_keys=True) + "\n")


class CallCounter:
    """Per-endpoint call counts grouped by UTC date."""

    def __init__(self):
        self._lock = threading.Lock()
        self._counts: dict[str, dict[str, int]] = {}

    def record(self, endpoint: str) -> None:
        day = time.strftime("%Y-%m-%d", time.gmtime())
        with self._lock:
            bucket = self._counts.setdefault(day, {})
            bucket[endpoint] = bucket.get(endpoint, 0) + 1

    def summary(self) -> dict:
        with self._lock:
            return {day: dict(counts) for day, counts in self._counts.items()}


class GatewayState:
    """Everything the HTTP handlers need, wired once at startup."""

    def __init__(self, config: AppConfig):
        self.config = config
        config.data_dir.mkdir(parents=True, exist_ok=True)
        self.templates: TemplateStore = (
            TemplateStore.from_jsonl(config.templates_file)
            if config.templates_file
            else load_templates()
        )
        self.corpus: ReactionCorpus = (
            ReactionCorpus.from_jsonl(config.corpus_file)
            if config.corpus_file
            else load_corpus()
        )
        self.catalog: Catalog = (
            Catalog.from_file(config.buyables_file)
            if config.buyables_file
            else load_buyables()
        )
        self.banlist = BanList(config.data_dir / "banlists.json")
        self.jobs = JobStore(config.data_dir)
        self.counter = CallCounter()
        self.executor = ThreadPoolExecutor(max_workers=config.workers)
        known: set[str] = set()
        for rxn in self.corpus.reactions:
            known.add(rxn.product)
            known.update(rxn.reactants)
        # Chemicals with corpus precedents, for the client's frame colors.
        self.known_chemicals = frozenset(known)

    def buyables_view(self, max_price: float | None = None) -> BuyablesView:
        return BuyablesView(
            self.catalog,
            self.config.search.max_price if max_price is None else max_price,
        )

    def expander(
        self,
        user: str,
        strategies: tuple[str, ...] | None = None,
        strategy_config=None,
        max_price: float | None = None,
    ) -> Expander:
        return Expander(
            self.templates,
            self.corpus,
            strategies or self.config.strategies,
            strategy_config or self.config.strategy,
            self.buyables_view(max_price),
            banned_chemicals=self.banlist.chemicals(user),
            banned_reactions=self.banlist.reactions(user),
        )

    def submit_tree_search(self, user: str, target: str, cfg: SearchConfig) -> JobRecord:
        settings = {"target": target, "config": asdict(cfg), "user": user}
        record = self.jobs.create("tree_search", settings)
        self.executor.submit(self._run_tree_search, record.job_id, user, target, cfg)
        return record

    def _run_tree_search(self, job_id: str, user: str, target: str, cfg: SearchConfig) -> None:
        try:
            payload = self.run_tree_search(user, target, cfg)
            self.jobs.complete(job_id, payload)
        except Exception as exc:  # job failures are results, not crashes
            self.jobs.fail(job_id, f"{type(exc).__name__}: {exc}")

    def run_tree_search(self, user: str, target: str, cfg: SearchConfig) -> dict:
        view = self.buyables_view(cfg.max_price)
        expander = self.expander(user, cfg.strategies, max_price=cfg.max_price)
        graph = run_search(target, cfg, expander, view)
        routes = enumerate_routes(graph, cfg)
        scored = [
            (route, compute_metrics(route, self.catalog, cfg.max_price))
            for route in routes
        ]
        scored = sort_routes(scored)
        return {
            "graph": serialize_graph(graph),
            "routes": [
                serialize_route(route, metrics.as_dict()) for route, metrics in scored
            ],
            "stats": graph.stats(),
        }

    def shutdown(self) -> None:
        self.executor.shutdown(wait=True)
