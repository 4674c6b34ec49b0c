"""HTTP gateway fronting the planning engine.

Synchronous one-step expansion, asynchronous tree-search jobs with
persisted results, buyables access, per-user ban lists, and service
introspection.  The API index endpoint is generated from the live route
table, so it cannot drift from the actual surface.
"""

from __future__ import annotations

from contextlib import asynccontextmanager

from fastapi import Depends, FastAPI, HTTPException, Query, Request
from pydantic import BaseModel, Field

from ..chem import ChemError, SmilesError, parse_smiles, write_canonical_smiles
from ..onestep import StrategyConfig, one_step_expand
from ..search import SearchConfig
from .config import AppConfig
from .state import COMPLETED, GatewayState


class StrategySettings(BaseModel):
    max_num_templates: int = 1000
    max_cum_prob: float = 0.999
    retrosim_k: int = 10
    filter_threshold: float = 0.001
    top_n_returned: int = 5
    cluster_cutoff: float = 0.3


class ExpandRequest(BaseModel):
    smiles: str
    strategies: list[str] = Field(default_factory=lambda: ["template_relevance"])
    config: StrategySettings | None = None


class SearchSettings(BaseModel):
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
    strategies: list[str] | None = None


class TreeSearchRequest(BaseModel):
    smiles: str
    config: SearchSettings | None = None


class BanEntry(BaseModel):
    smiles: str


class SuggestionModel(BaseModel):
    precursors: list[str]
    precursor_buyable: list[bool]
    precursor_known: list[bool]
    rank_score: float
    plausibility: float
    strategy_provenance: list[str]
    template_ids: list[str]
    precedent_reaction_ids: list[str]
    reacting_atoms: list[int] | None
    cluster_id: int | None


class ExpandResponseModel(BaseModel):
    target: str
    suggestions: list[SuggestionModel]
    top_n: int


class JobSubmittedModel(BaseModel):
    job_id: str
    status: str


class JobRecordModel(BaseModel):
    job_id: str
    kind: str
    status: str
    settings: dict
    created_at: float
    finished_at: float | None = None
    error: str | None = None
    result_ref: str | None = None
    result: dict | None = None


class StatusModel(BaseModel):
    modules: dict
    jobs: dict


class RouteEntryModel(BaseModel):
    path: str
    methods: list[str]


class CatalogEntryModel(BaseModel):
    smiles: str
    price_per_gram: float
    source: str
    lead_time_days: int | None
    available: bool
    url: str | None


class BuyablesResponseModel(BaseModel):
    entries: list[CatalogEntryModel]


class UploadCountModel(BaseModel):
    count: int


class CanonicalModel(BaseModel):
    smiles: str


class BuyableRow(BaseModel):
    smiles: str
    price_per_g: float
    source: str = ""
    lead_time_days: int | None = None
    available: bool = True
    url: str | None = None


class BulkUpload(BaseModel):
    entries: list[BuyableRow]


def create_app(config: AppConfig | None = None, state: GatewayState | None = None) -> FastAPI:
    config = config or AppConfig()
    state = state or GatewayState(config)

    @asynccontextmanager
    async def lifespan(_app: FastAPI):
        yield
        state.shutdown()

    app = FastAPI(title="retrokit gateway", lifespan=lifespan)
    app.state.gateway = state

    def current_user(request: Request) -> str:
        token = state.config.auth_token
        if token is None:
            return "default"
        header = request.headers.get("authorization", "")
        if header != f"Bearer {token}":
            raise HTTPException(status_code=401, detail="missing or bad token")
        return token

    @app.middleware("http")
    async def count_calls(request: Request, call_next):
        response = await call_next(request)
        state.counter.record(f"{request.method} {request.url.path}")
        return response

    def parse_target(smiles: str):
        try:
            return parse_smiles(smiles)
        except SmilesError as exc:
            raise HTTPException(
                status_code=400,
                detail={"error": str(exc), "offset": exc.offset},
            ) from exc
        except ChemError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc

    def suggestion_doc(s) -> dict:
        view = state.buyables_view()
        return {
            "precursors": list(s.precursors),
            "precursor_buyable": [view.is_buyable(p) for p in s.precursors],
            "precursor_known": [p in state.known_chemicals for p in s.precursors],
            "rank_score": s.rank_score,
            "plausibility": s.plausibility,
            "strategy_provenance": sorted(s.strategy_provenance),
            "template_ids": sorted(s.template_ids),
            "precedent_reaction_ids": sorted(s.precedent_reaction_ids),
            "reacting_atoms": (
                sorted(s.reacting_atoms) if s.reacting_atoms is not None else None
            ),
            "cluster_id": s.cluster_id,
        }

    @app.get("/api/index", response_model=list[RouteEntryModel])
    def api_index() -> list[dict]:
        routes = []
        for route in app.routes:
            path = getattr(route, "path", None)
            methods = sorted(getattr(route, "methods", None) or [])
            if path and path.startswith("/api"):
                routes.append({"path": path, "methods": methods})
        return sorted(routes, key=lambda r: r["path"])

    @app.get("/api/status", response_model=StatusModel)
    def status() -> dict:
        return {
            "modules": {
                "templates": {"available": True, "count": len(state.templates)},
                "reaction_corpus": {"available": True, "count": len(state.corpus)},
                "buyables": {"available": True, "count": len(state.catalog)},
                "strategies": list(state.config.strategies),
            },
            "jobs": {"pending": state.jobs.pending_count()},
        }

    @app.get("/api/logging/summary")
    def logging_summary() -> dict:
        return state.counter.summary()

    @app.post("/api/chem/canonicalize", response_model=CanonicalModel)
    def chem_canonicalize(body: BanEntry) -> dict:
        """Utility for clients that must not parse chemistry themselves."""
        mol = parse_target(body.smiles)
        return {"smiles": write_canonical_smiles(mol)}

    @app.post("/api/retro/expand", response_model=ExpandResponseModel)
    def retro_expand(body: ExpandRequest, user: str = Depends(current_user)) -> dict:
        target = parse_target(body.smiles)
        known = {"template_relevance", "retrosim"}
        unknown = [s for s in body.strategies if s not in known]
        if unknown:
            raise HTTPException(
                status_code=422, detail={"error": f"unknown strategies: {unknown}"}
            )
        cfg = (
            StrategyConfig(**body.config.model_dump())
            if body.config is not None
            else state.config.strategy
        )
        suggestions = one_step_expand(
            target,
            body.strategies,
            cfg,
            state.templates,
            state.corpus,
            state.buyables_view(),
            banned_chemicals=state.banlist.chemicals(user),
            banned_reactions=state.banlist.reactions(user),
        )
        return {
            "target": write_canonical_smiles(target),
            "suggestions": [suggestion_doc(s) for s in suggestions],
            "top_n": cfg.top_n_returned,
        }

    @app.post("/api/tree-search/call-async", status_code=202,
              response_model=JobSubmittedModel)
    def tree_search_async(
        body: TreeSearchRequest, user: str = Depends(current_user)
    ) -> dict:
        parse_target(body.smiles)
        raw = body.config.model_dump() if body.config is not None else {}
        if raw.get("strategies") is None:
            raw["strategies"] = list(state.config.strategies)
        raw["strategies"] = tuple(raw["strategies"])
        try:
            cfg = SearchConfig(**raw)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc
        record = state.submit_tree_search(user, body.smiles, cfg)
        return {"job_id": record.job_id, "status": record.status}

    @app.get("/api/results", response_model=list[JobRecordModel])
    def all_results() -> list[dict]:
        return [r.as_dict() for r in state.jobs.all_records()]

    @app.get("/api/results/{job_id}", response_model=JobRecordModel,
             response_model_exclude_none=False)
    def result(job_id: str) -> dict:
        record = state.jobs.get(job_id)
        if record is None:
            raise HTTPException(status_code=404, detail="unknown job id")
        doc = record.as_dict()
        if record.status == COMPLETED:
            doc["result"] = state.jobs.payload(record)
        return doc

    @app.get("/api/banlist/chemicals")
    def banned_chemicals(user: str = Depends(current_user)) -> list[str]:
        return sorted(state.banlist.chemicals(user))

    @app.post("/api/banlist/chemicals")
    def ban_chemical(body: BanEntry, user: str = Depends(current_user)) -> list[str]:
        try:
            state.banlist.add_chemical(user, body.smiles)
        except ChemError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc
        return sorted(state.banlist.chemicals(user))

    @app.delete("/api/banlist/chemicals")
    def unban_chemical(
        smiles: str = Query(...), user: str = Depends(current_user)
    ) -> list[str]:
        try:
            state.banlist.remove_chemical(user, smiles)
        except ChemError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc
        return sorted(state.banlist.chemicals(user))

    @app.get("/api/banlist/reactions")
    def banned_reactions(user: str = Depends(current_user)) -> list[str]:
        return sorted(state.banlist.reactions(user))

    @app.post("/api/banlist/reactions")
    def ban_reaction(body: BanEntry, user: str = Depends(current_user)) -> list[str]:
        try:
            state.banlist.add_reaction(user, body.smiles)
        except ChemError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc
        return sorted(state.banlist.reactions(user))

    @app.delete("/api/banlist/reactions")
    def unban_reaction(
        smiles: str = Query(...), user: str = Depends(current_user)
    ) -> list[str]:
        try:
            state.banlist.remove_reaction(user, smiles)
        except ChemError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc
        return sorted(state.banlist.reactions(user))

    @app.get("/api/buyables", response_model=BuyablesResponseModel)
    def buyables_query(
        q: str = Query(...),
        max_price: float = Query(default=None),
        substructure: bool = Query(default=False),
    ) -> dict:
        cap = max_price if max_price is not None else state.config.search.max_price
        if substructure:
            from ..chem import PatternError, parse_pattern

            try:
                pattern = parse_pattern(q)
            except PatternError as exc:
                raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc
            hits = [
                e
                for e in state.catalog.substructure_search(pattern, limit=100)
                if e.price_per_gram <= cap
            ]
            return {"entries": [vars_entry(e) for e in hits]}
        try:
            entry = state.catalog.lookup(q, cap)
        except ChemError as exc:
            raise HTTPException(status_code=400, detail={"error": str(exc)}) from exc
        return {"entries": [vars_entry(entry)] if entry else []}

    @app.post("/api/buyables", response_model=UploadCountModel)
    def buyables_upload(body: BulkUpload) -> dict:
        from ..buyables import BadRow

        try:
            count = state.catalog.import_entries(
                [row.model_dump() for row in body.entries]
            )
        except BadRow as exc:
            raise HTTPException(
                status_code=400,
                detail={"error": exc.cause, "line": exc.line_number},
            ) from exc
        return {"count": count}

    return app


def vars_entry(entry) -> dict:
    return {
        "smiles": entry.smiles,
        "price_per_gram": entry.price_per_gram,
        "source": entry.source,
        "lead_time_days": entry.lead_time_days,
        "available": entry.available,
        "url": entry.url,
    }
