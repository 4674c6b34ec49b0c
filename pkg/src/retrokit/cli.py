"""Command-line driver: batch planning, data ingestion, and serving."""

from __future__ import annotations

import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import click

from .buyables import BadRow, BuyablesView, Catalog
from .chem import ChemError, canonicalize, parse_retro_template
from .datasets import load_buyables, load_corpus, load_templates
from .gateway import AppConfig, create_app
from .onestep import ReactionCorpus, TemplateStore
from .pathways import compute_metrics, sort_routes
from .search import (
    Expander,
    enumerate_routes,
    run_search,
    serialize_graph,
    serialize_route,
)

EXIT_OK = 0
EXIT_MISSING_FILE = 2
EXIT_BAD_CONFIG = 3


@click.group()
@click.version_option(package_name="retrokit")
def main():
    """Desk-scale synthesis planning toolkit."""


def _load_app_config(config_path: str | None) -> AppConfig:
    if config_path is None:
        return AppConfig()
    if not Path(config_path).exists():
        click.echo(f"config file not found: {config_path}", err=True)
        sys.exit(EXIT_MISSING_FILE)
    try:
        return AppConfig.load(config_path)
    except Exception as exc:
        click.echo(f"invalid config: {exc}", err=True)
        sys.exit(EXIT_BAD_CONFIG)


def _engine_parts(config: AppConfig):
    templates = (
        TemplateStore.from_jsonl(config.templates_file)
        if config.templates_file
        else load_templates()
    )
    corpus = (
        ReactionCorpus.from_jsonl(config.corpus_file)
        if config.corpus_file
        else load_corpus()
    )
    catalog = (
        Catalog.from_file(config.buyables_file)
        if config.buyables_file
        else load_buyables()
    )
    return templates, corpus, catalog


@main.command()
@click.option("--targets", "targets_path", required=True, type=str)
@click.option("--config", "config_path", type=str, default=None)
@click.option("--out", "out_dir", required=True, type=str)
@click.option("--jobs", type=int, default=None, help="Worker count (default: CPUs).")
def plan(targets_path: str, config_path: str | None, out_dir: str, jobs: int | None):
    """Run the tree builder over a target list, one result file each.

    Unsolved targets are results, not errors; the exit code is zero as
    long as the inputs were readable.
    """
    if not Path(targets_path).exists():
        click.echo(f"targets file not found: {targets_path}", err=True)
        sys.exit(EXIT_MISSING_FILE)
    config = _load_app_config(config_path)
    try:
        templates, corpus, catalog = _engine_parts(config)
    except FileNotFoundError as exc:
        click.echo(f"data file not found: {exc}", err=True)
        sys.exit(EXIT_MISSING_FILE)

    targets = [
        line.strip()
        for line in Path(targets_path).read_text(encoding="utf-8").splitlines()
        if line.strip() and not line.strip().startswith("#")
    ]
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    view = BuyablesView(catalog, config.search.max_price)
    expander = Expander(
        templates, corpus, config.search.strategies, config.strategy, view
    )

    def plan_one(index: int, smiles: str) -> bool:
        doc: dict = {"target": smiles, "index": index, "seed": config.search.random_seed}
        try:
            graph = run_search(smiles, config.search, expander, view)
            routes = enumerate_routes(graph, config.search)
            scored = sort_routes(
                [
                    (r, compute_metrics(r, catalog, config.search.max_price))
                    for r in routes
                ]
            )
            doc["solved"] = graph.root.buyable or (graph.root.proven and bool(routes))
            doc["graph"] = serialize_graph(graph)
            doc["routes"] = [
                serialize_route(r, m.as_dict()) for r, m in scored
            ]
        except ChemError as exc:
            doc["solved"] = False
            doc["error"] = str(exc)
        path = out / f"target_{index:04d}.json"
        path.write_text(
            json.dumps(doc, sort_keys=True, indent=1) + "\n", encoding="utf-8"
        )
        return bool(doc["solved"])

    worker_count = jobs or os.cpu_count() or 1
    if worker_count > 1:
        with ThreadPoolExecutor(max_workers=worker_count) as pool:
            solved = sum(
                pool.map(lambda pair: plan_one(*pair), enumerate(targets))
            )
    else:
        solved = sum(plan_one(i, t) for i, t in enumerate(targets))
    click.echo(f"solved {solved}/{len(targets)}")
    sys.exit(EXIT_OK)


@main.command("import-buyables")
@click.argument("path", type=str)
@click.option("--data-dir", type=str, default="./retrokit-data")
def import_buyables(path: str, data_dir: str):
    """Validate a catalog file and store its canonical snapshot."""
    if not Path(path).exists():
        click.echo(f"file not found: {path}", err=True)
        sys.exit(EXIT_MISSING_FILE)
    catalog = Catalog()
    try:
        count = catalog.import_catalog(path)
    except BadRow as exc:
        click.echo(f"bad row: {exc}", err=True)
        sys.exit(1)
    target = Path(data_dir)
    target.mkdir(parents=True, exist_ok=True)
    catalog.save_snapshot(target / "buyables.jsonl")
    click.echo(f"{count} entries")


@main.command("import-templates")
@click.argument("path", type=str)
@click.option("--data-dir", type=str, default="./retrokit-data")
def import_templates(path: str, data_dir: str):
    """Validate a template file and copy it into the data directory."""
    source = Path(path)
    if not source.exists():
        click.echo(f"file not found: {path}", err=True)
        sys.exit(EXIT_MISSING_FILE)
    count = 0
    for line_number, line in enumerate(
        source.read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            parse_retro_template(rec["retro_smarts"], rec["id"])
        except Exception as exc:
            click.echo(f"line {line_number}: {exc}", err=True)
            sys.exit(1)
        count += 1
    target = Path(data_dir)
    target.mkdir(parents=True, exist_ok=True)
    (target / "templates.jsonl").write_text(
        source.read_text(encoding="utf-8"), encoding="utf-8"
    )
    click.echo(f"{count} templates")


@main.command("import-corpus")
@click.argument("path", type=str)
@click.option("--data-dir", type=str, default="./retrokit-data")
def import_corpus(path: str, data_dir: str):
    """Validate a reaction corpus file and copy it into the data dir."""
    source = Path(path)
    if not source.exists():
        click.echo(f"file not found: {path}", err=True)
        sys.exit(EXIT_MISSING_FILE)
    template_file = Path(data_dir) / "templates.jsonl"
    store = (
        TemplateStore.from_jsonl(template_file)
        if template_file.exists()
        else load_templates()
    )
    count = 0
    for line_number, line in enumerate(
        source.read_text(encoding="utf-8").splitlines(), start=1
    ):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
            lhs, rhs = rec["rxn_smiles"].split(">>")
            canonicalize(lhs)
            canonicalize(rhs)
            if store.get(rec["template_id"]) is None:
                raise ValueError(f"unknown template id {rec['template_id']!r}")
        except Exception as exc:
            click.echo(f"line {line_number}: {exc}", err=True)
            sys.exit(1)
        count += 1
    target = Path(data_dir)
    target.mkdir(parents=True, exist_ok=True)
    (target / "reactions.jsonl").write_text(
        source.read_text(encoding="utf-8"), encoding="utf-8"
    )
    click.echo(f"{count} reactions")


@main.command()
@click.option("--config", "config_path", type=str, default=None)
@click.option("--host", type=str, default="127.0.0.1")
def serve(config_path: str | None, host: str):
    """Start the HTTP gateway."""
    import uvicorn

    config = _load_app_config(config_path)
    app = create_app(config)
    uvicorn.run(app, host=host, port=config.port)


if __name__ == "__main__":
    main()
