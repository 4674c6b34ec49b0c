"""Loaders for the bundled desk-scale data files."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .buyables import Catalog
from .onestep import ReactionCorpus, TemplateStore


def data_path(name: str) -> Path:
    return Path(resources.files("retrokit").joinpath("data", name))


def load_templates() -> TemplateStore:
    return TemplateStore.from_jsonl(data_path("templates.jsonl"))


def load_corpus() -> ReactionCorpus:
    return ReactionCorpus.from_jsonl(data_path("reactions.jsonl"))


def load_buyables() -> Catalog:
    return Catalog.from_file(data_path("buyables.csv"), "csv")


def load_drug_smiles() -> list[tuple[str, str]]:
    """The bundled drug-like parser corpus as (smiles, name) pairs."""
    out = []
    for line in data_path("drug_smiles.txt").read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t")
        out.append((parts[0], parts[1] if len(parts) > 1 else ""))
    return out


def load_toy_targets() -> list[str]:
    return [
        line.strip()
        for line in data_path("toy_targets.txt").read_text(encoding="utf-8").splitlines()
        if line.strip()
    ]
