"""Building-block catalog: ingestion, canonical lookup, price gating,
and substructure search.

The catalog is an in-memory map keyed by canonical SMILES.  Ingest is
atomic (a bad row aborts the whole file) and publishes a fresh immutable
snapshot, so lookups never lock.
"""

from __future__ import annotations

import csv
import json
import threading
from dataclasses import asdict, dataclass
from pathlib import Path

from .chem import ChemError, MolGraph, PatternGraph, canonicalize, has_substructure, parse_smiles


class BadRow(ValueError):
    """A malformed catalog row; ingest is aborted without side effects."""

    def __init__(self, line_number: int, cause: str):
        super().__init__(f"line {line_number}: {cause}")
        self.line_number = line_number
        self.cause = cause


@dataclass(frozen=True)
class CatalogEntry:
    smiles: str
    price_per_gram: float
    source: str = ""
    lead_time_days: int | None = None
    available: bool = True
    url: str | None = None


_CSV_COLUMNS = ["smiles", "price_per_g", "source", "lead_time_days", "available", "url"]


def _parse_bool(raw: str) -> bool:
    return raw.strip().lower() in ("1", "true", "yes", "y", "t", "")


def _row_to_entry(row: dict, line_number: int) -> CatalogEntry:
    smiles = (row.get("smiles") or "").strip()
    if not smiles:
        raise BadRow(line_number, "missing smiles")
    try:
        canonical = canonicalize(smiles)
    except ChemError as exc:
        raise BadRow(line_number, f"unparsable smiles: {exc}") from exc
    raw_price = row.get("price_per_g", row.get("price_per_gram"))
    try:
        price = float(raw_price)
    except (TypeError, ValueError):
        raise BadRow(line_number, f"bad price {raw_price!r}") from None
    if price <= 0:
        raise BadRow(line_number, f"price must be positive, got {price}")
    lead_raw = row.get("lead_time_days")
    lead = None
    if lead_raw not in (None, ""):
        try:
            lead = int(lead_raw)
        except (TypeError, ValueError):
            raise BadRow(line_number, f"bad lead_time_days {lead_raw!r}") from None
    available = row.get("available", True)
    if isinstance(available, str):
        available = _parse_bool(available)
    url = row.get("url") or None
    return CatalogEntry(
        smiles=canonical,
        price_per_gram=price,
        source=str(row.get("source") or ""),
        lead_time_days=lead,
        available=bool(available),
        url=url,
    )


class Catalog:
    """Read-mostly building-block store with atomic batched writes."""

    def __init__(self):
        self._entries: dict[str, CatalogEntry] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> list[CatalogEntry]:
        snapshot = self._entries
        return [snapshot[key] for key in sorted(snapshot)]

    def import_catalog(self, path: str | Path, fmt: str | None = None) -> int:
        """Ingest a CSV or JSONL catalog file; returns rows ingested.

        Duplicate molecules keep the cheapest entry.  Any bad row raises
        ``BadRow`` and leaves the catalog untouched.
        """
        path = Path(path)
        if fmt is None:
            fmt = "jsonl" if path.suffix in (".jsonl", ".json") else "csv"
        if fmt not in ("csv", "jsonl"):
            raise ValueError(f"unsupported format {fmt!r}")
        rows: list[CatalogEntry] = []
        with open(path, newline="", encoding="utf-8") as handle:
            if fmt == "csv":
                reader = csv.DictReader(handle)
                if reader.fieldnames is None or "smiles" not in reader.fieldnames:
                    raise BadRow(1, "missing header with 'smiles' column")
                for line_number, row in enumerate(reader, start=2):
                    rows.append(_row_to_entry(row, line_number))
            else:
                for line_number, line in enumerate(handle, start=1):
                    line = line.strip()
                    if not line:
                        continue
                    try:
                        row = json.loads(line)
                    except json.JSONDecodeError as exc:
                        raise BadRow(line_number, f"bad json: {exc}") from exc
                    rows.append(_row_to_entry(row, line_number))
        return self._apply(rows)

    def import_entries(self, raw_rows: list[dict]) -> int:
        """Bulk upload from already-decoded rows (gateway endpoint)."""
        rows = [_row_to_entry(row, i + 1) for i, row in enumerate(raw_rows)]
        return self._apply(rows)

    def _apply(self, rows: list[CatalogEntry]) -> int:
        with self._write_lock:
            updated = dict(self._entries)
            for entry in rows:
                existing = updated.get(entry.smiles)
                if existing is None or entry.price_per_gram < existing.price_per_gram:
                    updated[entry.smiles] = entry
            self._entries = updated
        return len(rows)

    def lookup(self, smiles: str, max_price: float = float("inf")) -> CatalogEntry | None:
        """Exact-match lookup after canonicalization.

        Entries priced above ``max_price`` or flagged unavailable are
        treated as absent.  Raises a parse error for bad SMILES.
        """
        return self.lookup_canonical(canonicalize(smiles), max_price)

    def lookup_canonical(
        self, canonical: str, max_price: float = float("inf")
    ) -> CatalogEntry | None:
        entry = self._entries.get(canonical)
        if entry is None or not entry.available or entry.price_per_gram > max_price:
            return None
        return entry

    def substructure_search(
        self, pattern: PatternGraph, limit: int = 100
    ) -> list[CatalogEntry]:
        """Entries containing the pattern, canonical-SMILES ordered."""
        snapshot = self._entries
        hits: list[CatalogEntry] = []
        for key in sorted(snapshot):
            if len(hits) >= limit:
                break
            if has_substructure(pattern, _mol_for(key)):
                hits.append(snapshot[key])
        return hits

    def save_snapshot(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as handle:
            for entry in self.entries():
                handle.write(json.dumps(asdict(entry), sort_keys=True) + "\n")

    @classmethod
    def from_file(cls, path: str | Path, fmt: str | None = None) -> "Catalog":
        catalog = cls()
        catalog.import_catalog(path, fmt)
        return catalog


@dataclass(frozen=True)
class BuyablesView:
    """A catalog frozen behind one price cap, as used during search."""

    catalog: Catalog
    max_price: float = 100.0

    def is_buyable(self, canonical: str) -> bool:
        return self.catalog.lookup_canonical(canonical, self.max_price) is not None

    def entry(self, canonical: str) -> CatalogEntry | None:
        return self.catalog.lookup_canonical(canonical, self.max_price)


_MOL_CACHE: dict[str, MolGraph] = {}


def _mol_for(canonical: str) -> MolGraph:
    mol = _MOL_CACHE.get(canonical)
    if mol is None:
        mol = parse_smiles(canonical)
        if len(_MOL_CACHE) > 50000:
            _MOL_CACHE.clear()
        _MOL_CACHE[canonical] = mol
    return mol
