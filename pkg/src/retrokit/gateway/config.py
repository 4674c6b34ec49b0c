"""Gateway configuration: YAML file plus environment overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from pathlib import Path

import yaml

from ..onestep import StrategyConfig
from ..search import SearchConfig

ENV_PORT = "RETROKIT_PORT"
ENV_DATA_DIR = "RETROKIT_DATA_DIR"


@dataclass(frozen=True)
class AppConfig:
    port: int = 8000
    data_dir: Path = Path("./retrokit-data")
    templates_file: Path | None = None
    corpus_file: Path | None = None
    buyables_file: Path | None = None
    strategies: tuple[str, ...] = ("template_relevance", "retrosim")
    auth_token: str | None = None
    search: SearchConfig = field(default_factory=SearchConfig)
    strategy: StrategyConfig = field(default_factory=StrategyConfig)
    workers: int = 2

    @classmethod
    def load(cls, path: str | Path | None = None) -> "AppConfig":
        raw: dict = {}
        if path is not None:
            with open(path, encoding="utf-8") as handle:
                raw = yaml.safe_load(handle) or {}
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "AppConfig":
        search_kwargs = dict(raw.get("search") or {})
        if "strategies" in search_kwargs:
            search_kwargs["strategies"] = tuple(search_kwargs["strategies"])
        strategy_kwargs = dict(raw.get("strategy") or {})
        config = cls(
            port=int(raw.get("port", 8000)),
            data_dir=Path(raw.get("data_dir", "./retrokit-data")),
            templates_file=_opt_path(raw.get("templates_file")),
            corpus_file=_opt_path(raw.get("corpus_file")),
            buyables_file=_opt_path(raw.get("buyables_file")),
            strategies=tuple(raw.get("strategies", ("template_relevance", "retrosim"))),
            auth_token=raw.get("auth_token"),
            search=SearchConfig(**search_kwargs),
            strategy=StrategyConfig(**strategy_kwargs),
            workers=int(raw.get("workers", 2)),
        )
        return config.with_env_overrides()

    def with_env_overrides(self) -> "AppConfig":
        config = self
        if os.environ.get(ENV_PORT):
            config = replace(config, port=int(os.environ[ENV_PORT]))
        if os.environ.get(ENV_DATA_DIR):
            config = replace(config, data_dir=Path(os.environ[ENV_DATA_DIR]))
        return config


def _opt_path(value) -> Path | None:
    return Path(value) if value else None
