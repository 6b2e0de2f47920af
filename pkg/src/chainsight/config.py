"""Application configuration and store assembly for the CLI and service."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .agents import ENV_LLM_URL, MockBackend, OpenAIChatBackend, RetrievalStores
from .centrality import salience
from .kg import KnowledgeGraph, load_graph
from .traversal import TraversalConfig
from .vecstore import (
    HashingEmbedder,
    MODALITY_FACTOR,
    build_index,
    build_node_index,
    load_factor_definitions,
    load_factor_table,
    load_news_corpus,
)
from .verbalizer import PhraseTable, load_phrase_table, render_factor_shell

# flat string/number keys that a CHAINSIGHT_<KEY> env var may override
_ENV_KEYS = {
    "graph": str,
    "factors": str,
    "news": str,
    "factor_definitions": str,
    "phrase_table": str,
    "portfolio": str,
    "scenario": str,
    "backend_mode": str,
    "model": str,
    "host": str,
    "port": int,
    "embedder_dimension": int,
}


@dataclass
class AppConfig:
    """Paths to data files plus embedder, traversal, backend and bind options.

    File paths are resolved relative to the config file's directory when
    loaded from disk. Environment variables CHAINSIGHT_<KEY> override file
    values; live backend mode additionally requires CHAINSIGHT_LLM_URL.
    """

    graph: str | None = None
    factors: str | None = None
    news: str | None = None
    factor_definitions: str | None = None
    phrase_table: str | None = None
    portfolio: str | None = None
    scenario: str | None = None
    embedder_dimension: int = 512
    backend_mode: str = "mock"  # live | mock
    model: str = "gpt-4o"
    host: str = "127.0.0.1"
    port: int = 8765
    traversal: TraversalConfig = field(default_factory=TraversalConfig)

    def __post_init__(self) -> None:
        if self.backend_mode not in ("live", "mock"):
            raise ValueError("backend_mode must be live|mock")

    def validate_files(self) -> None:
        """Referenced files must exist; live mode needs the endpoint env var."""
        for label in ("graph", "factors", "news", "factor_definitions",
                      "phrase_table", "portfolio", "scenario"):
            value = getattr(self, label)
            if value is not None and not Path(value).exists():
                raise FileNotFoundError(f"configured {label} file not found: {value}")
        if self.backend_mode == "live" and not os.environ.get(ENV_LLM_URL):
            raise ValueError(f"live backend mode requires {ENV_LLM_URL}")


def load_config(path: str | Path | None = None) -> AppConfig:
    """Load a JSON config file and apply environment overrides."""
    raw: dict[str, Any] = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        raw = json.loads(path.read_text())
        base = path.parent

    traversal_raw = raw.pop("traversal", {})
    config = AppConfig(**raw)
    if traversal_raw:
        config.traversal = TraversalConfig(**traversal_raw)

    for key in ("graph", "factors", "news", "factor_definitions",
                "phrase_table", "portfolio", "scenario"):
        value = getattr(config, key)
        if value is not None:
            setattr(config, key, str((base / value).resolve()))

    for key, caster in _ENV_KEYS.items():
        env = os.environ.get(f"CHAINSIGHT_{key.upper()}")
        if env is not None:
            setattr(config, key, caster(env))
    return config


def load_graph_file(path: str) -> KnowledgeGraph:
    with open(path, "r", encoding="utf-8") as handle:
        return load_graph(handle)


def build_stores(config: AppConfig) -> RetrievalStores:
    """Load every data file and build the read-only retrieval stores."""
    if not (config.graph and config.factors and config.news and config.factor_definitions):
        raise ValueError("config must set graph, factors, news and factor_definitions")
    graph = load_graph_file(config.graph)
    table = salience(graph)
    embedder = HashingEmbedder(config.embedder_dimension)

    with open(config.factor_definitions, "r", encoding="utf-8") as handle:
        definitions = load_factor_definitions(handle)
    with open(config.factors, "r", encoding="utf-8") as handle:
        records = load_factor_table(handle, definitions)
    factor_index = build_index(
        [render_factor_shell(r) for r in records], embedder, MODALITY_FACTOR
    )

    with open(config.news, "r", encoding="utf-8") as handle:
        news_shells = load_news_corpus(handle)
    news_index = build_index(news_shells, embedder, "news")

    phrase_table: PhraseTable | None = None
    if config.phrase_table:
        with open(config.phrase_table, "r", encoding="utf-8") as handle:
            phrase_table = load_phrase_table(handle)

    return RetrievalStores(
        graph=graph,
        table=table,
        node_index=build_node_index(graph, embedder),
        factor_index=factor_index,
        news_index=news_index,
        embedder=embedder,
        traversal_config=dataclasses.replace(config.traversal),
        phrase_table=phrase_table,
    )


def make_backend(config: AppConfig):
    if config.backend_mode == "mock":
        if not config.scenario:
            raise ValueError("mock backend mode requires a scenario file")
        with open(config.scenario, "r", encoding="utf-8") as handle:
            return MockBackend.from_file(handle)
    return OpenAIChatBackend(model=config.model)
