from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from chainsight.agents import MockBackend, Portfolio, RetrievalStores
from chainsight.centrality import salience
from chainsight.config import AppConfig, build_stores, load_config
from chainsight.kg import Edge, EdgeKind, KnowledgeGraph, Node, NodeKind, load_graph

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA


@pytest.fixture(scope="session")
def paper_graph() -> KnowledgeGraph:
    return load_graph((DATA / "paper_path_graph.jsonl").read_text())


@pytest.fixture(scope="session")
def coltan_graph() -> KnowledgeGraph:
    return load_graph((DATA / "coltan_graph.jsonl").read_text())


@pytest.fixture(scope="session")
def synthetic_graph() -> KnowledgeGraph:
    return load_graph((DATA / "synthetic_graph_50.jsonl").read_text())


@pytest.fixture(scope="session")
def app_config() -> AppConfig:
    return load_config(DATA / "config.json")


@pytest.fixture(scope="session")
def stores(app_config) -> RetrievalStores:
    return build_stores(app_config)


@pytest.fixture(scope="session")
def portfolio() -> Portfolio:
    return Portfolio.from_json((DATA / "portfolio_top50.json").read_text())


@pytest.fixture()
def mock_backend() -> MockBackend:
    return MockBackend.from_file((DATA / "scenario_coltan.jsonl").read_text())


COLTAN_MESSAGES = [
    "I read about problems in the DRC with coltan.",
    "What has been in the news on this?",
    "Can you walk me through the various ways this could hurt Apple?",
]


def run_coltan_replay(stores, backend, portfolio, on_event=None):
    """Drive the three-turn coltan dialogue; returns the finished session."""
    from chainsight.agents import Session, run_turn

    session = Session(portfolio=portfolio)
    for message in COLTAN_MESSAGES:
        run_turn(session, message, backend, stores, on_event=on_event)
    return session


def product_graph(n: int, undirected_edges: list[tuple[int, int]]) -> KnowledgeGraph:
    """Structural test graph: n product nodes, HasInput edges."""
    nodes = [
        Node(id=f"n{i}", kind=NodeKind.PRODUCT, name=f"Part {i}") for i in range(n)
    ]
    edges = [
        Edge(src=f"n{a}", dst=f"n{b}", kind=EdgeKind.HAS_INPUT)
        for a, b in undirected_edges
    ]
    return KnowledgeGraph(nodes, edges)


def table_for(graph: KnowledgeGraph):
    return salience(graph)
