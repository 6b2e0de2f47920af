"""Seed resolution, salience-adaptive expansion, and path extraction.

Query entities are matched to graph nodes through the node-shell embedding
index; each seed's traversal depth then adapts to its structural role:
high-salience hubs expose their neighborhood in one hop while peripheral
nodes get extra hops. The expanded subgraph is distilled into ranked simple
paths, the unit of retrieval handed to the verbalizer.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Iterable

from .centrality import CentralityTable
from .kg import Edge, EdgeKind, KnowledgeGraph, Node, find_nodes_by_name
from .vecstore import Embedder, VectorIndex, search

FORWARD = "forward"
INVERSE = "inverse"

WEIGHT_PRODUCT = "weight-product"
SALIENCE_SUM = "salience-sum"


@dataclass(frozen=True)
class SeedMatch:
    mention: str
    node: str
    similarity: float


@dataclass(frozen=True)
class PathStep:
    kind: EdgeKind
    orientation: str  # forward | inverse
    weight_percent: float | None = None


@dataclass(frozen=True)
class RiskPath:
    """A simple node/edge chain with its ranking score."""

    nodes: tuple[str, ...]
    edges: tuple[PathStep, ...]
    score: float

    def to_record(self) -> dict[str, Any]:
        return {
            "rec": "path",
            "nodes": list(self.nodes),
            "edges": [
                {
                    "kind": step.kind.value,
                    "orientation": step.orientation,
                    "weight_percent": step.weight_percent,
                }
                for step in self.edges
            ],
            "score": self.score,
        }

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "RiskPath":
        return cls(
            nodes=tuple(rec["nodes"]),
            edges=tuple(
                PathStep(
                    kind=EdgeKind(step["kind"]),
                    orientation=step["orientation"],
                    weight_percent=step.get("weight_percent"),
                )
                for step in rec["edges"]
            ),
            score=float(rec.get("score", 0.0)),
        )


@dataclass
class TraversalConfig:
    """Knobs for depth policy and path ranking.

    The salience threshold splits hubs from peripheral seeds; in quantile
    mode it is a quantile of the graph's salience distribution (0.5 =
    median), in absolute mode a raw salience value. Ties go to the hub
    side.
    """

    salience_threshold_mode: str = "quantile"  # quantile | absolute
    salience_threshold: float = 0.5
    hub_hops: int = 1
    peripheral_hops: int = 2
    max_hops: int = 3
    max_paths: int | None = 20
    ranking: str = WEIGHT_PRODUCT
    seed_similarity_floor: float = 0.35

    def __post_init__(self) -> None:
        if not 1 <= self.hub_hops <= self.peripheral_hops <= self.max_hops:
            raise ValueError(
                "require 1 <= hub_hops <= peripheral_hops <= max_hops, got "
                f"{self.hub_hops}/{self.peripheral_hops}/{self.max_hops}"
            )
        if self.salience_threshold_mode not in ("quantile", "absolute"):
            raise ValueError("salience_threshold_mode must be quantile|absolute")
        if self.ranking not in (WEIGHT_PRODUCT, SALIENCE_SUM):
            raise ValueError(f"unknown ranking {self.ranking!r}")
        if self.max_paths is not None and self.max_paths < 1:
            raise ValueError("max_paths must be >= 1 or None")


@dataclass
class Subgraph:
    """Union of per-seed BFS neighborhoods, with provenance.

    Carries the induced edge set (cross-edges between reached nodes are
    kept), each node's hop distance from its nearest seed, the per-seed
    hop budgets, and a salience snapshot so path ranking needs no second
    look at the centrality table.
    """

    nodes: dict[str, Node]
    edges: list[Edge]
    hop_distance: dict[str, int]
    seed_budgets: dict[str, int]
    salience: dict[str, float]

    @property
    def node_count(self) -> int:
        return len(self.nodes)


def resolve_seeds(
    mentions: list[str],
    node_index: VectorIndex,
    k: int = 1,
    embedder: Embedder | None = None,
    graph: KnowledgeGraph | None = None,
    similarity_floor: float = 0.35,
) -> list[SeedMatch]:
    """Match entity mentions to graph nodes by shell-embedding similarity.

    Each mention is embedded with the same model that embedded the node
    shells and matched against the node index. When the best similarity
    falls below the floor and a graph is supplied, a case-insensitive
    name lookup takes over as lexical fallback.
    """
    matches: list[SeedMatch] = []
    for mention in mentions:
        hits = search(node_index, mention, k=k, embedder=embedder)
        best = hits[0][1] if hits else 0.0
        if best < similarity_floor and graph is not None:
            scores = {
                shell.metadata["node_id"]: score
                for shell, score in search(
                    node_index, mention, k=max(len(node_index), 1), embedder=embedder
                )
            }
            for node in find_nodes_by_name(graph, mention)[:k]:
                matches.append(
                    SeedMatch(
                        mention=mention,
                        node=node.id,
                        similarity=scores.get(node.id, 0.0),
                    )
                )
            continue
        for shell, score in hits:
            matches.append(
                SeedMatch(mention=mention, node=shell.metadata["node_id"], similarity=score)
            )
    return matches


def hop_budget(
    salience_value: float, table: CentralityTable, config: TraversalConfig
) -> int:
    """Traversal depth for one seed: hubs get fewer hops than periphery."""
    if config.salience_threshold_mode == "quantile":
        threshold = table.salience_quantile(config.salience_threshold)
    else:
        threshold = config.salience_threshold
    hops = config.hub_hops if salience_value >= threshold else config.peripheral_hops
    return min(hops, config.max_hops)


def traverse(
    graph: KnowledgeGraph,
    seeds: list[SeedMatch],
    table: CentralityTable,
    config: TraversalConfig | None = None,
) -> Subgraph:
    """Breadth-first expansion from every seed over both edge directions.

    Each seed expands up to its own hop budget; the result is the union
    neighborhood with per-node distance to the nearest seed.

    Raises:
        KeyError: a seed node that does not exist in the graph.
    """
    config = config or TraversalConfig()
    for seed in seeds:
        if seed.node not in graph.nodes:
            raise KeyError(f"unknown seed node {seed.node!r}")

    budgets: dict[str, int] = {}
    for seed in seeds:
        budget = hop_budget(table.salience_of(seed.node), table, config)
        budgets[seed.node] = max(budget, budgets.get(seed.node, 0))

    distance: dict[str, int] = {}
    for seed_id, budget in budgets.items():
        frontier = [seed_id]
        seen = {seed_id: 0}
        for depth in range(1, budget + 1):
            nxt: list[str] = []
            for node_id in frontier:
                for far_id in sorted(graph.undirected_neighbors(node_id)):
                    if far_id not in seen:
                        seen[far_id] = depth
                        nxt.append(far_id)
            frontier = nxt
        for node_id, dist in seen.items():
            if node_id not in distance or dist < distance[node_id]:
                distance[node_id] = dist

    nodes = {node_id: graph.nodes[node_id] for node_id in graph.nodes if node_id in distance}
    edges = [e for e in graph.edges if e.src in distance and e.dst in distance]
    return Subgraph(
        nodes=nodes,
        edges=edges,
        hop_distance=dict(sorted(distance.items())),
        seed_budgets=budgets,
        salience={node_id: table.salience_of(node_id) for node_id in nodes},
    )


def _adjacency(subgraph: Subgraph) -> dict[str, list[tuple[str, PathStep]]]:
    adj: dict[str, list[tuple[str, PathStep]]] = {n: [] for n in subgraph.nodes}
    for edge in subgraph.edges:
        adj[edge.src].append(
            (edge.dst, PathStep(edge.kind, FORWARD, edge.weight_percent))
        )
        adj[edge.dst].append(
            (edge.src, PathStep(edge.kind, INVERSE, edge.weight_percent))
        )
    for steps in adj.values():
        steps.sort(key=lambda s: (s[0], s[1].kind.value, s[1].orientation))
    return adj


def _score(nodes: list[str], steps: list[PathStep], ranking: str, sal: dict[str, float]) -> float:
    if ranking == WEIGHT_PRODUCT:
        score = 1.0
        for step in steps:
            if step.weight_percent is not None:
                score *= step.weight_percent / 100.0
        return score
    return sum(sal[n] for n in nodes) / len(nodes)


def extract_paths(
    subgraph: Subgraph,
    seeds: list[SeedMatch],
    config: TraversalConfig | None = None,
) -> list[RiskPath]:
    """Distill the expanded neighborhood into ranked narrative paths.

    From each seed, every maximal simple path within that seed's hop
    budget is a candidate: a path ends where the budget runs out or no
    unvisited neighbor remains, so prefixes of a longer chain are not
    reported separately (single-hop facts still surface whenever that is
    as far as the walk can go). Candidates are scored by the configured
    ranking and the best ``max_paths`` returned, ties broken by node-id
    sequence.
    """
    config = config or TraversalConfig()
    adj = _adjacency(subgraph)
    found: dict[tuple, RiskPath] = {}

    seed_ids: list[str] = []
    for seed in seeds:
        if seed.node not in seed_ids:
            seed_ids.append(seed.node)

    for seed_id in seed_ids:
        if seed_id not in subgraph.nodes:
            continue
        budget = subgraph.seed_budgets.get(seed_id, config.max_hops)

        def walk(nodes: list[str], steps: list[PathStep]) -> None:
            tip = nodes[-1]
            extensions = (
                [(far, step) for far, step in adj[tip] if far not in nodes]
                if len(steps) < budget
                else []
            )
            if not extensions:
                if steps:
                    key = (tuple(nodes), tuple(steps))
                    if key not in found:
                        found[key] = RiskPath(
                            nodes=tuple(nodes),
                            edges=tuple(steps),
                            score=_score(nodes, steps, config.ranking, subgraph.salience),
                        )
                return
            for far, step in extensions:
                walk(nodes + [far], steps + [step])

        walk([seed_id], [])

    ranked = sorted(
        found.values(),
        key=lambda p: (
            -p.score,
            p.nodes,
            tuple((s.kind.value, s.orientation) for s in p.edges),
        ),
    )
    if config.max_paths is not None:
        ranked = ranked[: config.max_paths]
    return ranked


def subgraph_records(subgraph: Subgraph) -> list[dict[str, Any]]:
    """Line-delimited representation: node and edge records, kg format."""
    records: list[dict[str, Any]] = [n.to_record() for n in subgraph.nodes.values()]
    records.extend(e.to_record() for e in subgraph.edges)
    return records


def serialize_paths(paths: Iterable[RiskPath]) -> str:
    return "\n".join(json.dumps(p.to_record(), sort_keys=True) for p in paths) + "\n"


def load_paths(source: str) -> list[RiskPath]:
    paths = []
    for line in source.splitlines():
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        if rec.get("rec") != "path":
            raise ValueError(f"expected path record, got {rec.get('rec')!r}")
        paths.append(RiskPath.from_record(rec))
    return paths
