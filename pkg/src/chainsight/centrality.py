"""Structural node importance on the undirected graph projection.

Three normalized measures per node, degree, closeness (component-scoped,
Wasserman-Faust corrected), and betweenness (Brandes), are averaged into a
single salience score that drives traversal depth. All measures treat the
graph as undirected and unweighted, and count parallel edges once.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import IO

from .kg import KnowledgeGraph

_EPS = 1e-12


@dataclass(frozen=True)
class NodeCentrality:
    degree: float
    closeness: float
    betweenness: float
    salience: float


@dataclass
class CentralityTable:
    """Per-node degree/closeness/betweenness and their mean (salience)."""

    scores: dict[str, NodeCentrality]

    def __contains__(self, node_id: str) -> bool:
        return node_id in self.scores

    def __getitem__(self, node_id: str) -> NodeCentrality:
        return self.scores[node_id]

    def salience_of(self, node_id: str) -> float:
        return self.scores[node_id].salience

    def median_salience(self) -> float:
        """Median of all salience values; 0.0 on an empty table."""
        values = sorted(s.salience for s in self.scores.values())
        if not values:
            return 0.0
        mid = len(values) // 2
        if len(values) % 2:
            return values[mid]
        return (values[mid - 1] + values[mid]) / 2.0

    def salience_quantile(self, q: float) -> float:
        """Linear-interpolated quantile of the salience distribution."""
        values = sorted(s.salience for s in self.scores.values())
        if not values:
            return 0.0
        if len(values) == 1:
            return values[0]
        pos = q * (len(values) - 1)
        lo = int(pos)
        hi = min(lo + 1, len(values) - 1)
        frac = pos - lo
        return values[lo] * (1 - frac) + values[hi] * frac

    def to_table_text(self) -> str:
        """Tabular export: node id, degree, closeness, betweenness, salience.

        Fixed column order, 12 significant digits, one node per line.
        """
        lines = ["node_id\tdegree\tcloseness\tbetweenness\tsalience"]
        for node_id in sorted(self.scores):
            s = self.scores[node_id]
            lines.append(
                f"{node_id}\t{s.degree:.12g}\t{s.closeness:.12g}"
                f"\t{s.betweenness:.12g}\t{s.salience:.12g}"
            )
        return "\n".join(lines) + "\n"

    def write_table(self, stream: IO[str]) -> None:
        stream.write(self.to_table_text())


def _undirected_adjacency(graph: KnowledgeGraph) -> dict[str, list[str]]:
    """Simple undirected adjacency; parallel edges collapse, self-loops drop.

    Edges with endpoints missing from the node map (possible on graphs
    built by the lenient parser) are skipped rather than crashing.
    """
    adj: dict[str, set[str]] = {node_id: set() for node_id in graph.nodes}
    for edge in graph.edges:
        if edge.src == edge.dst or edge.src not in adj or edge.dst not in adj:
            continue
        adj[edge.src].add(edge.dst)
        adj[edge.dst].add(edge.src)
    # insertion order of graph.nodes keeps traversal deterministic
    return {node_id: sorted(adj[node_id]) for node_id in graph.nodes}


def _bfs_distances(adj: dict[str, list[str]], source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for w in adj[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def degree_centrality(graph: KnowledgeGraph) -> dict[str, float]:
    """Distinct-undirected-neighbor count over (n - 1); 0 when n <= 1."""
    n = graph.node_count
    if n <= 1:
        return {node_id: 0.0 for node_id in graph.nodes}
    adj = _undirected_adjacency(graph)
    return {node_id: len(adj[node_id]) / (n - 1) for node_id in graph.nodes}


def closeness_centrality(graph: KnowledgeGraph) -> dict[str, float]:
    """Component-scoped closeness with the Wasserman-Faust correction.

    For node v with reachable set R(v) (v excluded):
    ``(|R| / (n-1)) * (|R| / sum of distances)``. Isolated nodes score 0.
    """
    n = graph.node_count
    adj = _undirected_adjacency(graph)
    out: dict[str, float] = {}
    for node_id in graph.nodes:
        dist = _bfs_distances(adj, node_id)
        reach = len(dist) - 1
        if reach == 0 or n <= 1:
            out[node_id] = 0.0
            continue
        total = sum(dist.values())
        out[node_id] = (reach / (n - 1)) * (reach / total)
    return out


def betweenness_centrality(graph: KnowledgeGraph) -> dict[str, float]:
    """Brandes accumulation, unweighted, endpoints excluded.

    Normalized by (n-1)(n-2)/2 for n > 2; all zeros otherwise. Each
    unordered pair is counted once.
    """
    n = graph.node_count
    scores = {node_id: 0.0 for node_id in graph.nodes}
    if n <= 2:
        return scores
    adj = _undirected_adjacency(graph)

    for source in graph.nodes:
        # single-source shortest-path counting
        stack: list[str] = []
        preds: dict[str, list[str]] = {v: [] for v in adj}
        sigma = {v: 0 for v in adj}
        dist = {v: -1 for v in adj}
        sigma[source] = 1
        dist[source] = 0
        queue = deque([source])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        # dependency accumulation in reverse BFS order
        delta = {v: 0.0 for v in adj}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += (sigma[v] / sigma[w]) * (1 + delta[w])
            if w != source:
                scores[w] += delta[w]

    # undirected: every pair was seen from both endpoints
    norm = (n - 1) * (n - 2)
    return {node_id: value / norm for node_id, value in scores.items()}


def salience(graph: KnowledgeGraph) -> CentralityTable:
    """Compute all three measures once and average them per node.

    The table is cached on the graph object and reused by traversal;
    recomputation on an unchanged graph returns the identical table.
    """
    cached = getattr(graph, "_centrality_cache", None)
    if cached is not None:
        return cached
    deg = degree_centrality(graph)
    clo = closeness_centrality(graph)
    bet = betweenness_centrality(graph)
    scores = {
        node_id: NodeCentrality(
            degree=deg[node_id],
            closeness=clo[node_id],
            betweenness=bet[node_id],
            salience=(deg[node_id] + clo[node_id] + bet[node_id]) / 3.0,
        )
        for node_id in graph.nodes
    }
    table = CentralityTable(scores=scores)
    graph._centrality_cache = table
    return table
