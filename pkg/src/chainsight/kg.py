"""Typed supply-chain knowledge graph: schema, ingestion, validation, queries.

The graph is a set of typed nodes (companies, products, input products,
industries, locations) joined by directed, optionally weighted economic
relations. Each relation kind carries a fixed (source kinds, target kinds)
signature; loading and validation enforce it. Graphs are immutable after
load and safe for concurrent readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import IO, Any, Iterable, Iterator


class NodeKind(Enum):
    COMPANY = "Company"
    PRODUCT = "Product"
    INPUT_PRODUCT = "InputProduct"
    INPUT_TO_INPUT_PRODUCT = "InputToInputProduct"
    INDUSTRY = "Industry"
    LOCATION = "Location"


class EdgeKind(Enum):
    PRODUCES = "Produces"
    SOLD_BY = "SoldBy"
    BELONGS_TO = "BelongsTo"
    HAS_INPUT = "HasInput"
    INPUT_TO = "InputTo"
    MANUFACTURED_IN = "ManufacturedIn"
    SOURCED_FROM = "SourcedFrom"
    MADE_WITH = "MadeWith"
    INCLUDES_PRODUCT = "IncludesProduct"
    PRODUCTION_LOCATION_FOR = "ProductionLocationFor"


# Nodes that behave as products when they are the source of an edge.
# InputToInputProduct has no dedicated relationship row and reuses the
# product signatures.
_PRODUCT_LIKE = frozenset(
    {NodeKind.PRODUCT, NodeKind.INPUT_PRODUCT, NodeKind.INPUT_TO_INPUT_PRODUCT}
)
_INPUT_LIKE = frozenset({NodeKind.INPUT_PRODUCT, NodeKind.INPUT_TO_INPUT_PRODUCT})

# (allowed source kinds, allowed target kinds) per edge kind.
EDGE_SIGNATURES: dict[EdgeKind, tuple[frozenset[NodeKind], frozenset[NodeKind]]] = {
    EdgeKind.PRODUCES: (
        frozenset({NodeKind.COMPANY}),
        frozenset({NodeKind.PRODUCT, NodeKind.INPUT_PRODUCT}),
    ),
    EdgeKind.SOLD_BY: (_PRODUCT_LIKE, frozenset({NodeKind.COMPANY})),
    EdgeKind.BELONGS_TO: (_PRODUCT_LIKE, frozenset({NodeKind.INDUSTRY})),
    EdgeKind.HAS_INPUT: (_PRODUCT_LIKE, _PRODUCT_LIKE),
    EdgeKind.INPUT_TO: (_PRODUCT_LIKE, _PRODUCT_LIKE),
    EdgeKind.MANUFACTURED_IN: (_PRODUCT_LIKE, frozenset({NodeKind.LOCATION})),
    EdgeKind.SOURCED_FROM: (_PRODUCT_LIKE, frozenset({NodeKind.LOCATION})),
    EdgeKind.MADE_WITH: (_PRODUCT_LIKE, _INPUT_LIKE),
    EdgeKind.INCLUDES_PRODUCT: (
        frozenset({NodeKind.INDUSTRY}),
        frozenset({NodeKind.PRODUCT, NodeKind.INPUT_PRODUCT}),
    ),
    EdgeKind.PRODUCTION_LOCATION_FOR: (
        frozenset({NodeKind.LOCATION}),
        frozenset({NodeKind.PRODUCT}),
    ),
}

# Metadata keys permitted per node kind, with value range checks where the
# value is a bounded number. None means "any scalar".
_PERCENT = (0.0, 100.0)
METADATA_SCHEMA: dict[NodeKind, dict[str, tuple[float, float] | None]] = {
    NodeKind.COMPANY: {"ticker": None, "total_revenue": None},
    NodeKind.PRODUCT: {
        "hs_code": None,
        "total_revenue_share": _PERCENT,
        "production_cost_percentage": _PERCENT,
    },
    NodeKind.INPUT_PRODUCT: {
        "hs_code": None,
        "total_revenue_share": _PERCENT,
        "production_cost_percentage": _PERCENT,
    },
    NodeKind.INPUT_TO_INPUT_PRODUCT: {
        "hs_code": None,
        "total_revenue_share": _PERCENT,
        "production_cost_percentage": _PERCENT,
    },
    NodeKind.INDUSTRY: {"naics_code": None},
    NodeKind.LOCATION: {
        "longitude": (-180.0, 180.0),
        "latitude": (-90.0, 90.0),
        "production_share": _PERCENT,
    },
}


class GraphDocumentError(ValueError):
    """Raised when a graph document cannot be loaded.

    Carries the 1-based record index of the offending line when known.
    """

    def __init__(self, message: str, record_index: int | None = None):
        self.record_index = record_index
        if record_index is not None:
            message = f"record {record_index}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Node:
    id: str
    kind: NodeKind
    name: str
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> dict[str, Any]:
        return {
            "rec": "node",
            "id": self.id,
            "kind": self.kind.value,
            "name": self.name,
            "meta": dict(self.metadata),
        }


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    kind: EdgeKind
    weight_percent: float | None = None

    def to_record(self) -> dict[str, Any]:
        rec: dict[str, Any] = {
            "rec": "edge",
            "src": self.src,
            "dst": self.dst,
            "kind": self.kind.value,
        }
        if self.weight_percent is not None:
            rec["weight_percent"] = self.weight_percent
        return rec


@dataclass
class ValidationIssue:
    category: str  # schema | metadata | reference | value
    message: str
    subject: str  # node id or "src->dst" edge label


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    def add(self, category: str, message: str, subject: str) -> None:
        self.issues.append(ValidationIssue(category, message, subject))

    def __str__(self) -> str:
        if self.ok:
            return "valid: no issues found"
        lines = [f"{len(self.issues)} issue(s) found:"]
        for issue in self.issues:
            lines.append(f"  [{issue.category}] {issue.subject}: {issue.message}")
        return "\n".join(lines)


class KnowledgeGraph:
    """Immutable store of typed nodes and directed, typed edges.

    Maintains per-node outgoing and incoming adjacency mirroring the edge
    list. Construction does not validate; ``load_graph`` rejects bad
    documents and ``validate`` reports violations on built graphs.
    """

    def __init__(self, nodes: Iterable[Node] = (), edges: Iterable[Edge] = ()):
        self.nodes: dict[str, Node] = {}
        self.edges: list[Edge] = []
        self._out: dict[str, list[Edge]] = {}
        self._in: dict[str, list[Edge]] = {}
        for node in nodes:
            self._add_node(node)
        for edge in edges:
            self._add_edge(edge)
        # lazily filled by centrality.salience(); keyed on this object
        self._centrality_cache = None

    def _add_node(self, node: Node) -> None:
        if node.id in self.nodes:
            raise GraphDocumentError(f"duplicate node id {node.id!r}")
        self.nodes[node.id] = node
        self._out[node.id] = []
        self._in[node.id] = []

    def _add_edge(self, edge: Edge) -> None:
        self.edges.append(edge)
        self._out.setdefault(edge.src, []).append(edge)
        self._in.setdefault(edge.dst, []).append(edge)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def out_edges(self, node_id: str) -> list[Edge]:
        return list(self._out.get(node_id, ()))

    def in_edges(self, node_id: str) -> list[Edge]:
        return list(self._in.get(node_id, ()))

    def undirected_neighbors(self, node_id: str) -> set[str]:
        """Distinct far-end ids over both edge directions, excluding self."""
        out = {e.dst for e in self._out.get(node_id, ())}
        inc = {e.src for e in self._in.get(node_id, ())}
        return (out | inc) - {node_id}


def _parse_record(line: str, index: int) -> dict[str, Any]:
    try:
        raw = json.loads(line)
    except json.JSONDecodeError as exc:
        raise GraphDocumentError(f"not valid JSON ({exc.msg})", index) from exc
    if not isinstance(raw, dict):
        raise GraphDocumentError("record is not an object", index)
    return raw


_NODE_FIELDS = {"rec", "id", "kind", "name", "meta"}
_EDGE_FIELDS = {"rec", "src", "dst", "kind", "weight_percent"}


def _node_from_record(raw: dict[str, Any], index: int) -> Node:
    unknown = set(raw) - _NODE_FIELDS
    if unknown:
        raise GraphDocumentError(f"unknown node fields {sorted(unknown)}", index)
    for key in ("id", "kind", "name"):
        if key not in raw:
            raise GraphDocumentError(f"node record missing {key!r}", index)
    try:
        kind = NodeKind(raw["kind"])
    except ValueError:
        raise GraphDocumentError(f"unknown node kind {raw['kind']!r}", index) from None
    meta = raw.get("meta", {})
    if not isinstance(meta, dict):
        raise GraphDocumentError("node meta must be an object", index)
    return Node(id=str(raw["id"]), kind=kind, name=str(raw["name"]), metadata=meta)


def _edge_from_record(raw: dict[str, Any], index: int) -> Edge:
    unknown = set(raw) - _EDGE_FIELDS
    if unknown:
        raise GraphDocumentError(f"unknown edge fields {sorted(unknown)}", index)
    for key in ("src", "dst", "kind"):
        if key not in raw:
            raise GraphDocumentError(f"edge record missing {key!r}", index)
    try:
        kind = EdgeKind(raw["kind"])
    except ValueError:
        raise GraphDocumentError(f"unknown edge kind {raw['kind']!r}", index) from None
    weight = raw.get("weight_percent")
    if weight is not None and not isinstance(weight, (int, float)):
        raise GraphDocumentError("weight_percent must be a number", index)
    return Edge(
        src=str(raw["src"]),
        dst=str(raw["dst"]),
        kind=kind,
        weight_percent=None if weight is None else float(weight),
    )


def parse_graph(source: IO[str] | str | Iterable[str], strict: bool = True) -> KnowledgeGraph:
    """Build a graph from a line-delimited record document.

    ``source`` may be an open text stream, a document string, or an
    iterable of lines. Each non-blank line is one JSON object with
    ``rec`` set to ``"node"`` or ``"edge"``. Structural problems
    (malformed records, duplicate node ids) always raise; with
    ``strict`` the edge checks (dangling endpoints, signature and weight
    violations) raise too, otherwise they are left for ``validate`` to
    report.
    """
    if isinstance(source, str):
        lines: Iterable[str] = source.splitlines()
    else:
        lines = source

    graph = KnowledgeGraph()
    pending_edges: list[tuple[Edge, int]] = []
    for index, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        raw = _parse_record(line, index)
        rec = raw.get("rec")
        if rec == "node":
            node = _node_from_record(raw, index)
            if not node.name:
                raise GraphDocumentError(f"node {node.id!r} has empty name", index)
            if node.id in graph.nodes:
                raise GraphDocumentError(f"duplicate node id {node.id!r}", index)
            graph._add_node(node)
        elif rec == "edge":
            pending_edges.append((_edge_from_record(raw, index), index))
        else:
            raise GraphDocumentError(f"unknown record type {rec!r}", index)

    for edge, index in pending_edges:
        if strict:
            for endpoint in (edge.src, edge.dst):
                if endpoint not in graph.nodes:
                    raise GraphDocumentError(
                        f"edge references unknown node {endpoint!r}", index
                    )
            src_kinds, dst_kinds = EDGE_SIGNATURES[edge.kind]
            src_kind = graph.nodes[edge.src].kind
            dst_kind = graph.nodes[edge.dst].kind
            if src_kind not in src_kinds or dst_kind not in dst_kinds:
                raise GraphDocumentError(
                    f"edge kind {edge.kind.value} does not allow "
                    f"{src_kind.value} -> {dst_kind.value}",
                    index,
                )
            if edge.weight_percent is not None and not 0 <= edge.weight_percent <= 100:
                raise GraphDocumentError(
                    f"weight_percent {edge.weight_percent} outside [0, 100]", index
                )
        graph._add_edge(edge)
    return graph


def load_graph(source: IO[str] | str | Iterable[str]) -> KnowledgeGraph:
    """Load and validate a graph document; the strict ingestion path.

    Raises:
        GraphDocumentError: malformed record, duplicate node id, dangling
            edge endpoint, schema violation, or out-of-range metadata. The
            error names the offending record index where known.
    """
    graph = parse_graph(source, strict=True)
    report = validate(graph)
    if not report.ok:
        first = report.issues[0]
        raise GraphDocumentError(f"[{first.category}] {first.subject}: {first.message}")
    return graph


def serialize_graph(graph: KnowledgeGraph) -> str:
    """Render the graph back to the line-delimited document format."""
    lines = [json.dumps(n.to_record(), sort_keys=True) for n in graph.nodes.values()]
    lines.extend(json.dumps(e.to_record(), sort_keys=True) for e in graph.edges)
    return "\n".join(lines) + ("\n" if lines else "")


def validate(graph: KnowledgeGraph) -> ValidationReport:
    """Check every type invariant; violations become report entries.

    Never raises: an invalid graph yields a non-empty report.
    """
    report = ValidationReport()
    for node in graph.nodes.values():
        if not node.name:
            report.add("value", "empty node name", node.id)
        allowed = METADATA_SCHEMA[node.kind]
        for key, value in node.metadata.items():
            if key not in allowed:
                report.add(
                    "metadata",
                    f"key {key!r} not permitted for kind {node.kind.value}",
                    node.id,
                )
                continue
            bounds = allowed[key]
            if bounds is not None:
                lo, hi = bounds
                if not isinstance(value, (int, float)) or not lo <= value <= hi:
                    report.add(
                        "metadata",
                        f"{key}={value!r} outside [{lo:g}, {hi:g}]",
                        node.id,
                    )

    for edge in graph.edges:
        label = f"{edge.src}-{edge.kind.value}->{edge.dst}"
        missing = [n for n in (edge.src, edge.dst) if n not in graph.nodes]
        if missing:
            report.add("reference", f"unknown endpoint {missing[0]!r}", label)
            continue
        src_kinds, dst_kinds = EDGE_SIGNATURES[edge.kind]
        src_kind = graph.nodes[edge.src].kind
        dst_kind = graph.nodes[edge.dst].kind
        if src_kind not in src_kinds or dst_kind not in dst_kinds:
            report.add(
                "schema",
                f"{edge.kind.value} does not allow "
                f"{src_kind.value} -> {dst_kind.value}",
                label,
            )
        if edge.weight_percent is not None and not 0 <= edge.weight_percent <= 100:
            report.add(
                "value", f"weight_percent {edge.weight_percent} outside [0, 100]", label
            )
    return report


def neighbors(
    graph: KnowledgeGraph,
    node_id: str,
    direction: str = "both",
    kinds: set[EdgeKind] | None = None,
) -> list[tuple[Edge, Node]]:
    """Adjacent (edge, far node) pairs for a node.

    ``direction`` is ``"out"``, ``"in"`` or ``"both"``. ``kinds`` optionally
    restricts to an edge-kind set. Order is deterministic: far-end node id,
    then edge kind, outgoing before incoming.

    Raises:
        KeyError: unknown node id.
    """
    if node_id not in graph.nodes:
        raise KeyError(f"unknown node id {node_id!r}")
    if direction not in ("out", "in", "both"):
        raise ValueError(f"direction must be out|in|both, got {direction!r}")

    pairs: list[tuple[Edge, Node, int]] = []
    if direction in ("out", "both"):
        for edge in graph._out[node_id]:
            if kinds is None or edge.kind in kinds:
                pairs.append((edge, graph.nodes[edge.dst], 0))
    if direction in ("in", "both"):
        for edge in graph._in[node_id]:
            if kinds is None or edge.kind in kinds:
                pairs.append((edge, graph.nodes[edge.src], 1))
    pairs.sort(key=lambda p: (p[1].id, p[0].kind.value, p[2], p[0].src, p[0].dst))
    return [(edge, node) for edge, node, _ in pairs]


def find_nodes_by_name(graph: KnowledgeGraph, query: str) -> list[Node]:
    """Case-insensitive substring match over node names.

    Results are ordered by name length (tightest match first) then id.
    An empty query matches nothing.
    """
    if not query:
        return []
    needle = query.lower()
    hits = [n for n in graph.nodes.values() if needle in n.name.lower()]
    hits.sort(key=lambda n: (len(n.name), n.id))
    return hits


def iter_records(graph: KnowledgeGraph) -> Iterator[dict[str, Any]]:
    for node in graph.nodes.values():
        yield node.to_record()
    for edge in graph.edges:
        yield edge.to_record()
