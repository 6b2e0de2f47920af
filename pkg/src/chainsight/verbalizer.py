"""Render structured data as natural-language context.

Every rendering here is a "context shell": a deterministic paragraph that
embeds raw figures inside explanatory sentences so downstream embedding
and prompting see meaning, not bare numbers. Covers factor rows, graph
nodes, single edges, and multi-hop risk paths.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, TYPE_CHECKING, Any

from .kg import EdgeKind, KnowledgeGraph, Node, NodeKind, neighbors

if TYPE_CHECKING:
    from .traversal import RiskPath

FORWARD = "forward"
INVERSE = "inverse"


@dataclass(frozen=True)
class ContextShell:
    """A rendered paragraph plus its modality tag and source metadata."""

    text: str
    source: str  # factor | news | graph-node | graph-path
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_record(self) -> dict[str, Any]:
        return {"text": self.text, "source": self.source, "metadata": self.metadata}

    @classmethod
    def from_record(cls, rec: dict[str, Any]) -> "ContextShell":
        return cls(
            text=rec["text"], source=rec["source"], metadata=dict(rec.get("metadata", {}))
        )


@dataclass(frozen=True)
class FactorDefinition:
    description: str
    when_high: str
    when_low: str


@dataclass
class FactorRecord:
    """One portfolio position with its factor z-scores and definitions."""

    security_name: str
    ticker: str
    weight: float  # percent of portfolio
    z_scores: dict[str, float] = field(default_factory=dict)
    definitions: dict[str, FactorDefinition] = field(default_factory=dict)


@dataclass(frozen=True)
class PhraseEntry:
    """Clause templates for one (edge kind, orientation) pair.

    ``template`` uses slots {src}, {dst} and optionally {w};
    ``template_no_weight`` is the weight-absent rendering of the same
    relation and must not use {w}.
    """

    template: str
    template_no_weight: str


# Templates for walking an edge in its stored direction. {src}/{dst} are the
# walk's from/to node names, so the inverse table reads each relation
# against the arrow.
_DEFAULT_PHRASES: dict[tuple[EdgeKind, str], PhraseEntry] = {
    (EdgeKind.PRODUCES, FORWARD): PhraseEntry(
        "{src} generates {w}% of its revenue from selling {dst}",
        "{src} generates revenue from selling {dst}",
    ),
    (EdgeKind.PRODUCES, INVERSE): PhraseEntry(
        "{src} accounts for {w}% of the revenue of {dst}",
        "{src} is sold by {dst}",
    ),
    (EdgeKind.SOLD_BY, FORWARD): PhraseEntry(
        "{src} is sold by {dst}, accounting for {w}% of its revenue",
        "{src} is sold by {dst}",
    ),
    (EdgeKind.SOLD_BY, INVERSE): PhraseEntry(
        "{src} generates {w}% of its revenue from selling {dst}",
        "{src} sells {dst}",
    ),
    (EdgeKind.BELONGS_TO, FORWARD): PhraseEntry(
        "{src} belongs to the {dst} industry",
        "{src} belongs to the {dst} industry",
    ),
    (EdgeKind.BELONGS_TO, INVERSE): PhraseEntry(
        "the {src} industry includes {dst}",
        "the {src} industry includes {dst}",
    ),
    (EdgeKind.HAS_INPUT, FORWARD): PhraseEntry(
        "{src} spends {w}% of its production budget on {dst}",
        "{src} spends part of its production budget on {dst}",
    ),
    (EdgeKind.HAS_INPUT, INVERSE): PhraseEntry(
        "{src} accounts for {w}% of the production budget of {dst}",
        "{src} is an input to {dst}",
    ),
    (EdgeKind.INPUT_TO, FORWARD): PhraseEntry(
        "{src} is an input to {dst}, covering {w}% of its production budget",
        "{src} is an input to {dst}",
    ),
    (EdgeKind.INPUT_TO, INVERSE): PhraseEntry(
        "{src} spends {w}% of its production budget on {dst}",
        "{src} has {dst} as an input",
    ),
    (EdgeKind.MANUFACTURED_IN, FORWARD): PhraseEntry(
        "{w}% of {src} are produced in {dst}",
        "{src} are produced in {dst}",
    ),
    (EdgeKind.MANUFACTURED_IN, INVERSE): PhraseEntry(
        "{src} is where {w}% of {dst} are produced",
        "{src} is a production site for {dst}",
    ),
    (EdgeKind.SOURCED_FROM, FORWARD): PhraseEntry(
        "{w}% of {src} is sourced from {dst}",
        "{src} is sourced from {dst}",
    ),
    (EdgeKind.SOURCED_FROM, INVERSE): PhraseEntry(
        "{src} supplies {w}% of {dst}",
        "{src} is a source of {dst}",
    ),
    (EdgeKind.MADE_WITH, FORWARD): PhraseEntry(
        "{src} is made with {dst}, which makes up {w}% of its production cost",
        "{src} is made with {dst}",
    ),
    (EdgeKind.MADE_WITH, INVERSE): PhraseEntry(
        "{src} makes up {w}% of the production cost of {dst}",
        "{src} is used in making {dst}",
    ),
    (EdgeKind.INCLUDES_PRODUCT, FORWARD): PhraseEntry(
        "the {src} industry includes {dst}",
        "the {src} industry includes {dst}",
    ),
    (EdgeKind.INCLUDES_PRODUCT, INVERSE): PhraseEntry(
        "{src} belongs to the {dst} industry",
        "{src} belongs to the {dst} industry",
    ),
    (EdgeKind.PRODUCTION_LOCATION_FOR, FORWARD): PhraseEntry(
        "{src} is a production location for {w}% of {dst}",
        "{src} is a production location for {dst}",
    ),
    (EdgeKind.PRODUCTION_LOCATION_FOR, INVERSE): PhraseEntry(
        "{w}% of {src} are produced in {dst}",
        "{src} is produced in {dst}",
    ),
}


class PhraseTable:
    """One clause template per (edge kind, orientation); overridable."""

    def __init__(self, entries: dict[tuple[EdgeKind, str], PhraseEntry] | None = None):
        self.entries = dict(_DEFAULT_PHRASES)
        if entries:
            self.entries.update(entries)

    def entry(self, kind: EdgeKind, orientation: str) -> PhraseEntry:
        return self.entries[(kind, orientation)]

    def render(
        self,
        kind: EdgeKind,
        orientation: str,
        src: str,
        dst: str,
        weight: float | None = None,
    ) -> str:
        entry = self.entry(kind, orientation)
        if weight is None:
            return entry.template_no_weight.format(src=src, dst=dst)
        return entry.template.format(src=src, dst=dst, w=format_weight(weight))


_DEFAULT_TABLE = PhraseTable()


def load_phrase_table(source: IO[str] | str) -> PhraseTable:
    """Load phrase overrides: a JSON list of records with fields
    ``kind``, ``orientation``, ``template`` and (when the template carries a
    {w} slot) ``template_no_weight``. Unlisted pairs keep their defaults.
    """
    text = source if isinstance(source, str) else source.read()
    records = json.loads(text)
    overrides: dict[tuple[EdgeKind, str], PhraseEntry] = {}
    for rec in records:
        kind = EdgeKind(rec["kind"])
        orientation = rec["orientation"]
        if orientation not in (FORWARD, INVERSE):
            raise ValueError(f"orientation must be forward|inverse, got {orientation!r}")
        template = rec["template"]
        no_weight = rec.get("template_no_weight")
        if no_weight is None:
            if "{w}" in template:
                raise ValueError(
                    f"template for {kind.value}/{orientation} uses {{w}} but has "
                    "no template_no_weight"
                )
            no_weight = template
        overrides[(kind, orientation)] = PhraseEntry(template, no_weight)
    return PhraseTable(overrides)


def format_weight(value: float) -> str:
    """Percent weights render as given: 10 -> "10", 12.5 -> "12.5"."""
    if float(value).is_integer():
        return str(int(value))
    return repr(float(value))


def format_z(value: float) -> str:
    """z-scores render to at most 4 significant digits."""
    return f"{value:.4g}"


def edge_phrase(
    kind: EdgeKind,
    orientation: str,
    src: str,
    dst: str,
    weight: float | None = None,
    table: PhraseTable | None = None,
) -> str:
    """Fill the clause template for one edge walked src -> dst."""
    return (table or _DEFAULT_TABLE).render(kind, orientation, src, dst, weight)


def verbalize_path(
    path: "RiskPath", graph: KnowledgeGraph, table: PhraseTable | None = None
) -> ContextShell:
    """Chain a path's edge phrases into one flowing sentence.

    Consecutive clauses share a node, so each clause after the first has
    that node's name replaced by "which" and is joined with a comma; a
    forward Produces/HasInput/ManufacturedIn chain therefore reads
    "X generates 10% of its revenue from selling Y, which spends 19% of
    its production budget on Z, 13% of which are produced in L."

    Raises:
        ValueError: path nodes or edges that do not exist in the graph.
    """
    if len(path.nodes) != len(path.edges) + 1:
        raise ValueError("path must have exactly one more node than edges")
    for node_id in path.nodes:
        if node_id not in graph.nodes:
            raise ValueError(f"path node {node_id!r} not in graph")
    _check_path_edges(path, graph)

    names = [graph.nodes[node_id].name for node_id in path.nodes]
    clauses = []
    for i, step in enumerate(path.edges):
        clauses.append(
            edge_phrase(
                step.kind, step.orientation, names[i], names[i + 1],
                step.weight_percent, table,
            )
        )

    sentence = clauses[0]
    for i in range(1, len(clauses)):
        joint = names[i]  # node shared with the previous clause
        clause = clauses[i].replace(joint, "which", 1)
        sentence += ", " + clause
    sentence += "."

    return ContextShell(
        text=sentence,
        source="graph-path",
        metadata={
            "nodes": list(path.nodes),
            "edge_kinds": [step.kind.value for step in path.edges],
            "score": path.score,
        },
    )


def _check_path_edges(path: "RiskPath", graph: KnowledgeGraph) -> None:
    for i, step in enumerate(path.edges):
        walk_src, walk_dst = path.nodes[i], path.nodes[i + 1]
        if step.orientation == FORWARD:
            src, dst = walk_src, walk_dst
        else:
            src, dst = walk_dst, walk_src
        candidates = graph._out.get(src, ())
        if not any(
            e.dst == dst and e.kind == step.kind and e.weight_percent == step.weight_percent
            for e in candidates
        ):
            raise ValueError(
                f"path step {i}: no {step.kind.value} edge {src!r} -> {dst!r} in graph"
            )


_SHELL_OPENING = (
    "The position in the portfolio is associated with the security "
    "{name} represented by the ticker {ticker}. This position constitutes "
    "{weight}% of the total portfolio. Each of the following factors is "
    "given a z-score (mean 0, sd 1) for this equity relative to all other "
    "equities."
)


def render_factor_shell(record: FactorRecord) -> ContextShell:
    """Wrap one factor row in the descriptive shell template.

    The opening paragraph states security, ticker and portfolio weight;
    each factor then gets a "{name} {factor}: {z}" line followed by its
    Description / When High / When Low explanations, in the record's
    factor order.

    Raises:
        ValueError: a z-score is present without a matching definition.
    """
    parts = [
        _SHELL_OPENING.format(
            name=record.security_name,
            ticker=record.ticker,
            weight=format_weight(record.weight),
        )
    ]
    for factor, z in record.z_scores.items():
        definition = record.definitions.get(factor)
        if definition is None:
            raise ValueError(f"no definition for factor {factor!r}")
        parts.append(
            f"{record.security_name} {factor}: {format_z(z)}\n"
            f"Description: {definition.description}\n"
            f"When High: {definition.when_high}\n"
            f"When Low: {definition.when_low}"
        )
    return ContextShell(
        text="\n\n".join(parts),
        source="factor",
        metadata={
            "security_name": record.security_name,
            "ticker": record.ticker,
            "weight": record.weight,
            "factors": list(record.z_scores),
        },
    )


# metadata rendering order per node kind
_META_LABELS: dict[NodeKind, list[tuple[str, str]]] = {
    NodeKind.COMPANY: [("ticker", "Ticker"), ("total_revenue", "Total revenue")],
    NodeKind.PRODUCT: [
        ("hs_code", "HS code"),
        ("total_revenue_share", "Total revenue share"),
        ("production_cost_percentage", "Production cost percentage"),
    ],
    NodeKind.INDUSTRY: [("naics_code", "NAICS code")],
    NodeKind.LOCATION: [
        ("longitude", "Longitude"),
        ("latitude", "Latitude"),
        ("production_share", "Production share"),
    ],
}
_META_LABELS[NodeKind.INPUT_PRODUCT] = _META_LABELS[NodeKind.PRODUCT]
_META_LABELS[NodeKind.INPUT_TO_INPUT_PRODUCT] = _META_LABELS[NodeKind.PRODUCT]


def render_node_shell(node: Node, graph: KnowledgeGraph) -> ContextShell:
    """Short deterministic paragraph describing a node for embedding.

    Names the node and its kind, lists its metadata in a fixed per-kind
    order, and names each one-hop neighbor with its kind. Isolated nodes
    get no neighbor clause.
    """
    if node.id not in graph.nodes:
        raise KeyError(f"unknown node {node.id!r}")
    article = "an" if node.kind.value[0] in "AEIOU" else "a"
    sentences = [
        f"{node.name} is {article} {node.kind.value} node in the supply-chain graph."
    ]
    for key, label in _META_LABELS[node.kind]:
        if key in node.metadata:
            sentences.append(f"{label}: {node.metadata[key]}.")

    seen: list[str] = []
    names: list[str] = []
    for _, far in neighbors(graph, node.id, "both"):
        if far.id not in seen:
            seen.append(far.id)
            names.append(f"{far.name} ({far.kind.value})")
    if names:
        sentences.append(f"{node.name} is connected to: {', '.join(names)}.")

    return ContextShell(
        text=" ".join(sentences),
        source="graph-node",
        metadata={"node_id": node.id, "kind": node.kind.value, "name": node.name},
    )
