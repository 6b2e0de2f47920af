"""Per-modality embedding indices with exact cosine search.

One index serves one modality (factor shells, news chunks, or graph-node
shells) so compound queries can be resolved per store instead of through a
single merged neighborhood. Search is exact brute-force cosine over the
stored vectors; corpora are desk-scale and exactness keeps every result
verifiable by a linear scan.

The default embedder is a deterministic feature-hashed token-frequency
model, so the whole suite runs offline; any external embedding endpoint
can replace it behind the same interface.
"""

from __future__ import annotations

import csv
import hashlib
import json
import re
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO, Callable, Iterable, Protocol

import numpy as np

from .kg import KnowledgeGraph
from .verbalizer import ContextShell, FactorDefinition, FactorRecord, render_node_shell

MODALITY_FACTOR = "factor"
MODALITY_NEWS = "news"
MODALITY_GRAPH_NODE = "graph-node"

_TOKEN_RE = re.compile(r"[a-z0-9]+")
_DUMP_FORMAT = "chainsight-index"
_DUMP_VERSION = 1


class Embedder(Protocol):
    dimension: int

    def embed(self, text: str) -> np.ndarray: ...


def _token_bucket(token: str, dimension: int) -> int:
    digest = hashlib.sha256(token.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") % dimension


class HashingEmbedder:
    """Deterministic feature-hashed token-frequency embedder.

    Case-folded word tokens are hashed into a fixed number of buckets and
    the count vector is L2-normalized. Empty text embeds to the zero
    vector (non-normalizable; cosine against it is 0).
    """

    def __init__(self, dimension: int = 512):
        if dimension < 1:
            raise ValueError("dimension must be positive")
        self.dimension = dimension
        self._bucket_cache: dict[str, int] = {}

    def embed(self, text: str) -> np.ndarray:
        vec = np.zeros(self.dimension, dtype=np.float64)
        for token in _TOKEN_RE.findall(text.lower()):
            bucket = self._bucket_cache.get(token)
            if bucket is None:
                bucket = _token_bucket(token, self.dimension)
                self._bucket_cache[token] = bucket
            vec[bucket] += 1.0
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec


_default_embedder = HashingEmbedder()


def default_embed(text: str) -> np.ndarray:
    """Embed with the shared default embedder (dimension 512)."""
    return _default_embedder.embed(text)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0 or nb == 0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


@dataclass
class VectorIndex:
    """Immutable list of (vector, shell) entries for one modality."""

    modality: str
    dimension: int
    entries: list[tuple[np.ndarray, ContextShell]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)


def build_index(
    shells: Iterable[ContextShell], embedder: Embedder, modality: str
) -> VectorIndex:
    """Embed each shell once and freeze the index.

    Raises:
        ValueError: a shell whose source is not the index modality, or an
            embedder output with the wrong dimension.
    """
    entries: list[tuple[np.ndarray, ContextShell]] = []
    for shell in shells:
        if shell.source != modality:
            raise ValueError(
                f"shell source {shell.source!r} does not match index modality "
                f"{modality!r}"
            )
        vec = embedder.embed(shell.text)
        if vec.shape != (embedder.dimension,):
            raise ValueError(
                f"embedder returned dimension {vec.shape}, expected "
                f"({embedder.dimension},)"
            )
        entries.append((vec, shell))
    return VectorIndex(modality=modality, dimension=embedder.dimension, entries=entries)


def search(
    index: VectorIndex,
    query: str,
    k: int,
    embedder: Embedder | None = None,
    predicate: Callable[[ContextShell], bool] | None = None,
) -> list[tuple[ContextShell, float]]:
    """Exact top-k by cosine among entries passing the filter.

    Descending score; ties break by insertion order. Returns fewer than k
    when the filtered set is smaller.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    emb = embedder or _default_embedder
    if emb.dimension != index.dimension:
        raise ValueError(
            f"embedder dimension {emb.dimension} does not match index "
            f"dimension {index.dimension}"
        )
    query_vec = emb.embed(query)
    scored: list[tuple[float, int, ContextShell]] = []
    for position, (vec, shell) in enumerate(index.entries):
        if predicate is not None and not predicate(shell):
            continue
        scored.append((float(np.dot(vec, query_vec)), position, shell))
    scored.sort(key=lambda item: (-item[0], item[1]))
    return [(shell, score) for score, _, shell in scored[:k]]


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 timestamp; trailing Z is normalized to UTC."""
    if value.endswith(("Z", "z")):
        value = value[:-1] + "+00:00"
    parsed = datetime.fromisoformat(value)
    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def since_filter(cutoff: str | datetime) -> Callable[[ContextShell], bool]:
    """Recency predicate: keep shells whose timestamp is >= the cutoff."""
    cut = parse_rfc3339(cutoff) if isinstance(cutoff, str) else cutoff

    def predicate(shell: ContextShell) -> bool:
        stamp = shell.metadata.get("timestamp")
        if stamp is None:
            return False
        return parse_rfc3339(stamp) >= cut

    return predicate


def chunk_text(text: str, max_words: int = 400) -> list[str]:
    """Split a document into page-sized chunks.

    Form-feed page markers win when present; otherwise paragraphs are
    packed up to the word budget (a single oversized paragraph stays
    whole rather than being split mid-sentence).
    """
    if "\f" in text:
        return [page.strip() for page in text.split("\f") if page.strip()]
    paragraphs = [p.strip() for p in re.split(r"\n\s*\n", text) if p.strip()]
    chunks: list[str] = []
    current: list[str] = []
    count = 0
    for para in paragraphs:
        words = len(para.split())
        if current and count + words > max_words:
            chunks.append("\n\n".join(current))
            current, count = [], 0
        current.append(para)
        count += words
    if current:
        chunks.append("\n\n".join(current))
    return chunks


def load_news_corpus(
    source: IO[str] | str, max_words: int = 400
) -> list[ContextShell]:
    """Load a line-delimited news corpus into news context shells.

    Records carry outlet, timestamp (RFC 3339), stream (macro or
    stock-specific), page, and text. Oversized records are re-chunked at
    paragraph boundaries; outlet/timestamp/page/stream survive as shell
    metadata for recency and provenance filters.
    """
    lines = source.splitlines() if isinstance(source, str) else source
    shells: list[ContextShell] = []
    for index, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        for key in ("outlet", "timestamp", "stream", "page", "text"):
            if key not in rec:
                raise ValueError(f"news record {index} missing field {key!r}")
        parse_rfc3339(rec["timestamp"])  # validates format
        if rec["stream"] not in ("macro", "stock-specific"):
            raise ValueError(
                f"news record {index}: stream must be macro|stock-specific"
            )
        for chunk in chunk_text(rec["text"], max_words=max_words):
            text = (
                f"News article from {rec['outlet']} ({rec['stream']} stream), "
                f"page {rec['page']}, published {rec['timestamp']}. {chunk}"
            )
            shells.append(
                ContextShell(
                    text=text,
                    source=MODALITY_NEWS,
                    metadata={
                        "outlet": rec["outlet"],
                        "timestamp": rec["timestamp"],
                        "stream": rec["stream"],
                        "page": rec["page"],
                    },
                )
            )
    return shells


def load_factor_definitions(source: IO[str] | str) -> dict[str, FactorDefinition]:
    """Per-factor description / when-high / when-low strings (JSON object)."""
    text = source if isinstance(source, str) else source.read()
    raw = json.loads(text)
    return {
        name: FactorDefinition(
            description=spec["description"],
            when_high=spec["when_high"],
            when_low=spec["when_low"],
        )
        for name, spec in raw.items()
    }


def load_factor_table(
    source: IO[str] | str, definitions: dict[str, FactorDefinition]
) -> list[FactorRecord]:
    """Parse the delimited factor table into records.

    Columns: Security Name, Ticker, Weight, then one column per factor
    z-score. Every factor column must have a definition entry.
    """
    lines = source.splitlines() if isinstance(source, str) else source
    reader = csv.DictReader(lines)
    if reader.fieldnames is None:
        return []
    required = ["Security Name", "Ticker", "Weight"]
    for column in required:
        if column not in reader.fieldnames:
            raise ValueError(f"factor table missing column {column!r}")
    factor_columns = [c for c in reader.fieldnames if c not in required]
    missing = [c for c in factor_columns if c not in definitions]
    if missing:
        raise ValueError(f"no definition for factor column(s) {missing}")
    records = []
    for row in reader:
        records.append(
            FactorRecord(
                security_name=row["Security Name"],
                ticker=row["Ticker"],
                weight=float(row["Weight"]),
                z_scores={c: float(row[c]) for c in factor_columns},
                definitions={c: definitions[c] for c in factor_columns},
            )
        )
    return records


def build_node_index(graph: KnowledgeGraph, embedder: Embedder) -> VectorIndex:
    """Index every node's context shell for seed resolution."""
    shells = [render_node_shell(node, graph) for node in graph.nodes.values()]
    return build_index(shells, embedder, MODALITY_GRAPH_NODE)


def save_index(index: VectorIndex, stream: IO[str]) -> None:
    """Persist an index as a versioned line-delimited text dump."""
    header = {
        "format": _DUMP_FORMAT,
        "version": _DUMP_VERSION,
        "modality": index.modality,
        "dimension": index.dimension,
    }
    stream.write(json.dumps(header) + "\n")
    for vec, shell in index.entries:
        stream.write(
            json.dumps({"vector": vec.tolist(), "shell": shell.to_record()}) + "\n"
        )


def load_index(source: IO[str] | str) -> VectorIndex:
    lines = source.splitlines() if isinstance(source, str) else source
    iterator = iter(lines)
    try:
        header = json.loads(next(iterator))
    except StopIteration:
        raise ValueError("empty index dump") from None
    if header.get("format") != _DUMP_FORMAT or header.get("version") != _DUMP_VERSION:
        raise ValueError(f"unsupported index dump header: {header}")
    entries: list[tuple[np.ndarray, ContextShell]] = []
    for line in iterator:
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        vec = np.asarray(rec["vector"], dtype=np.float64)
        if vec.shape != (header["dimension"],):
            raise ValueError("entry vector dimension does not match header")
        entries.append((vec, ContextShell.from_record(rec["shell"])))
    return VectorIndex(
        modality=header["modality"], dimension=header["dimension"], entries=entries
    )
