"""Two-agent retrieval loop: triage, tool rerouting, execution, synthesis.

Every turn first asks a triage consultation whether the question is
answerable from session memory; if not, a rerouting consultation picks
retrieval tools and parameters. Tool outputs land in a per-turn transient
store and are injected into the synthesis prompt, with the portfolio
digest pinned as the first context block of every prompt. The backend is
pluggable: an OpenAI-compatible chat-completions endpoint for live use, or
a deterministic scripted replay for offline runs and tests.
"""

from __future__ import annotations

import dataclasses
import json
import logging
import os
import time
from dataclasses import dataclass, field
from typing import IO, Any, Callable, Iterable

import jsonschema

from .centrality import CentralityTable
from .kg import KnowledgeGraph
from .traversal import TraversalConfig, extract_paths, resolve_seeds, traverse
from .vecstore import Embedder, VectorIndex, search, since_filter
from .verbalizer import ContextShell, PhraseTable, format_weight, verbalize_path

logger = logging.getLogger(__name__)

ENV_LLM_URL = "CHAINSIGHT_LLM_URL"
ENV_LLM_KEY = "CHAINSIGHT_LLM_KEY"

TRIAGE = "triage"
REROUTE = "reroute"
SYNTHESIZE = "synthesize"

FROM_MEMORY = "from-memory"
AUGMENT = "augment"


class BackendError(RuntimeError):
    """Chat backend failed after the retry policy was exhausted."""


class ToolValidationError(ValueError):
    """A tool stub stayed invalid after the repair round."""


class ScenarioError(KeyError):
    """The replay scenario has no record for a requested step."""


@dataclass(frozen=True)
class Position:
    security_name: str
    ticker: str
    weight: float


@dataclass
class Portfolio:
    positions: list[Position]

    def __post_init__(self) -> None:
        total = sum(p.weight for p in self.positions)
        if self.positions and abs(total - 100.0) > 0.01:
            raise ValueError(f"portfolio weights sum to {total:.4f}, expected 100")
        tickers = [p.ticker for p in self.positions]
        if len(set(tickers)) != len(tickers):
            raise ValueError("portfolio tickers must be unique")

    def digest(self) -> str:
        """The context block pinned at the top of every prompt."""
        lines = [f"Portfolio composition ({len(self.positions)} positions):"]
        for p in self.positions:
            lines.append(f"- {p.security_name} ({p.ticker}): {format_weight(p.weight)}%")
        return "\n".join(lines)

    @classmethod
    def from_json(cls, source: IO[str] | str) -> "Portfolio":
        text = source if isinstance(source, str) else source.read()
        raw = json.loads(text)
        rows = raw["positions"] if isinstance(raw, dict) else raw
        return cls(
            positions=[
                Position(
                    security_name=r["security_name"],
                    ticker=r["ticker"],
                    weight=float(r["weight"]),
                )
                for r in rows
            ]
        )

    def to_record(self) -> dict[str, Any]:
        return {
            "positions": [
                {"security_name": p.security_name, "ticker": p.ticker, "weight": p.weight}
                for p in self.positions
            ]
        }


# ---------------------------------------------------------------------------
# Tool registry

TOOL_SCHEMAS: dict[str, dict[str, Any]] = {
    "get_factors": {
        "type": "object",
        "properties": {
            "query": {"type": "string"},
            "k": {"type": "integer", "minimum": 1},
        },
        "required": ["query"],
        "additionalProperties": False,
    },
    "get_news": {
        "type": "object",
        "properties": {
            "query": {"type": "string"},
            "k": {"type": "integer", "minimum": 1},
            "since": {"type": "string"},
        },
        "required": ["query"],
        "additionalProperties": False,
    },
    "graph_traverser": {
        "type": "object",
        "properties": {
            "mentions": {"type": "array", "items": {"type": "string"}, "minItems": 1},
            "k": {"type": "integer", "minimum": 1},
            "max_paths": {"type": "integer", "minimum": 1},
        },
        "required": ["mentions"],
        "additionalProperties": False,
    },
}

_TOOL_DESCRIPTIONS = {
    "get_factors": "Retrieve factor-exposure context shells for securities matching the query.",
    "get_news": "Retrieve curated news chunks matching the query, optionally only at or after an RFC 3339 cutoff.",
    "graph_traverser": "Resolve entity mentions to supply-chain graph nodes and return verbalized risk paths.",
}


def tool_schema_list() -> list[dict[str, Any]]:
    """Registry in OpenAI function-calling form."""
    return [
        {
            "type": "function",
            "function": {
                "name": name,
                "description": _TOOL_DESCRIPTIONS[name],
                "parameters": schema,
            },
        }
        for name, schema in TOOL_SCHEMAS.items()
    ]


def validate_tool_call(name: str, arguments: dict[str, Any]) -> str | None:
    """None when valid, else a human-readable rejection."""
    if name not in TOOL_SCHEMAS:
        return f"unknown tool {name!r}; registered tools: {sorted(TOOL_SCHEMAS)}"
    try:
        jsonschema.validate(arguments, TOOL_SCHEMAS[name])
    except jsonschema.ValidationError as exc:
        return f"arguments for {name} violate schema: {exc.message}"
    return None


@dataclass
class ToolInvocation:
    tool: str
    arguments: dict[str, Any]
    result: list[ContextShell] = field(default_factory=list)
    error: str | None = None

    def to_record(self) -> dict[str, Any]:
        return {
            "tool": self.tool,
            "arguments": self.arguments,
            "result": [shell.to_record() for shell in self.result],
            "error": self.error,
        }


@dataclass
class AgentTurn:
    user_message: str
    triage: str  # from-memory | augment
    invocations: list[ToolInvocation]
    response: str
    references: list[str]
    prompts: dict[str, list[dict[str, str]]]

    def to_record(self) -> dict[str, Any]:
        return {
            "user_message": self.user_message,
            "triage": self.triage,
            "invocations": [inv.to_record() for inv in self.invocations],
            "response": self.response,
            "references": self.references,
            "prompts": self.prompts,
        }


@dataclass
class Session:
    """One conversation: pinned portfolio, append-only turns, per-turn store."""

    portfolio: Portfolio
    turns: list[AgentTurn] = field(default_factory=list)
    transient_store: list[ContextShell] = field(default_factory=list)

    def history_messages(self) -> list[dict[str, str]]:
        messages = []
        for turn in self.turns:
            messages.append({"role": "user", "content": turn.user_message})
            messages.append({"role": "assistant", "content": turn.response})
        return messages


# ---------------------------------------------------------------------------
# Backends


@dataclass
class ToolCallStub:
    name: str
    arguments: dict[str, Any]


@dataclass
class BackendReply:
    """Either assistant text or a list of structured tool-call stubs."""

    text: str | None = None
    tool_calls: list[ToolCallStub] | None = None


class MockBackend:
    """Deterministic scripted replay keyed on (turn index, phase).

    The scenario is a line-delimited file of records
    ``{turn, phase, action, payload}``; records for the same key are
    consumed in order, which lets a scenario script a failed stub plus its
    repair. Supported actions: triage ``augment`` / ``from_memory``
    (payload: text, references), reroute ``tool_calls`` (payload: list of
    {tool, arguments}), synthesize ``answer`` (payload: text).
    """

    def __init__(self, records: Iterable[dict[str, Any]]):
        self._records = list(records)
        self._consumed = [False] * len(self._records)

    @classmethod
    def from_file(cls, source: IO[str] | str) -> "MockBackend":
        text = source if isinstance(source, str) else source.read()
        records = [json.loads(line) for line in text.splitlines() if line.strip()]
        return cls(records)

    def reset(self) -> None:
        self._consumed = [False] * len(self._records)

    def _next(self, turn_index: int, phase: str) -> dict[str, Any]:
        for i, rec in enumerate(self._records):
            if self._consumed[i]:
                continue
            if rec["turn"] == turn_index and rec["phase"] == phase:
                self._consumed[i] = True
                return rec
        raise ScenarioError(f"no scenario record for turn {turn_index} phase {phase!r}")

    def complete(
        self,
        messages: list[dict[str, str]],
        tool_schemas: list[dict[str, Any]] | None = None,
        phase: str = SYNTHESIZE,
        turn_index: int = 0,
    ) -> BackendReply:
        rec = self._next(turn_index, phase)
        action = rec["action"]
        payload = rec.get("payload")
        if action == "augment":
            return BackendReply(text="AUGMENT")
        if action == "from_memory":
            text = "FROM_MEMORY: " + payload["text"]
            if payload.get("references"):
                text += "\nREFERENCES: " + json.dumps(payload["references"])
            return BackendReply(text=text)
        if action == "tool_calls":
            return BackendReply(
                tool_calls=[
                    ToolCallStub(name=c["tool"], arguments=c["arguments"])
                    for c in payload
                ]
            )
        if action == "answer":
            return BackendReply(text=payload["text"])
        raise ScenarioError(f"unknown scenario action {action!r}")


class OpenAIChatBackend:
    """OpenAI-compatible chat-completions endpoint with tool calling.

    Endpoint and credential come from CHAINSIGHT_LLM_URL / CHAINSIGHT_LLM_KEY
    unless given explicitly. Transport failures are retried before being
    surfaced as BackendError.
    """

    def __init__(
        self,
        url: str | None = None,
        api_key: str | None = None,
        model: str = "gpt-4o",
        max_retries: int = 2,
        timeout: float = 60.0,
    ):
        self.url = url or os.environ.get(ENV_LLM_URL)
        if not self.url:
            raise ValueError(f"live backend requires {ENV_LLM_URL}")
        self.api_key = api_key or os.environ.get(ENV_LLM_KEY, "")
        self.model = model
        self.max_retries = max_retries
        self.timeout = timeout

    def complete(
        self,
        messages: list[dict[str, str]],
        tool_schemas: list[dict[str, Any]] | None = None,
        phase: str = SYNTHESIZE,
        turn_index: int = 0,
    ) -> BackendReply:
        import httpx

        body: dict[str, Any] = {"model": self.model, "messages": messages}
        if tool_schemas:
            body["tools"] = tool_schemas
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        endpoint = self.url.rstrip("/") + "/chat/completions"

        last_error: Exception | None = None
        for attempt in range(self.max_retries + 1):
            try:
                response = httpx.post(
                    endpoint, json=body, headers=headers, timeout=self.timeout
                )
                response.raise_for_status()
                return self._parse(response.json())
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
                logger.warning("backend call failed (attempt %d): %s", attempt + 1, exc)
                if attempt < self.max_retries:
                    time.sleep(0.5 * (attempt + 1))
        raise BackendError(f"backend unreachable after retries: {last_error}")

    @staticmethod
    def _parse(payload: dict[str, Any]) -> BackendReply:
        message = payload["choices"][0]["message"]
        calls = message.get("tool_calls")
        if calls:
            return BackendReply(
                tool_calls=[
                    ToolCallStub(
                        name=c["function"]["name"],
                        arguments=json.loads(c["function"]["arguments"]),
                    )
                    for c in calls
                ]
            )
        return BackendReply(text=message.get("content") or "")


# ---------------------------------------------------------------------------
# Prompt assembly

_TRIAGE_INSTRUCTIONS = (
    "You are the triage agent for a portfolio risk assistant. Decide whether "
    "the user's question is already answerable from the conversation so far "
    "and the pinned portfolio. Reply with exactly AUGMENT when fresh "
    "retrieval is needed. Otherwise reply with FROM_MEMORY: followed by the "
    "answer, optionally ending with a line 'REFERENCES: [\"...\"]' naming "
    "the remembered sources."
)
_REROUTE_INSTRUCTIONS = (
    "You are the rerouting agent. Select one or more retrieval tools (factor "
    "exposures, curated news, or a supply-chain graph walk) and emit tool "
    "calls with arguments matching their schemas."
)
_SYNTHESIZE_INSTRUCTIONS = (
    "You are a portfolio risk analyst. Using the retrieved context and the "
    "conversation, answer the user's question concisely and concretely."
)


def _prompt(
    session: Session,
    instructions: str,
    message: str,
    evidence: str | None = None,
) -> list[dict[str, str]]:
    # the portfolio digest is always context block 0
    messages = [
        {"role": "system", "content": session.portfolio.digest()},
        {"role": "system", "content": instructions},
    ]
    messages.extend(session.history_messages())
    if evidence is not None:
        messages.append({"role": "system", "content": evidence})
    messages.append({"role": "user", "content": message})
    return messages


@dataclass
class TriageDecision:
    decision: str  # from-memory | augment
    answer: str | None = None
    references: list[str] = field(default_factory=list)


def _parse_triage(text: str) -> TriageDecision:
    stripped = text.strip()
    if stripped.startswith("FROM_MEMORY:"):
        body = stripped[len("FROM_MEMORY:"):].strip()
        references: list[str] = []
        if "\nREFERENCES:" in body:
            body, _, tail = body.rpartition("\nREFERENCES:")
            references = json.loads(tail.strip())
        return TriageDecision(FROM_MEMORY, answer=body.strip(), references=references)
    return TriageDecision(AUGMENT)


def triage(
    session: Session,
    message: str,
    backend,
    turn_index: int = 0,
    prompts: dict[str, list[dict[str, str]]] | None = None,
) -> TriageDecision:
    """First consultation: answer from memory or flag for augmentation."""
    messages = _prompt(session, _TRIAGE_INSTRUCTIONS, message)
    if prompts is not None:
        prompts[TRIAGE] = messages
    reply = backend.complete(messages, None, phase=TRIAGE, turn_index=turn_index)
    if reply.text is None:
        raise BackendError("triage phase expects a text reply, got tool calls")
    return _parse_triage(reply.text)


def reroute(
    session: Session,
    message: str,
    backend,
    turn_index: int = 0,
    prompts: dict[str, list[dict[str, str]]] | None = None,
) -> list[ToolInvocation]:
    """Second consultation: pick tools and parameters.

    Invalid stubs are sent back to the backend once with a structured
    rejection; anything still invalid after that repair round raises.
    """
    messages = _prompt(session, _REROUTE_INSTRUCTIONS, message)
    if prompts is not None:
        prompts[REROUTE] = messages
    schemas = tool_schema_list()

    reply = backend.complete(messages, schemas, phase=REROUTE, turn_index=turn_index)
    problems = _stub_problems(reply)
    if problems:
        repair = messages + [
            {
                "role": "system",
                "content": json.dumps(
                    {"error": "invalid_tool_call", "problems": problems}
                ),
            }
        ]
        reply = backend.complete(repair, schemas, phase=REROUTE, turn_index=turn_index)
        problems = _stub_problems(reply)
        if problems:
            raise ToolValidationError("; ".join(problems))
    assert reply.tool_calls is not None
    return [ToolInvocation(tool=c.name, arguments=c.arguments) for c in reply.tool_calls]


def _stub_problems(reply: BackendReply) -> list[str]:
    if not reply.tool_calls:
        return ["rerouting requires at least one tool call"]
    problems = []
    for call in reply.tool_calls:
        issue = validate_tool_call(call.name, call.arguments)
        if issue:
            problems.append(issue)
    return problems


# ---------------------------------------------------------------------------
# Tool execution


@dataclass
class RetrievalStores:
    """Everything the three tools read at serve time (all read-only)."""

    graph: KnowledgeGraph
    table: CentralityTable
    node_index: VectorIndex
    factor_index: VectorIndex
    news_index: VectorIndex
    embedder: Embedder
    traversal_config: TraversalConfig = field(default_factory=TraversalConfig)
    phrase_table: PhraseTable | None = None


def _with_label(shell: ContextShell, label: str) -> ContextShell:
    metadata = dict(shell.metadata)
    metadata["label"] = label
    return dataclasses.replace(shell, metadata=metadata)


def _run_get_factors(args: dict[str, Any], stores: RetrievalStores) -> list[ContextShell]:
    hits = search(
        stores.factor_index, args["query"], k=args.get("k", 3), embedder=stores.embedder
    )
    return [
        _with_label(shell, f"Factor exposures for {shell.metadata['security_name']}")
        for shell, _ in hits
    ]


def _run_get_news(args: dict[str, Any], stores: RetrievalStores) -> list[ContextShell]:
    predicate = since_filter(args["since"]) if args.get("since") else None
    hits = search(
        stores.news_index,
        args["query"],
        k=args.get("k", 3),
        embedder=stores.embedder,
        predicate=predicate,
    )
    return [_with_label(shell, "News article") for shell, _ in hits]


def _run_graph_traverser(
    args: dict[str, Any], stores: RetrievalStores
) -> list[ContextShell]:
    config = stores.traversal_config
    if args.get("max_paths") is not None:
        config = dataclasses.replace(config, max_paths=args["max_paths"])
    seeds = resolve_seeds(
        args["mentions"],
        stores.node_index,
        k=args.get("k", 1),
        embedder=stores.embedder,
        graph=stores.graph,
        similarity_floor=config.seed_similarity_floor,
    )
    subgraph = traverse(stores.graph, seeds, stores.table, config)
    paths = extract_paths(subgraph, seeds, config)
    seed_mention = {s.node: s.mention for s in seeds}
    shells = []
    for path in paths:
        shell = verbalize_path(path, stores.graph, stores.phrase_table)
        mention = seed_mention.get(path.nodes[0], args["mentions"][0])
        shells.append(_with_label(shell, f"Supply-chain paths for {mention}"))
    return shells


_TOOL_RUNNERS: dict[str, Callable[[dict[str, Any], RetrievalStores], list[ContextShell]]] = {
    "get_factors": _run_get_factors,
    "get_news": _run_get_news,
    "graph_traverser": _run_graph_traverser,
}


def execute_tools(
    invocations: list[ToolInvocation], stores: RetrievalStores
) -> list[ToolInvocation]:
    """Run each invocation against its modality store.

    Per-invocation failures are recorded on the invocation rather than
    aborting the turn.
    """
    for invocation in invocations:
        runner = _TOOL_RUNNERS.get(invocation.tool)
        if runner is None:
            invocation.error = f"unknown tool {invocation.tool!r}"
            continue
        try:
            invocation.result = runner(invocation.arguments, stores)
        except Exception as exc:  # failures stay on the invocation
            logger.warning("tool %s failed: %s", invocation.tool, exc)
            invocation.error = str(exc)
    return invocations


def _references(shells: Iterable[ContextShell]) -> list[str]:
    refs: list[str] = []
    for shell in shells:
        label = shell.metadata.get("label")
        if label and label not in refs:
            refs.append(label)
    return refs


def synthesize(
    session: Session,
    message: str,
    backend,
    turn_index: int = 0,
    prompts: dict[str, list[dict[str, str]]] | None = None,
) -> tuple[str, list[str]]:
    """Fuse retrieved shells with the conversation into a final answer.

    Prompt order is fixed: portfolio digest, history, transient shells
    (graph paths verbatim), then the user message. References are derived
    from the transient shells' metadata.
    """
    if session.transient_store:
        evidence = "Retrieved context:\n\n" + "\n\n---\n\n".join(
            shell.text for shell in session.transient_store
        )
    else:
        evidence = None
    messages = _prompt(session, _SYNTHESIZE_INSTRUCTIONS, message, evidence=evidence)
    if prompts is not None:
        prompts[SYNTHESIZE] = messages
    reply = backend.complete(messages, None, phase=SYNTHESIZE, turn_index=turn_index)
    if reply.text is None:
        raise BackendError("synthesize phase expects a text reply, got tool calls")
    return reply.text, _references(session.transient_store)


EventCallback = Callable[[str, dict[str, Any]], None]


def run_turn(
    session: Session,
    message: str,
    backend,
    stores: RetrievalStores,
    on_event: EventCallback | None = None,
) -> AgentTurn:
    """Execute one full conversational turn and append it to memory.

    Emits phase events (triage, tool_call, tool_result, answer,
    references, turn) through ``on_event`` when given; the final ``turn``
    event carries the exact stored record.
    """

    def emit(name: str, payload: dict[str, Any]) -> None:
        if on_event is not None:
            on_event(name, payload)

    turn_index = len(session.turns)
    session.transient_store = []  # cleared at turn start
    prompts: dict[str, list[dict[str, str]]] = {}

    decision = triage(session, message, backend, turn_index, prompts)
    emit(TRIAGE, {"decision": decision.decision})

    if decision.decision == FROM_MEMORY:
        turn = AgentTurn(
            user_message=message,
            triage=FROM_MEMORY,
            invocations=[],
            response=decision.answer or "",
            references=decision.references,
            prompts=prompts,
        )
        emit("answer", {"text": turn.response})
        emit("references", {"references": turn.references})
        session.turns.append(turn)
        emit("turn", turn.to_record())
        return turn

    invocations = reroute(session, message, backend, turn_index, prompts)
    for invocation in invocations:
        emit("tool_call", {"tool": invocation.tool, "arguments": invocation.arguments})
        execute_tools([invocation], stores)
        session.transient_store.extend(invocation.result)
        emit(
            "tool_result",
            {
                "tool": invocation.tool,
                "count": len(invocation.result),
                "shells": [shell.to_record() for shell in invocation.result],
                "error": invocation.error,
            },
        )

    response, references = synthesize(session, message, backend, turn_index, prompts)
    turn = AgentTurn(
        user_message=message,
        triage=AUGMENT,
        invocations=invocations,
        response=response,
        references=references,
        prompts=prompts,
    )
    emit("answer", {"text": response})
    emit("references", {"references": references})
    session.turns.append(turn)
    emit("turn", turn.to_record())
    return turn


# ---------------------------------------------------------------------------
# Session persistence

def session_log_text(session: Session) -> str:
    """Append-only line-delimited turn records; stable across replays."""
    return (
        "\n".join(json.dumps(t.to_record(), sort_keys=True) for t in session.turns)
        + ("\n" if session.turns else "")
    )


def write_session_log(session: Session, stream: IO[str]) -> None:
    stream.write(session_log_text(session))


def load_session_log(source: IO[str] | str) -> list[dict[str, Any]]:
    text = source if isinstance(source, str) else source.read()
    return [json.loads(line) for line in text.splitlines() if line.strip()]
