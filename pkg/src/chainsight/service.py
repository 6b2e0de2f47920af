"""HTTP service hosting chat sessions and graph queries.

Sessions run the full agent loop; message handling streams typed
server-sent events (triage, tool_call, tool_result, answer, references)
followed by the persisted turn record, so the streamed and stored views of
a turn never diverge. Shared stores are read-only at serve time; per-
session message handling is serialized.
"""

from __future__ import annotations

import dataclasses
import json
import threading
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse, StreamingResponse
from pydantic import BaseModel, Field

from .agents import (
    AUGMENT,
    BackendError,
    Portfolio,
    Position,
    RetrievalStores,
    Session,
    ToolValidationError,
    run_turn,
)
from .config import AppConfig, build_stores, make_backend
from .kg import neighbors
from .traversal import TraversalConfig, extract_paths, resolve_seeds, traverse
from .verbalizer import verbalize_path


class PositionBody(BaseModel):
    security_name: str
    ticker: str
    weight: float


class SessionBody(BaseModel):
    positions: list[PositionBody]


class MessageBody(BaseModel):
    text: str


class TraverseBody(BaseModel):
    mentions: list[str] = Field(min_length=1)
    overrides: dict[str, Any] | None = None


class _SessionSlot:
    def __init__(self, session: Session):
        self.session = session
        self.lock = threading.Lock()


def sse_format(name: str, payload: dict[str, Any]) -> str:
    return f"event: {name}\ndata: {json.dumps(payload, sort_keys=True)}\n\n"


def create_app(
    config: AppConfig,
    stores: RetrievalStores | None = None,
    backend: Any | None = None,
) -> FastAPI:
    """Build the service; stores and backend are injectable for tests."""
    stores = stores or build_stores(config)
    backend = backend or make_backend(config)

    app = FastAPI(title="chainsight", version="0.1.0")
    app.state.stores = stores
    app.state.backend = backend
    app.state.sessions = {}
    app.state.counter = 0
    app.state.registry_lock = threading.Lock()

    @app.exception_handler(RequestValidationError)
    async def invalid_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": exc.errors()})

    @app.get("/health")
    def health() -> dict[str, str]:
        return {"status": "ok"}

    @app.post("/sessions")
    def create_session(body: SessionBody):
        try:
            portfolio = Portfolio(
                positions=[
                    Position(p.security_name, p.ticker, p.weight) for p in body.positions
                ]
            )
        except ValueError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        with app.state.registry_lock:
            app.state.counter += 1
            session_id = f"session-{app.state.counter}"
            app.state.sessions[session_id] = _SessionSlot(Session(portfolio=portfolio))
        return {"session_id": session_id}

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        slot = app.state.sessions.get(session_id)
        if slot is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        return {
            "session_id": session_id,
            "portfolio": slot.session.portfolio.to_record(),
            "turns": [turn.to_record() for turn in slot.session.turns],
        }

    @app.post("/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody):
        slot = app.state.sessions.get(session_id)
        if slot is None:
            return JSONResponse(status_code=404, content={"detail": "unknown session"})
        if not slot.lock.acquire(blocking=False):
            return JSONResponse(
                status_code=409,
                content={"detail": "a message is already being handled for this session"},
            )
        try:
            events: list[tuple[str, dict[str, Any]]] = []
            run_turn(
                slot.session,
                body.text,
                app.state.backend,
                app.state.stores,
                on_event=lambda name, payload: events.append((name, payload)),
            )
        except BackendError as exc:
            return JSONResponse(status_code=503, content={"detail": str(exc)})
        except ToolValidationError as exc:
            return JSONResponse(status_code=400, content={"detail": str(exc)})
        finally:
            slot.lock.release()

        def stream():
            for name, payload in events:
                yield sse_format(name, payload)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.get("/graph/nodes/{node_id}")
    def get_node(node_id: str):
        graph = app.state.stores.graph
        node = graph.nodes.get(node_id)
        if node is None:
            return JSONResponse(status_code=404, content={"detail": "unknown node"})
        hood = [
            {"edge": edge.to_record(), "node": far.to_record()}
            for edge, far in neighbors(graph, node_id, "both")
        ]
        return {"node": node.to_record(), "neighbors": hood}

    @app.post("/traverse")
    def traverse_endpoint(body: TraverseBody):
        stores = app.state.stores
        config_obj = stores.traversal_config
        if body.overrides:
            try:
                config_obj = dataclasses.replace(config_obj, **body.overrides)
            except (TypeError, ValueError) as exc:
                return JSONResponse(status_code=400, content={"detail": str(exc)})
        seeds = resolve_seeds(
            body.mentions,
            stores.node_index,
            embedder=stores.embedder,
            graph=stores.graph,
            similarity_floor=config_obj.seed_similarity_floor,
        )
        subgraph = traverse(stores.graph, seeds, stores.table, config_obj)
        paths = extract_paths(subgraph, seeds, config_obj)
        out = []
        for path in paths:
            record = path.to_record()
            record["text"] = verbalize_path(path, stores.graph, stores.phrase_table).text
            out.append(record)
        return {
            "seeds": [dataclasses.asdict(s) for s in seeds],
            "paths": out,
        }

    return app
