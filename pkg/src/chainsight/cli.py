"""Batch command-line surface over every pipeline stage.

Each subcommand is a thin composition of module operations: ingest/
validate data files, export the centrality table, run a traversal from a
named seed, verbalize stored paths, search a modality index, run the chat
REPL, or start the HTTP service. Exit codes: 0 ok, 1 runtime failure or
validation violations, 2 usage errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from . import agents, config as config_mod
from .centrality import salience
from .kg import parse_graph, serialize_graph, validate
from .traversal import (
    TraversalConfig,
    extract_paths,
    load_paths,
    resolve_seeds,
    subgraph_records,
    traverse,
)
from .vecstore import build_node_index, search, since_filter
from .verbalizer import verbalize_path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chainsight",
        description="Supply-chain risk analysis engine",
    )
    parser.add_argument("--config", help="path to a JSON config file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate and normalize the data files")
    p.add_argument("--graph", help="graph document (overrides config)")
    p.add_argument("--out", help="write a normalized copy of the graph here")

    p = sub.add_parser("centrality", help="export the centrality table")
    p.add_argument("--graph")
    p.add_argument("--out", help="write the table to this file instead of stdout")

    p = sub.add_parser("traverse", help="expand from a seed and print ranked paths")
    p.add_argument("--seed", required=True, help="entity mention to resolve")
    p.add_argument("--hops", type=int, help="force this hop budget for all seeds")
    p.add_argument("--graph")
    p.add_argument("--max-paths", type=int, dest="max_paths")
    p.add_argument("--ranking", choices=["weight-product", "salience-sum"])

    p = sub.add_parser("verbalize", help="print narratives for stored path records")
    p.add_argument("--path", required=True, help="file of path records")
    p.add_argument("--graph")

    p = sub.add_parser("search", help="query one modality index")
    p.add_argument("--modality", required=True, choices=["factor", "news", "graph-node"])
    p.add_argument("--query", required=True)
    p.add_argument("-k", type=int, default=3)
    p.add_argument("--since", help="RFC 3339 recency cutoff (news only)")

    p = sub.add_parser("chat", help="terminal REPL over the agent loop")
    p.add_argument("--scenario", help="mock-backend scenario file")
    p.add_argument("--portfolio", help="portfolio JSON file")
    p.add_argument("--log", help="append-only session log destination")

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--host")
    p.add_argument("--port", type=int)

    return parser


def _load_graph_arg(cfg, path_arg):
    path = path_arg or cfg.graph
    if not path:
        raise ValueError("no graph file given (use --graph or the config file)")
    return config_mod.load_graph_file(path)


def _cmd_ingest(cfg, args) -> int:
    path = args.graph or cfg.graph
    if not path:
        raise ValueError("no graph file given (use --graph or the config file)")
    with open(path, "r", encoding="utf-8") as handle:
        graph = parse_graph(handle, strict=False)
    report = validate(graph)
    print(f"graph: {graph.node_count} nodes, {graph.edge_count} edges")
    print(str(report))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(serialize_graph(graph))
        print(f"normalized graph written to {args.out}")
    return 0 if report.ok else 1


def _cmd_centrality(cfg, args) -> int:
    graph = _load_graph_arg(cfg, args.graph)
    table = salience(graph)
    text = table.to_table_text()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_traverse(cfg, args) -> int:
    graph = _load_graph_arg(cfg, args.graph)
    table = salience(graph)
    tconf = dataclasses.replace(cfg.traversal)
    if args.hops is not None:
        tconf = dataclasses.replace(
            tconf, hub_hops=args.hops, peripheral_hops=args.hops, max_hops=args.hops
        )
    if args.max_paths is not None:
        tconf = dataclasses.replace(tconf, max_paths=args.max_paths)
    if args.ranking:
        tconf = dataclasses.replace(tconf, ranking=args.ranking)

    from .vecstore import HashingEmbedder

    embedder = HashingEmbedder(cfg.embedder_dimension)
    index = build_node_index(graph, embedder)
    seeds = resolve_seeds(
        [args.seed], index, embedder=embedder, graph=graph,
        similarity_floor=tconf.seed_similarity_floor,
    )
    if not seeds:
        print(f"no node matched seed {args.seed!r}", file=sys.stderr)
        return 1
    subgraph = traverse(graph, seeds, table, tconf)
    for record in subgraph_records(subgraph):
        print(json.dumps(record, sort_keys=True))
    paths = extract_paths(subgraph, seeds, tconf)
    for path in paths:
        print(json.dumps(path.to_record(), sort_keys=True))
    for path in paths:
        print(verbalize_path(path, graph).text)
    return 0


def _cmd_verbalize(cfg, args) -> int:
    graph = _load_graph_arg(cfg, args.graph)
    with open(args.path, "r", encoding="utf-8") as handle:
        paths = load_paths(handle.read())
    for path in paths:
        print(verbalize_path(path, graph).text)
    return 0


def _cmd_search(cfg, args) -> int:
    stores = config_mod.build_stores(cfg)
    index = {
        "factor": stores.factor_index,
        "news": stores.news_index,
        "graph-node": stores.node_index,
    }[args.modality]
    predicate = since_filter(args.since) if args.since else None
    hits = search(index, args.query, k=args.k, embedder=stores.embedder, predicate=predicate)
    for shell, score in hits:
        print(f"{score:.6f}\t{json.dumps(shell.metadata, sort_keys=True)}")
        print(f"\t{shell.text[:200]}")
    return 0


def _cmd_chat(cfg, args) -> int:
    if args.scenario:
        cfg.scenario = args.scenario
        cfg.backend_mode = "mock"
    if args.portfolio:
        cfg.portfolio = args.portfolio
    if not cfg.portfolio:
        raise ValueError("chat requires a portfolio file (use --portfolio or config)")
    stores = config_mod.build_stores(cfg)
    backend = config_mod.make_backend(cfg)
    with open(cfg.portfolio, "r", encoding="utf-8") as handle:
        portfolio = agents.Portfolio.from_json(handle)
    session = agents.Session(portfolio=portfolio)

    def on_event(name, payload):
        if name == "tool_call":
            print(f"[tool called: {payload['tool']} {json.dumps(payload['arguments'])}]")
        elif name == "tool_result":
            print(f"[retrieved {payload['count']} result(s) from {payload['tool']}]")

    print("chainsight chat (empty line or EOF to quit)")
    while True:
        try:
            line = input("you> ")
        except EOFError:
            break
        if not line.strip():
            break
        turn = agents.run_turn(session, line.strip(), backend, stores, on_event=on_event)
        print(turn.response)
        if turn.references:
            print("references: " + "; ".join(turn.references))
    if args.log:
        with open(args.log, "w", encoding="utf-8") as handle:
            agents.write_session_log(session, handle)
    return 0


def _cmd_serve(cfg, args) -> int:
    import uvicorn

    from .service import create_app

    host = args.host or cfg.host
    port = args.port or cfg.port
    app = create_app(cfg)
    uvicorn.run(app, host=host, port=port)
    return 0


_COMMANDS = {
    "ingest": _cmd_ingest,
    "centrality": _cmd_centrality,
    "traverse": _cmd_traverse,
    "verbalize": _cmd_verbalize,
    "search": _cmd_search,
    "chat": _cmd_chat,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_mod.load_config(args.config)
        cfg.validate_files()
        return _COMMANDS[args.command](cfg, args)
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
