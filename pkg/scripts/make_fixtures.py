#!/usr/bin/env python3
"""Generate the shipped data fixtures under data/.

Deterministic: fixed RNG seeds, and every retrieval-sensitive property the
test suite relies on (news ranking, ticker rank-1, seed resolution, hub
fan-out) is asserted here before files are written.
"""

from __future__ import annotations

import json
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from chainsight.agents import Portfolio  # noqa: E402
from chainsight.centrality import salience  # noqa: E402
from chainsight.kg import load_graph, validate  # noqa: E402
from chainsight.traversal import TraversalConfig, extract_paths, resolve_seeds, traverse  # noqa: E402
from chainsight.vecstore import (  # noqa: E402
    HashingEmbedder,
    MODALITY_FACTOR,
    build_index,
    build_node_index,
    load_factor_definitions,
    load_factor_table,
    load_news_corpus,
    search,
)
from chainsight.verbalizer import render_factor_shell  # noqa: E402

DATA = Path(__file__).resolve().parent.parent / "data"

# Dimension used by the shipped configuration. The library default of 512
# is kept for the compact fixtures; the 50-ticker factor table needs a
# roomier hash space before every ticker token gets a collision-free
# bucket.
SHIP_DIM = 8192


def node(nid, kind, name, **meta):
    return {"rec": "node", "id": nid, "kind": kind, "name": name, "meta": meta}


def edge(src, dst, kind, w=None):
    rec = {"rec": "edge", "src": src, "dst": dst, "kind": kind}
    if w is not None:
        rec["weight_percent"] = w
    return rec


def write_jsonl(path: Path, records) -> None:
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# 1. Four-node linear fixture: the canonical Company -> Product ->
#    InputProduct -> Location chain with weights 10/19/13.

def make_paper_graph() -> None:
    records = [
        node("c_apple", "Company", "Apple", ticker="AAPL", total_revenue=391000000000),
        node("p_desktops", "Product", "Desktop Computers", hs_code="8471.50",
             total_revenue_share=10),
        node("i_circuits", "InputProduct", "Integrated Circuits", hs_code="8542.31",
             production_cost_percentage=19),
        node("l_shanghai", "Location", "Shanghai, China", longitude=121.47,
             latitude=31.23, production_share=13),
        edge("c_apple", "p_desktops", "Produces", 10),
        edge("p_desktops", "i_circuits", "HasInput", 19),
        edge("i_circuits", "l_shanghai", "ManufacturedIn", 13),
    ]
    write_jsonl(DATA / "paper_path_graph.jsonl", records)
    graph = load_graph((DATA / "paper_path_graph.jsonl").read_text())
    assert graph.node_count == 4 and graph.edge_count == 3
    assert validate(graph).ok


# ---------------------------------------------------------------------------
# 2. Coltan fixture: Apple and Tesla product lines with shared mineral
#    dependencies in the DRC.

def make_coltan_graph() -> None:
    records = [
        node("c_apple", "Company", "Apple Inc.", ticker="AAPL",
             total_revenue=391000000000),
        node("c_tesla", "Company", "Tesla Inc.", ticker="TSLA",
             total_revenue=97700000000),
        node("p_smartphones", "Product", "Smartphones", hs_code="8517.13",
             total_revenue_share=51, production_cost_percentage=38),
        node("p_desktops", "Product", "Desktop Computers", hs_code="8471.50",
             total_revenue_share=10, production_cost_percentage=24),
        node("p_laptops", "Product", "Laptop Computers", hs_code="8471.30",
             total_revenue_share=12, production_cost_percentage=27),
        node("p_ev", "Product", "Electric Vehicles", hs_code="8703.80",
             total_revenue_share=81, production_cost_percentage=44),
        node("p_storage", "Product", "Energy Storage Systems", hs_code="8507.60",
             total_revenue_share=10, production_cost_percentage=39),
        node("i_tantalum_caps", "InputProduct", "Tantalum Capacitors",
             hs_code="8532.21"),
        node("i_circuits", "InputProduct", "Electronic Integrated Circuits",
             hs_code="8542.31"),
        node("i_battery", "InputProduct", "Lithium-Ion Battery Cells",
             hs_code="8507.60"),
        node("i_display", "InputProduct", "Display Panels", hs_code="8524.91"),
        node("ii_coltan", "InputToInputProduct", "Coltan", hs_code="2615.90"),
        node("ii_cobalt", "InputToInputProduct", "Cobalt", hs_code="8105.20"),
        node("ii_lithium", "InputToInputProduct", "Lithium Carbonate",
             hs_code="2836.91"),
        node("ind_elec", "Industry", "Consumer Electronics", naics_code="334220"),
        node("ind_auto", "Industry", "Automotive", naics_code="336111"),
        node("l_drc", "Location", "Democratic Republic of the Congo",
             longitude=23.64, latitude=-2.88, production_share=70),
        node("l_shanghai", "Location", "Shanghai, China", longitude=121.47,
             latitude=31.23, production_share=13),
        node("l_shenzhen", "Location", "Shenzhen, China", longitude=114.06,
             latitude=22.54, production_share=46),
        node("l_nevada", "Location", "Nevada, United States", longitude=-116.64,
             latitude=38.8, production_share=28),
        edge("c_apple", "p_smartphones", "Produces", 51),
        edge("c_apple", "p_desktops", "Produces", 10),
        edge("c_apple", "p_laptops", "Produces", 12),
        edge("c_tesla", "p_ev", "Produces", 81),
        edge("c_tesla", "p_storage", "Produces", 10),
        edge("p_smartphones", "ind_elec", "BelongsTo"),
        edge("p_desktops", "ind_elec", "BelongsTo"),
        edge("p_ev", "ind_auto", "BelongsTo"),
        edge("ind_elec", "p_laptops", "IncludesProduct"),
        edge("ind_elec", "i_circuits", "IncludesProduct"),
        edge("ind_elec", "i_display", "IncludesProduct"),
        edge("ind_auto", "p_storage", "IncludesProduct"),
        edge("ind_auto", "i_battery", "IncludesProduct"),
        edge("l_shenzhen", "p_laptops", "ProductionLocationFor", 28),
        edge("l_shanghai", "p_desktops", "ProductionLocationFor", 17),
        edge("p_smartphones", "i_tantalum_caps", "HasInput", 7),
        edge("p_smartphones", "i_circuits", "HasInput", 22),
        edge("p_smartphones", "i_display", "HasInput", 18),
        edge("p_desktops", "i_circuits", "HasInput", 19),
        edge("p_laptops", "i_circuits", "HasInput", 21),
        edge("p_ev", "i_battery", "HasInput", 24),
        edge("p_ev", "i_tantalum_caps", "HasInput", 3),
        edge("p_ev", "i_circuits", "HasInput", 8),
        edge("p_storage", "i_battery", "HasInput", 35),
        edge("p_laptops", "i_display", "HasInput", 14),
        edge("p_storage", "i_circuits", "HasInput", 6),
        edge("i_tantalum_caps", "ii_coltan", "MadeWith", 34),
        edge("i_battery", "ii_cobalt", "MadeWith", 11),
        edge("i_battery", "ii_lithium", "MadeWith", 9),
        edge("ii_coltan", "l_drc", "SourcedFrom", 60),
        edge("ii_cobalt", "l_drc", "SourcedFrom", 70),
        edge("ii_lithium", "l_nevada", "SourcedFrom", 28),
        edge("i_circuits", "l_shanghai", "ManufacturedIn", 13),
        edge("p_smartphones", "l_shenzhen", "ManufacturedIn", 46),
        edge("i_display", "l_shenzhen", "ManufacturedIn", 30),
    ]
    path = DATA / "coltan_graph.jsonl"
    write_jsonl(path, records)
    graph = load_graph(path.read_text())
    assert validate(graph).ok
    table = salience(graph)

    # coltan must land on the peripheral side so the default policy walks
    # two hops and reaches both companies' product lines
    assert table.salience_of("ii_coltan") < table.median_salience(), (
        table.salience_of("ii_coltan"),
        table.median_salience(),
    )

    for dim in (512, SHIP_DIM):
        embedder = HashingEmbedder(dim)
        index = build_node_index(graph, embedder)
        seeds = resolve_seeds(["coltan"], index, embedder=embedder, graph=graph)
        assert seeds and seeds[0].node == "ii_coltan", (dim, seeds)
        apple = resolve_seeds(["Apple"], index, embedder=embedder, graph=graph)
        assert apple and apple[0].node == "c_apple", (dim, apple)
    embedder = HashingEmbedder(512)
    index = build_node_index(graph, embedder)
    seeds = resolve_seeds(["coltan"], index, embedder=embedder, graph=graph)
    apple = resolve_seeds(["Apple"], index, embedder=embedder, graph=graph)

    config = TraversalConfig()
    sub = traverse(graph, seeds, table, config)
    paths = extract_paths(sub, seeds, config)
    names = {n for p in paths for n in p.nodes}
    assert "p_smartphones" in names and "p_ev" in names, names

    # hub fan-out: two hops strictly exceed one hop for Apple
    one = traverse(graph, apple, table,
                   TraversalConfig(hub_hops=1, peripheral_hops=1, max_hops=1))
    two = traverse(graph, apple, table,
                   TraversalConfig(hub_hops=2, peripheral_hops=2, max_hops=2))
    assert two.node_count > one.node_count


# ---------------------------------------------------------------------------
# 3. Fifty-node synthetic fixture with a scale-free flavor.

FIRST = ["Acme", "Borealis", "Cascade", "Dynamo", "Evergreen", "Fulcrum"]
PROD = [
    "Router Chassis", "Server Racks", "Solar Inverters", "Drone Airframes",
    "Medical Scanners", "Rail Signaling Units", "Wind Turbine Hubs",
    "Hydraulic Presses", "Industrial Valves", "Optical Modems",
    "Packaging Lines", "Cold Storage Units", "Traction Motors",
]
INPUTS = [
    "Printed Circuit Boards", "Aluminium Extrusions", "Precision Bearings",
    "Power Converters", "Glass Fiber Mesh", "Copper Windings",
    "Sensor Arrays", "Steel Fasteners", "Polymer Housings",
    "Servo Actuators", "Membrane Filters", "Ceramic Substrates",
    "Cooling Manifolds",
]
RAW = [
    "Bauxite Ore", "Silica Sand", "Nickel Matte", "Rare Earth Oxides",
    "Crude Polymers", "Graphite Flake",
]
INDUSTRIES = ["Networking Equipment", "Renewable Energy", "Precision Machinery",
              "Logistics Hardware"]
LOCATIONS = [
    "Busan, South Korea", "Gdansk, Poland", "Monterrey, Mexico",
    "Penang, Malaysia", "Rotterdam, Netherlands", "Hanoi, Vietnam",
    "Porto, Portugal", "Johor Bahru, Malaysia",
]


def make_synthetic_graph() -> None:
    rng = random.Random(20240811)
    records = []
    companies = []
    for i, stem in enumerate(FIRST):
        nid = f"co{i}"
        companies.append(nid)
        records.append(node(nid, "Company", f"{stem} Industries",
                            ticker=f"{stem[:3].upper()}X",
                            total_revenue=rng.randrange(2, 90) * 10**9))
    products = []
    for i, name in enumerate(PROD):
        nid = f"pr{i}"
        products.append(nid)
        records.append(node(nid, "Product", name, hs_code=f"84{i:02d}.10",
                            total_revenue_share=rng.randrange(4, 60)))
    inputs = []
    for i, name in enumerate(INPUTS):
        nid = f"in{i}"
        inputs.append(nid)
        records.append(node(nid, "InputProduct", name, hs_code=f"85{i:02d}.20",
                            production_cost_percentage=rng.randrange(2, 45)))
    raws = []
    for i, name in enumerate(RAW):
        nid = f"rw{i}"
        raws.append(nid)
        records.append(node(nid, "InputToInputProduct", name,
                            hs_code=f"26{i:02d}.90"))
    industries = []
    for i, name in enumerate(INDUSTRIES):
        nid = f"nd{i}"
        industries.append(nid)
        records.append(node(nid, "Industry", name, naics_code=f"33{i:02d}1"))
    locations = []
    for i, name in enumerate(LOCATIONS):
        nid = f"lc{i}"
        locations.append(nid)
        records.append(node(nid, "Location", name,
                            longitude=round(rng.uniform(-120, 130), 2),
                            latitude=round(rng.uniform(-40, 55), 2),
                            production_share=rng.randrange(5, 80)))

    edges = []
    # every product is made by exactly one company; a couple are recorded
    # through the SoldBy phrasing for edge-kind coverage
    for i, pid in enumerate(products):
        company = companies[i % len(companies)]
        if i in (10, 11):
            edges.append(edge(pid, company, "SoldBy", rng.randrange(3, 40)))
        else:
            edges.append(edge(company, pid, "Produces", rng.randrange(3, 40)))
    # preferential attachment: early inputs accumulate most product links
    attachment = list(inputs[:3]) * 3 + inputs
    for pid in products:
        for iid in rng.sample(attachment, rng.randrange(1, 4)):
            if not any(e["src"] == pid and e["dst"] == iid for e in edges):
                edges.append(edge(pid, iid, "HasInput", rng.randrange(2, 30)))
    edges.append(edge(inputs[4], products[2], "InputTo", 12))
    edges.append(edge(inputs[5], products[6], "InputTo"))
    for i, pid in enumerate(products):
        if i % 2 == 0:
            edges.append(edge(pid, industries[i % len(industries)], "BelongsTo"))
        else:
            edges.append(edge(industries[i % len(industries)], pid,
                              "IncludesProduct"))
    for i, iid in enumerate(inputs):
        if i < len(raws):
            edges.append(edge(iid, raws[i], "MadeWith", rng.randrange(5, 50)))
        edges.append(edge(iid, locations[i % len(locations)], "ManufacturedIn",
                          rng.randrange(5, 60)))
    for i, rid in enumerate(raws):
        edges.append(edge(rid, locations[(i * 2) % len(locations)], "SourcedFrom",
                          rng.randrange(10, 90)))
    for i, pid in enumerate(products[:4]):
        edges.append(edge(locations[i], pid, "ProductionLocationFor",
                          rng.randrange(5, 50)))

    path = DATA / "synthetic_graph_50.jsonl"
    write_jsonl(path, records + edges)
    graph = load_graph(path.read_text())
    assert graph.node_count == 50
    assert validate(graph).ok

    table = salience(graph)
    for company in companies:
        one = traverse(
            graph,
            resolve_seeds_by_id(company),
            table,
            TraversalConfig(hub_hops=1, peripheral_hops=1, max_hops=1),
        )
        two = traverse(
            graph,
            resolve_seeds_by_id(company),
            table,
            TraversalConfig(hub_hops=2, peripheral_hops=2, max_hops=2),
        )
        assert two.node_count > one.node_count, company


def resolve_seeds_by_id(node_id):
    from chainsight.traversal import SeedMatch

    return [SeedMatch(mention=node_id, node=node_id, similarity=1.0)]


# ---------------------------------------------------------------------------
# 4. Portfolio and factor table: 50 positions, Apple largest, Tesla sizable.

SECURITIES = [
    ("Apple Inc.", "AAPL"), ("Tesla Inc.", "TSLA"), ("Microsoft Corp.", "MSFT"),
    ("Alphabet Inc.", "GOOGL"), ("Amazon.com Inc.", "AMZN"),
    ("Nvidia Corp.", "NVDA"), ("Meta Platforms", "META"),
    ("Berkshire Hathaway", "BRKB"), ("Eli Lilly", "LLY"),
    ("Broadcom Inc.", "AVGO"), ("JPMorgan Chase", "JPM"), ("Visa Inc.", "V"),
    ("Exxon Mobil", "XOM"), ("UnitedHealth", "UNH"), ("Mastercard", "MA"),
    ("Procter & Gamble", "PG"), ("Johnson & Johnson", "JNJ"),
    ("Home Depot", "HD"), ("Merck & Co.", "MRK"), ("Costco Wholesale", "COST"),
    ("AbbVie Inc.", "ABBV"), ("Chevron Corp.", "CVX"), ("Coca-Cola Co.", "KO"),
    ("PepsiCo Inc.", "PEP"), ("Adobe Inc.", "ADBE"), ("Walmart Inc.", "WMT"),
    ("McDonald's Corp.", "MCD"), ("Cisco Systems", "CSCO"),
    ("Salesforce Inc.", "CRM"), ("Linde plc", "LIN"), ("Accenture plc", "ACN"),
    ("Netflix Inc.", "NFLX"), ("AMD Inc.", "AMD"), ("Oracle Corp.", "ORCL"),
    ("Intel Corp.", "INTC"), ("Texas Instruments", "TXN"),
    ("Verizon Comm.", "VZ"), ("Comcast Corp.", "CMCSA"), ("Nike Inc.", "NKE"),
    ("Danaher Corp.", "DHR"), ("Union Pacific", "UNP"), ("Amgen Inc.", "AMGN"),
    ("Philip Morris", "PM"), ("Honeywell Intl", "HON"), ("Qualcomm Inc.", "QCOM"),
    ("IBM Corp.", "IBM"), ("Caterpillar Inc.", "CAT"), ("Lowe's Cos.", "LOW"),
    ("Starbucks Corp.", "SBUX"), ("Boeing Co.", "BA"),
]
FACTORS = ["Equity Beta", "Book-to-Price", "Momentum", "Earnings Yield"]


def make_portfolio_and_factors() -> None:
    rng = random.Random(7)
    weights = [7.2, 4.1] + [round(rng.uniform(0.8, 3.4), 2) for _ in range(48)]
    scale = (100.0 - weights[0] - weights[1]) / sum(weights[2:])
    weights = weights[:2] + [round(w * scale, 2) for w in weights[2:]]
    weights[-1] = round(weights[-1] + (100.0 - sum(weights)), 2)
    assert abs(sum(weights) - 100.0) < 0.005, sum(weights)

    positions = [
        {"security_name": name, "ticker": ticker, "weight": weights[i]}
        for i, (name, ticker) in enumerate(SECURITIES)
    ]
    (DATA / "portfolio_top50.json").write_text(
        json.dumps({"positions": positions}, indent=2) + "\n", encoding="utf-8"
    )
    Portfolio.from_json((DATA / "portfolio_top50.json").read_text())

    rows = ["Security Name,Ticker,Weight," + ",".join(FACTORS)]
    for i, (name, ticker) in enumerate(SECURITIES):
        zs = [round(rng.gauss(0, 1), 2) for _ in FACTORS]
        quoted = f'"{name}"' if "," in name else name
        rows.append(f"{quoted},{ticker},{weights[i]}," + ",".join(str(z) for z in zs))
    (DATA / "factors.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")

    definitions = {
        "Equity Beta": {
            "description": "captures market risk beyond the baseline Market factor.",
            "when_high": "portfolio tilts toward high-beta stocks, amplifying risk.",
            "when_low": "portfolio tilts toward low-beta stocks, partially offsetting risk.",
        },
        "Book-to-Price": {
            "description": "book value divided by market capitalization.",
            "when_high": "stock may be undervalued or distressed.",
            "when_low": "stock may be overvalued or considered a growth stock.",
        },
        "Momentum": {
            "description": "trailing twelve-month return relative to the cross-section.",
            "when_high": "recent winners dominate; exposed to momentum crashes.",
            "when_low": "recent laggards dominate; exposed to continued weakness.",
        },
        "Earnings Yield": {
            "description": "trailing earnings divided by price.",
            "when_high": "portfolio tilts toward cheap earnings streams.",
            "when_low": "portfolio pays up for each unit of earnings.",
        },
    }
    (DATA / "factor_definitions.json").write_text(
        json.dumps(definitions, indent=2) + "\n", encoding="utf-8"
    )

    # every ticker query must hit its own shell at rank 1 under the
    # shipped embedder dimension
    embedder = HashingEmbedder(SHIP_DIM)
    defs = load_factor_definitions((DATA / "factor_definitions.json").read_text())
    records = load_factor_table((DATA / "factors.csv").read_text(), defs)
    shells = [render_factor_shell(r) for r in records]
    index = build_index(shells, embedder, MODALITY_FACTOR)
    for record in records:
        hits = search(index, record.ticker, k=1, embedder=embedder)
        assert hits and hits[0][0].metadata["ticker"] == record.ticker, record.ticker


# ---------------------------------------------------------------------------
# 5. News corpus: three coltan chunks whose similarity to the canonical
#    query orders them pages 3, 4, 1, plus macro distractors.

NEWS_QUERY = "recent news on coltan & cobalt supply-chain issues in the DRC"


def make_news() -> None:
    articles = [
        {
            "outlet": "Global Mining Wire",
            "timestamp": "2026-08-07T08:30:00Z",
            "stream": "stock-specific",
            "page": 3,
            "text": (
                "Recent news on coltan and cobalt supply-chain issues in the "
                "DRC dominated commodity desks this week. Armed groups in the "
                "eastern DRC moved on two coltan mining districts, and cobalt "
                "haulage routes south of Kolwezi stalled under new checkpoint "
                "inspections. Buyers of coltan and cobalt now face fresh "
                "supply-chain issues: smelters report that DRC material is "
                "arriving late, mislabeled, or routed through neighboring "
                "countries to obscure its origin."
            ),
        },
        {
            "outlet": "Global Mining Wire",
            "timestamp": "2026-08-06T17:05:00Z",
            "stream": "stock-specific",
            "page": 4,
            "text": (
                "Analysts flag widening supply-chain issues around coltan in "
                "the DRC. Cobalt shipments from the region also face delays, "
                "and third-party audits of conflict-free sourcing are under "
                "growing pressure as traceability paperwork from the DRC "
                "lags behind export volumes."
            ),
        },
        {
            "outlet": "Global Mining Wire",
            "timestamp": "2026-08-05T09:00:00Z",
            "stream": "stock-specific",
            "page": 1,
            "text": (
                "Violence in the eastern DRC disrupted mining operations over "
                "the weekend. Coltan prices firmed as traders weighed the risk "
                "of export sanctions, and electronics makers began reviewing "
                "alternative tantalum sources."
            ),
        },
        {
            "outlet": "Macro Horizons",
            "timestamp": "2026-07-28T12:00:00Z",
            "stream": "macro",
            "page": 2,
            "text": (
                "Demographic drag is reshaping long-horizon growth forecasts. "
                "Working-age populations are peaking across much of East Asia "
                "and Europe, shifting savings behavior and pressuring pension "
                "systems built for younger societies."
            ),
        },
        {
            "outlet": "Macro Horizons",
            "timestamp": "2026-07-30T09:45:00Z",
            "stream": "macro",
            "page": 5,
            "text": (
                "Climate adaptation spending is becoming a fiscal line item. "
                "Coastal infrastructure budgets rose again this year, led by "
                "port reinforcement and flood defense programs in Southeast "
                "Asia and the Gulf of Mexico."
            ),
        },
        {
            "outlet": "Macro Horizons",
            "timestamp": "2026-08-01T14:20:00Z",
            "stream": "macro",
            "page": 6,
            "text": (
                "Geopolitical realignment continues to redraw shipping lanes. "
                "Carriers are adding transit days to avoid chokepoints, and "
                "insurers have repriced war-risk premiums on several corridors."
            ),
        },
    ]
    path = DATA / "news_coltan.jsonl"
    write_jsonl(path, articles)

    shells = load_news_corpus(path.read_text())
    for dim in (512, SHIP_DIM):
        embedder = HashingEmbedder(dim)
        index = build_index(shells, embedder, "news")
        hits = search(index, NEWS_QUERY, k=3, embedder=embedder)
        pages = [shell.metadata["page"] for shell, _ in hits]
        assert pages == [3, 4, 1], (dim, pages)


# ---------------------------------------------------------------------------
# 6. Replay scenario for the three-turn coltan dialogue.

def make_scenario() -> None:
    records = [
        {"turn": 0, "phase": "triage", "action": "augment"},
        {
            "turn": 0,
            "phase": "reroute",
            "action": "tool_calls",
            "payload": [{"tool": "graph_traverser", "arguments": {"mentions": ["coltan"]}}],
        },
        {
            "turn": 0,
            "phase": "synthesize",
            "action": "answer",
            "payload": {
                "text": (
                    "Coltan from the DRC is a key source of tantalum for "
                    "electronics, and the same region anchors cobalt supply for "
                    "battery producers. Within the portfolio, Apple and Tesla "
                    "both depend on these minerals, so disruption in the eastern "
                    "DRC is an operational and reputational exposure."
                )
            },
        },
        {"turn": 1, "phase": "triage", "action": "augment"},
        {
            "turn": 1,
            "phase": "reroute",
            "action": "tool_calls",
            "payload": [
                {
                    "tool": "get_news",
                    "arguments": {"query": NEWS_QUERY, "k": 3},
                }
            ],
        },
        {
            "turn": 1,
            "phase": "synthesize",
            "action": "answer",
            "payload": {
                "text": (
                    "Coverage this week links coltan mined in the eastern DRC to "
                    "smuggling routes into global markets, which complicates "
                    "conflict-free sourcing guarantees for Apple, Tesla and their "
                    "peers and raises both supply-disruption and reputation risk."
                )
            },
        },
        {
            "turn": 2,
            "phase": "triage",
            "action": "from_memory",
            "payload": {
                "text": (
                    "Three channels stand out. (i) Supply-chain delays: a "
                    "shortage of tantalum capacitors could hold up hardware "
                    "launches. (ii) Reputational risk: association with conflict "
                    "minerals erodes brand trust. (iii) Margin pressure: costlier "
                    "inputs compress hardware margins and may force price "
                    "increases that dampen demand."
                ),
                "references": ["Apple supply-chain paths"],
            },
        },
    ]
    write_jsonl(DATA / "scenario_coltan.jsonl", records)


# ---------------------------------------------------------------------------
# 7. Configs and a phrase-table override example.

def make_configs() -> None:
    config = {
        "graph": "coltan_graph.jsonl",
        "factors": "factors.csv",
        "news": "news_coltan.jsonl",
        "factor_definitions": "factor_definitions.json",
        "portfolio": "portfolio_top50.json",
        "scenario": "scenario_coltan.jsonl",
        "backend_mode": "mock",
        "embedder_dimension": SHIP_DIM,
    }
    (DATA / "config.json").write_text(json.dumps(config, indent=2) + "\n",
                                      encoding="utf-8")
    paper = {
        "graph": "paper_path_graph.jsonl",
        "traversal": {"peripheral_hops": 3, "max_hops": 3},
    }
    (DATA / "config_paper.json").write_text(json.dumps(paper, indent=2) + "\n",
                                            encoding="utf-8")
    phrases = [
        {
            "kind": "BelongsTo",
            "orientation": "forward",
            "template": "{src} sits inside the {dst} industry",
        }
    ]
    (DATA / "phrases_example.json").write_text(json.dumps(phrases, indent=2) + "\n",
                                               encoding="utf-8")


def main() -> None:
    DATA.mkdir(exist_ok=True)
    make_paper_graph()
    make_coltan_graph()
    make_synthetic_graph()
    make_portfolio_and_factors()
    make_news()
    make_scenario()
    make_configs()
    print("fixtures written to", DATA)


if __name__ == "__main__":
    main()
