import json

import pytest

from chainsight.kg import Edge, EdgeKind, KnowledgeGraph, Node, NodeKind
from chainsight.traversal import FORWARD, INVERSE, PathStep, RiskPath
from chainsight.verbalizer import (
    ContextShell,
    FactorDefinition,
    FactorRecord,
    edge_phrase,
    format_weight,
    load_phrase_table,
    render_factor_shell,
    render_node_shell,
    verbalize_path,
)

GOLDEN_SENTENCE = (
    "Apple generates 10% of its revenue from selling Desktop Computers, "
    "which spends 19% of its production budget on Integrated Circuits, "
    "13% of which are produced in Shanghai, China."
)


def paper_path() -> RiskPath:
    return RiskPath(
        nodes=("c_apple", "p_desktops", "i_circuits", "l_shanghai"),
        edges=(
            PathStep(EdgeKind.PRODUCES, FORWARD, 10),
            PathStep(EdgeKind.HAS_INPUT, FORWARD, 19),
            PathStep(EdgeKind.MANUFACTURED_IN, FORWARD, 13),
        ),
        score=0.1 * 0.19 * 0.13,
    )


def test_golden_chain_sentence(paper_graph):
    shell = verbalize_path(paper_path(), paper_graph)
    assert shell.text == GOLDEN_SENTENCE
    assert shell.source == "graph-path"


def test_single_edge_sentence(paper_graph):
    path = RiskPath(
        nodes=("c_apple", "p_desktops"),
        edges=(PathStep(EdgeKind.PRODUCES, FORWARD, 10),),
        score=0.1,
    )
    shell = verbalize_path(path, paper_graph)
    assert shell.text == "Apple generates 10% of its revenue from selling Desktop Computers."


def test_weight_absent_clause():
    graph = KnowledgeGraph(
        [
            Node(id="p", kind=NodeKind.PRODUCT, name="Smartphones"),
            Node(id="d", kind=NodeKind.INDUSTRY, name="Consumer Electronics"),
        ],
        [Edge("p", "d", EdgeKind.BELONGS_TO)],
    )
    path = RiskPath(
        nodes=("p", "d"), edges=(PathStep(EdgeKind.BELONGS_TO, FORWARD, None),), score=1.0
    )
    shell = verbalize_path(path, graph)
    assert shell.text == "Smartphones belongs to the Consumer Electronics industry."
    assert "%" not in shell.text


def test_inverse_orientation_clause(coltan_graph):
    path = RiskPath(
        nodes=("ii_coltan", "i_tantalum_caps"),
        edges=(PathStep(EdgeKind.MADE_WITH, INVERSE, 34),),
        score=0.34,
    )
    shell = verbalize_path(path, coltan_graph)
    assert shell.text == (
        "Coltan makes up 34% of the production cost of Tantalum Capacitors."
    )


def test_path_graph_mismatch_raises(paper_graph):
    bad = RiskPath(
        nodes=("c_apple", "i_circuits"),
        edges=(PathStep(EdgeKind.PRODUCES, FORWARD, 10),),
        score=0.1,
    )
    with pytest.raises(ValueError, match="no Produces edge"):
        verbalize_path(bad, paper_graph)
    unknown = RiskPath(
        nodes=("ghost", "p_desktops"),
        edges=(PathStep(EdgeKind.PRODUCES, FORWARD, 10),),
        score=0.1,
    )
    with pytest.raises(ValueError, match="not in graph"):
        verbalize_path(unknown, paper_graph)


@pytest.mark.parametrize(
    "kind,orientation,src,dst,weight,expected",
    [
        (EdgeKind.PRODUCES, FORWARD, "Apple", "Desktop Computers", 10,
         "Apple generates 10% of its revenue from selling Desktop Computers"),
        (EdgeKind.HAS_INPUT, FORWARD, "Desktop Computers", "Integrated Circuits", 19,
         "Desktop Computers spends 19% of its production budget on Integrated Circuits"),
        (EdgeKind.MANUFACTURED_IN, FORWARD, "Integrated Circuits", "Shanghai", 13,
         "13% of Integrated Circuits are produced in Shanghai"),
        (EdgeKind.SOLD_BY, FORWARD, "Desktop Computers", "Apple", None,
         "Desktop Computers is sold by Apple"),
        (EdgeKind.INPUT_TO, FORWARD, "Copper Windings", "Traction Motors", None,
         "Copper Windings is an input to Traction Motors"),
        (EdgeKind.SOURCED_FROM, FORWARD, "Coltan", "the DRC", None,
         "Coltan is sourced from the DRC"),
        (EdgeKind.MADE_WITH, FORWARD, "Capacitors", "Coltan", None,
         "Capacitors is made with Coltan"),
        (EdgeKind.INCLUDES_PRODUCT, FORWARD, "Automotive", "Electric Vehicles", None,
         "the Automotive industry includes Electric Vehicles"),
        (EdgeKind.PRODUCTION_LOCATION_FOR, FORWARD, "Shenzhen", "Smartphones", None,
         "Shenzhen is a production location for Smartphones"),
    ],
)
def test_edge_phrases(kind, orientation, src, dst, weight, expected):
    assert edge_phrase(kind, orientation, src, dst, weight) == expected


def test_every_kind_orientation_pair_renders():
    for kind in EdgeKind:
        for orientation in (FORWARD, INVERSE):
            with_weight = edge_phrase(kind, orientation, "A", "B", 42)
            without = edge_phrase(kind, orientation, "A", "B", None)
            for text in (with_weight, without):
                assert "A" in text and "B" in text
                assert "{" not in text and "}" not in text
            assert "%" not in without


def test_weight_formatting():
    assert format_weight(10) == "10"
    assert format_weight(10.0) == "10"
    assert format_weight(12.5) == "12.5"
    assert edge_phrase(EdgeKind.PRODUCES, FORWARD, "A", "B", 12.5).startswith(
        "A generates 12.5%"
    )


def _acme_record(**kwargs) -> FactorRecord:
    definitions = {
        "Equity Beta": FactorDefinition(
            description="captures market risk beyond the baseline Market factor.",
            when_high="portfolio tilts toward high-beta stocks, amplifying risk.",
            when_low="portfolio tilts toward low-beta stocks, partially offsetting risk.",
        ),
        "Book-to-Price": FactorDefinition(
            description="book value divided by market capitalization.",
            when_high="stock may be undervalued or distressed.",
            when_low="stock may be overvalued or considered a growth stock.",
        ),
    }
    defaults = dict(
        security_name="Acme Corp",
        ticker="ACME",
        weight=4.2,
        z_scores={"Equity Beta": 1.3, "Book-to-Price": -0.7},
        definitions=definitions,
    )
    defaults.update(kwargs)
    return FactorRecord(**defaults)


def test_factor_shell_golden():
    shell = render_factor_shell(_acme_record())
    assert "This position constitutes 4.2% of the total portfolio." in shell.text
    assert "the security Acme Corp represented by the ticker ACME" in shell.text
    assert "z-score (mean 0, sd 1)" in shell.text
    assert "Acme Corp Equity Beta: 1.3" in shell.text
    assert "Acme Corp Book-to-Price: -0.7" in shell.text
    for label in ("Description:", "When High:", "When Low:"):
        assert shell.text.count(label) == 2
    # factor blocks appear in record order
    assert shell.text.index("Equity Beta: 1.3") < shell.text.index("Book-to-Price: -0.7")
    assert "{" not in shell.text and "}" not in shell.text
    assert shell.source == "factor"
    assert shell.metadata["ticker"] == "ACME"


def test_factor_shell_zero_factors():
    shell = render_factor_shell(_acme_record(z_scores={}))
    assert "This position constitutes 4.2%" in shell.text
    assert "Description:" not in shell.text


def test_factor_shell_zero_z_score():
    shell = render_factor_shell(_acme_record(z_scores={"Equity Beta": 0.0}))
    assert "Acme Corp Equity Beta: 0\n" in shell.text


def test_factor_shell_missing_definition():
    record = _acme_record(z_scores={"Mystery": 1.0})
    with pytest.raises(ValueError, match="Mystery"):
        render_factor_shell(record)


def test_factor_shell_z_verbatim_four_significant_digits():
    record = _acme_record(z_scores={"Equity Beta": -1.23456, "Book-to-Price": 0.5})
    shell = render_factor_shell(record)
    assert "Equity Beta: -1.235" in shell.text
    assert "Book-to-Price: 0.5" in shell.text


def test_node_shell_company(coltan_graph):
    node = coltan_graph.nodes["c_apple"]
    shell = render_node_shell(node, coltan_graph)
    for fragment in ("Apple Inc.", "Company", "AAPL", "Desktop Computers"):
        assert fragment in shell.text
    assert shell.source == "graph-node"
    assert shell.metadata["node_id"] == "c_apple"


def test_node_shell_isolated_location():
    node = Node(
        id="l",
        kind=NodeKind.LOCATION,
        name="Reykjavik, Iceland",
        metadata={"longitude": -21.94, "latitude": 64.15},
    )
    graph = KnowledgeGraph([node])
    shell = render_node_shell(node, graph)
    assert "-21.94" in shell.text and "64.15" in shell.text
    assert "connected to" not in shell.text


def test_node_shell_isomorphic_nodes_differ_only_by_substitution():
    def build(name, partner):
        return KnowledgeGraph(
            [
                Node(id="a", kind=NodeKind.PRODUCT, name=name),
                Node(id="b", kind=NodeKind.INDUSTRY, name=partner),
            ],
            [Edge("a", "b", EdgeKind.BELONGS_TO)],
        )

    g1 = build("Widgets", "Tooling")
    g2 = build("Sprockets", "Tooling")
    t1 = render_node_shell(g1.nodes["a"], g1).text
    t2 = render_node_shell(g2.nodes["a"], g2).text
    assert t1.replace("Widgets", "Sprockets") == t2


def test_node_shell_unknown_node(paper_graph):
    with pytest.raises(KeyError):
        render_node_shell(Node(id="zz", kind=NodeKind.COMPANY, name="Z"), paper_graph)


def test_path_node_names_appear_exactly_once_in_order(coltan_graph, paper_graph):
    cases = [
        (paper_graph, paper_path_nodes_steps()),
        (
            coltan_graph,
            (
                ("ii_coltan", "i_tantalum_caps", "p_smartphones"),
                (
                    PathStep(EdgeKind.MADE_WITH, INVERSE, 34),
                    PathStep(EdgeKind.HAS_INPUT, INVERSE, 7),
                ),
            ),
        ),
    ]
    for graph, (nodes, steps) in cases:
        path = RiskPath(nodes=nodes, edges=steps, score=1.0)
        text = verbalize_path(path, graph).text
        names = [graph.nodes[n].name for n in nodes]
        positions = []
        for name in names:
            assert text.count(name) == 1
            positions.append(text.index(name))
        assert positions == sorted(positions)


def paper_path_nodes_steps():
    return (
        ("c_apple", "p_desktops", "i_circuits", "l_shanghai"),
        (
            PathStep(EdgeKind.PRODUCES, FORWARD, 10),
            PathStep(EdgeKind.HAS_INPUT, FORWARD, 19),
            PathStep(EdgeKind.MANUFACTURED_IN, FORWARD, 13),
        ),
    )


def test_rendering_is_deterministic(coltan_graph):
    node = coltan_graph.nodes["p_smartphones"]
    assert render_node_shell(node, coltan_graph) == render_node_shell(node, coltan_graph)
    assert render_factor_shell(_acme_record()) == render_factor_shell(_acme_record())


def test_phrase_table_override(data_dir, paper_graph):
    table = load_phrase_table((data_dir / "phrases_example.json").read_text())
    assert (
        table.render(EdgeKind.BELONGS_TO, FORWARD, "Smartphones", "Electronics")
        == "Smartphones sits inside the Electronics industry"
    )
    # untouched entries keep their defaults
    assert table.render(EdgeKind.PRODUCES, FORWARD, "A", "B", 10).startswith(
        "A generates 10%"
    )


def test_phrase_table_override_requires_no_weight_variant():
    bad = json.dumps(
        [{"kind": "Produces", "orientation": "forward", "template": "{src} {w}% {dst}"}]
    )
    with pytest.raises(ValueError, match="template_no_weight"):
        load_phrase_table(bad)


def test_context_shell_record_round_trip():
    shell = ContextShell(text="Hello", source="news", metadata={"page": 3})
    assert ContextShell.from_record(shell.to_record()) == shell
