import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from chainsight.kg import (
    EDGE_SIGNATURES,
    Edge,
    EdgeKind,
    GraphDocumentError,
    KnowledgeGraph,
    Node,
    NodeKind,
    find_nodes_by_name,
    load_graph,
    neighbors,
    serialize_graph,
    validate,
)


def test_paper_fixture_counts(paper_graph):
    assert paper_graph.node_count == 4
    assert paper_graph.edge_count == 3


def test_empty_document_is_valid_empty_graph():
    graph = load_graph("")
    assert graph.node_count == 0
    assert graph.edge_count == 0
    assert validate(graph).ok


def test_schema_violation_rejected_on_load():
    doc = "\n".join(
        [
            json.dumps({"rec": "node", "id": "l", "kind": "Location", "name": "Lyon"}),
            json.dumps({"rec": "node", "id": "c", "kind": "Company", "name": "Acme"}),
            json.dumps({"rec": "edge", "src": "l", "dst": "c", "kind": "Produces"}),
        ]
    )
    with pytest.raises(GraphDocumentError, match="Produces"):
        load_graph(doc)


@pytest.mark.parametrize(
    "line,match",
    [
        ('{"rec": "node", "id": "x", "kind": "Gadget", "name": "X"}', "kind"),
        ('{"rec": "node", "id": "x", "kind": "Company"}', "name"),
        ('{"rec": "blob"}', "record type"),
        ("not json", "JSON"),
        ('{"rec": "node", "id": "x", "kind": "Company", "name": "X", "extra": 1}', "unknown"),
    ],
)
def test_malformed_records_report_index(line, match):
    with pytest.raises(GraphDocumentError, match=match) as err:
        load_graph(line)
    assert "record 1" in str(err.value)


def test_duplicate_node_id_rejected():
    doc = "\n".join(
        json.dumps({"rec": "node", "id": "a", "kind": "Company", "name": n})
        for n in ("One", "Two")
    )
    with pytest.raises(GraphDocumentError, match="duplicate"):
        load_graph(doc)


def test_dangling_edge_rejected():
    doc = "\n".join(
        [
            json.dumps({"rec": "node", "id": "c", "kind": "Company", "name": "Acme"}),
            json.dumps({"rec": "edge", "src": "c", "dst": "ghost", "kind": "Produces"}),
        ]
    )
    with pytest.raises(GraphDocumentError, match="unknown node"):
        load_graph(doc)


def test_neighbors_paper_produces(paper_graph):
    got = neighbors(paper_graph, "c_apple", "out", {EdgeKind.PRODUCES})
    assert len(got) == 1
    edge, node = got[0]
    assert edge.kind == EdgeKind.PRODUCES
    assert edge.weight_percent == 10
    assert node.name == "Desktop Computers"


def test_neighbors_isolated_node():
    graph = KnowledgeGraph([Node(id="x", kind=NodeKind.LOCATION, name="Nowhere")])
    assert neighbors(graph, "x", "both") == []


def test_neighbors_unknown_node(paper_graph):
    with pytest.raises(KeyError):
        neighbors(paper_graph, "nope", "both")


def _wkey(weight):
    return (weight is None, weight if weight is not None else 0.0)


def _edge_multiset(edges):
    return sorted((e.src, e.dst, e.kind.value, _wkey(e.weight_percent)) for e in edges)


def _as_multiset(pairs):
    return sorted(
        (e.src, e.dst, e.kind.value, _wkey(e.weight_percent), n.id) for e, n in pairs
    )


def test_neighbors_matches_edge_list_scan(synthetic_graph):
    # oracle: scan the full edge list
    for node_id in synthetic_graph.nodes:
        expected = []
        for e in synthetic_graph.edges:
            if e.src == node_id:
                expected.append((e, synthetic_graph.nodes[e.dst]))
            if e.dst == node_id:
                expected.append((e, synthetic_graph.nodes[e.src]))
        got = neighbors(synthetic_graph, node_id, "both")
        assert _as_multiset(got) == _as_multiset(expected)


def test_neighbors_direction_union(synthetic_graph):
    for node_id in synthetic_graph.nodes:
        out = neighbors(synthetic_graph, node_id, "out")
        inc = neighbors(synthetic_graph, node_id, "in")
        both = neighbors(synthetic_graph, node_id, "both")
        assert sorted(_as_multiset(out) + _as_multiset(inc)) == _as_multiset(both)


def test_validate_paper_fixture_clean(paper_graph):
    assert validate(paper_graph).ok


def test_validate_out_of_range_production_share():
    graph = KnowledgeGraph(
        [
            Node(
                id="l",
                kind=NodeKind.LOCATION,
                name="Lyon",
                metadata={"production_share": 130},
            )
        ]
    )
    report = validate(graph)
    assert len(report.issues) == 1
    assert report.issues[0].category == "metadata"
    assert "production_share" in report.issues[0].message


def test_validate_disallowed_metadata_key():
    graph = KnowledgeGraph(
        [Node(id="c", kind=NodeKind.COMPANY, name="Acme", metadata={"naics_code": "1"})]
    )
    report = validate(graph)
    assert len(report.issues) == 1
    assert "not permitted" in report.issues[0].message


def test_validate_mutate_and_check(synthetic_graph):
    # corrupt exactly one edge kind so only that edge violates its signature
    rng = random.Random(99)
    for _ in range(10):
        nodes = list(synthetic_graph.nodes.values())
        edges = list(synthetic_graph.edges)
        victim = rng.randrange(len(edges))
        edge = edges[victim]
        src_kind = synthetic_graph.nodes[edge.src].kind
        dst_kind = synthetic_graph.nodes[edge.dst].kind
        bad_kind = next(
            k
            for k in EdgeKind
            if src_kind not in EDGE_SIGNATURES[k][0] or dst_kind not in EDGE_SIGNATURES[k][1]
        )
        edges[victim] = Edge(edge.src, edge.dst, bad_kind, edge.weight_percent)
        mutated = KnowledgeGraph(nodes, edges)
        report = validate(mutated)
        assert len(report.issues) == 1
        assert report.issues[0].subject == f"{edge.src}-{bad_kind.value}->{edge.dst}"


@pytest.mark.parametrize(
    "query,expected",
    [("zzz", []), ("", [])],
)
def test_find_nodes_no_match(paper_graph, query, expected):
    assert find_nodes_by_name(paper_graph, query) == expected


def test_find_nodes_by_name(coltan_graph, paper_graph):
    assert [n.name for n in find_nodes_by_name(coltan_graph, "apple")] == ["Apple Inc."]
    assert [n.name for n in find_nodes_by_name(paper_graph, "circuit")] == [
        "Integrated Circuits"
    ]


def test_find_nodes_ordering_match_length_then_id():
    graph = KnowledgeGraph(
        [
            Node(id="b", kind=NodeKind.PRODUCT, name="Copper Wire Long"),
            Node(id="a", kind=NodeKind.PRODUCT, name="Copper Wire"),
            Node(id="c", kind=NodeKind.PRODUCT, name="Copper"),
        ]
    )
    assert [n.id for n in find_nodes_by_name(graph, "copper")] == ["c", "a", "b"]


def test_round_trip(synthetic_graph, coltan_graph, paper_graph):
    for graph in (synthetic_graph, coltan_graph, paper_graph):
        reloaded = load_graph(serialize_graph(graph))
        assert set(reloaded.nodes) == set(graph.nodes)
        for node_id, node in graph.nodes.items():
            assert reloaded.nodes[node_id] == node
        assert _edge_multiset(reloaded.edges) == _edge_multiset(graph.edges)


# --- random valid documents ------------------------------------------------

_KIND_POOL = {
    NodeKind.COMPANY: ["cA", "cB"],
    NodeKind.PRODUCT: ["pA", "pB", "pC"],
    NodeKind.INPUT_PRODUCT: ["iA", "iB"],
    NodeKind.INPUT_TO_INPUT_PRODUCT: ["tA"],
    NodeKind.INDUSTRY: ["dA"],
    NodeKind.LOCATION: ["lA", "lB"],
}


@st.composite
def valid_documents(draw):
    lines = []
    for kind, ids in _KIND_POOL.items():
        for node_id in ids:
            lines.append(
                {
                    "rec": "node",
                    "id": node_id,
                    "kind": kind.value,
                    "name": f"Node {node_id}",
                }
            )
    id_by_kind = {kind: ids for kind, ids in _KIND_POOL.items()}
    n_edges = draw(st.integers(min_value=0, max_value=12))
    for _ in range(n_edges):
        kind = draw(st.sampled_from(sorted(EdgeKind, key=lambda k: k.value)))
        src_kinds, dst_kinds = EDGE_SIGNATURES[kind]
        src_kind = draw(st.sampled_from(sorted(src_kinds, key=lambda k: k.value)))
        dst_kind = draw(st.sampled_from(sorted(dst_kinds, key=lambda k: k.value)))
        src = draw(st.sampled_from(id_by_kind[src_kind]))
        dst = draw(st.sampled_from(id_by_kind[dst_kind]))
        rec = {"rec": "edge", "src": src, "dst": dst, "kind": kind.value}
        if draw(st.booleans()):
            rec["weight_percent"] = draw(
                st.floats(min_value=0, max_value=100, allow_nan=False)
            )
        lines.append(rec)
    return "\n".join(json.dumps(line) for line in lines)


@settings(max_examples=40, deadline=None)
@given(valid_documents())
def test_loaded_edges_satisfy_signatures(doc):
    graph = load_graph(doc)
    for edge in graph.edges:
        src_kinds, dst_kinds = EDGE_SIGNATURES[edge.kind]
        assert graph.nodes[edge.src].kind in src_kinds
        assert graph.nodes[edge.dst].kind in dst_kinds
    # round-trip equality as multisets
    reloaded = load_graph(serialize_graph(graph))
    assert _edge_multiset(reloaded.edges) == _edge_multiset(graph.edges)
    assert reloaded.nodes == graph.nodes
