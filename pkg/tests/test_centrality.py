import io
import random
import re

import pytest
from hypothesis import given, settings, strategies as st

from chainsight.centrality import (
    betweenness_centrality,
    closeness_centrality,
    degree_centrality,
    salience,
)
from chainsight.kg import Edge, EdgeKind, KnowledgeGraph, Node, NodeKind

from conftest import product_graph
from oracles import (
    oracle_betweenness,
    oracle_closeness,
    oracle_degree,
    random_connected_edges,
)

P3 = product_graph(3, [(0, 1), (1, 2)])
K3 = product_graph(3, [(0, 1), (1, 2), (0, 2)])
STAR4 = product_graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])
TWO_EDGES = product_graph(4, [(0, 1), (2, 3)])


def test_degree_path():
    deg = degree_centrality(P3)
    assert deg == {"n0": 0.5, "n1": 1.0, "n2": 0.5}


def test_degree_triangle():
    assert set(degree_centrality(K3).values()) == {1.0}


def test_degree_trivial_graphs():
    empty = KnowledgeGraph()
    assert degree_centrality(empty) == {}
    single = KnowledgeGraph([Node(id="x", kind=NodeKind.PRODUCT, name="X")])
    assert degree_centrality(single) == {"x": 0.0}


def test_degree_matches_adjacency_row_sums():
    rng = random.Random(4)
    for n in (5, 17, 33, 50):
        graph = product_graph(n, random_connected_edges(n, rng, 0.2))
        assert degree_centrality(graph) == pytest.approx(oracle_degree(graph))


def test_closeness_path():
    clo = closeness_centrality(P3)
    assert clo["n1"] == pytest.approx(1.0)
    assert clo["n0"] == pytest.approx(2 / 3)


def test_closeness_triangle():
    assert closeness_centrality(K3) == pytest.approx({"n0": 1.0, "n1": 1.0, "n2": 1.0})


def test_closeness_two_disjoint_edges():
    # component-scoped formula by hand: (1/3) * (1/1)
    assert closeness_centrality(TWO_EDGES) == pytest.approx(
        {f"n{i}": 1 / 3 for i in range(4)}
    )


def test_closeness_isolated_node_is_zero():
    graph = product_graph(3, [(0, 1)])
    assert closeness_centrality(graph)["n2"] == 0.0


def test_betweenness_path():
    bet = betweenness_centrality(P3)
    assert bet == pytest.approx({"n0": 0.0, "n1": 1.0, "n2": 0.0})


def test_betweenness_triangle_is_zero():
    assert set(betweenness_centrality(K3).values()) == {0.0}


def test_betweenness_star():
    bet = betweenness_centrality(STAR4)
    assert bet["n0"] == pytest.approx(1.0)
    for leaf in ("n1", "n2", "n3", "n4"):
        assert bet[leaf] == 0.0


def test_salience_anchors():
    table = salience(P3)
    assert table.salience_of("n1") == pytest.approx(1.0)
    assert table.salience_of("n0") == pytest.approx((0.5 + 2 / 3 + 0) / 3)
    k3_table = salience(K3)
    assert k3_table.salience_of("n0") == pytest.approx(2 / 3)


def test_salience_is_exact_mean(synthetic_graph):
    table = salience(synthetic_graph)
    for node_id, s in table.scores.items():
        assert abs(s.salience - (s.degree + s.closeness + s.betweenness) / 3) < 1e-12


def test_salience_caches_on_graph(synthetic_graph):
    first = salience(synthetic_graph)
    assert salience(synthetic_graph) is first
    # recomputation on an unchanged graph yields an identical table
    synthetic_graph._centrality_cache = None
    second = salience(synthetic_graph)
    assert second.scores == first.scores


def test_multi_edges_count_once():
    nodes = [Node(id=f"n{i}", kind=NodeKind.PRODUCT, name=f"P{i}") for i in range(2)]
    edges = [
        Edge("n0", "n1", EdgeKind.HAS_INPUT, 5),
        Edge("n0", "n1", EdgeKind.MADE_WITH, None),
        Edge("n1", "n0", EdgeKind.INPUT_TO, 7),
    ]
    graph = KnowledgeGraph(nodes, edges)
    assert degree_centrality(graph) == {"n0": 1.0, "n1": 1.0}


def test_matches_oracle_on_random_graphs():
    rng = random.Random(12345)
    for trial in range(30):
        n = rng.randrange(2, 36)
        graph = product_graph(n, random_connected_edges(n, rng, rng.uniform(0, 0.4)))
        assert degree_centrality(graph) == pytest.approx(oracle_degree(graph), abs=1e-9)
        assert closeness_centrality(graph) == pytest.approx(
            oracle_closeness(graph), abs=1e-9
        )
        assert betweenness_centrality(graph) == pytest.approx(
            oracle_betweenness(graph), abs=1e-9
        )


def test_disconnected_graph_against_oracle():
    rng = random.Random(77)
    edges = random_connected_edges(10, rng, 0.2)
    # add 5 extra isolated / secondary-component nodes
    graph = product_graph(15, edges + [(10, 11), (11, 12)])
    assert closeness_centrality(graph) == pytest.approx(oracle_closeness(graph), abs=1e-9)
    assert betweenness_centrality(graph) == pytest.approx(
        oracle_betweenness(graph), abs=1e-9
    )


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=2, max_value=14), st.randoms(use_true_random=False))
def test_relabeling_invariance(n, rng):
    edges = random_connected_edges(n, rng, 0.3)
    graph = product_graph(n, edges)
    table = salience(graph)

    perm = list(range(n))
    rng.shuffle(perm)
    mapping = {f"n{i}": f"m{perm[i]}" for i in range(n)}
    renamed = KnowledgeGraph(
        [Node(id=mapping[f"n{i}"], kind=NodeKind.PRODUCT, name=f"P{i}") for i in range(n)],
        [
            Edge(mapping[e.src], mapping[e.dst], e.kind, e.weight_percent)
            for e in graph.edges
        ],
    )
    renamed_table = salience(renamed)
    for old_id, new_id in mapping.items():
        assert renamed_table.salience_of(new_id) == pytest.approx(
            table.salience_of(old_id), abs=1e-12
        )


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=1, max_value=20), st.randoms(use_true_random=False))
def test_all_values_in_unit_interval(n, rng):
    # arbitrary (possibly disconnected) graphs
    edges = set()
    for _ in range(rng.randrange(0, 2 * n)):
        a, b = rng.randrange(n), rng.randrange(n)
        if a != b:
            edges.add(tuple(sorted((a, b))))
    graph = product_graph(n, sorted(edges))
    table = salience(graph)
    for s in table.scores.values():
        for value in (s.degree, s.closeness, s.betweenness, s.salience):
            assert 0.0 <= value <= 1.0


def test_table_export_format():
    table = salience(P3)
    text = table.to_table_text()
    lines = text.strip().split("\n")
    assert lines[0] == "node_id\tdegree\tcloseness\tbetweenness\tsalience"
    assert len(lines) == 4
    row = dict(zip(lines[0].split("\t"), lines[2].split("\t")))
    assert row["node_id"] == "n1"
    assert float(row["salience"]) == 1.0
    # 12 significant digits survive for a non-terminating value
    n0 = dict(zip(lines[0].split("\t"), lines[1].split("\t")))
    assert n0["closeness"].startswith("0.66666666666")
    buf = io.StringIO()
    table.write_table(buf)
    assert buf.getvalue() == text


def test_median_and_quantile():
    table = salience(P3)
    values = sorted(s.salience for s in table.scores.values())
    assert table.median_salience() == values[1]
    assert table.salience_quantile(0.0) == values[0]
    assert table.salience_quantile(1.0) == values[-1]
