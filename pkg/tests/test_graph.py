import pickle

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from flowpath.electric import effective_resistance
from flowpath.graph import (DuplicateEdgeError, Graph, GraphError, InvalidEdgeError,
                            InvalidVertexError, OrientedEdge, ParseError, SelfLoopError,
                            WeightError, add_edge, degree, from_edge_list, is_connected, orient,
                            path_from_vertices, remove_edge, subgraph, to_edge_list)
from oracles import path_graph, random_connected, triangle


def test_parse_path():
    g = from_edge_list("0 1 1\n1 2 1")
    assert (g.n, g.m) == (3, 2)
    assert g.endpoints(1) == (1, 2)


def test_parse_comments_and_blank_lines():
    g = from_edge_list("# header\n\n0 1 2.5  # trailing\n1 2 0.5\n")
    assert g.weights.tolist() == [2.5, 0.5]
    assert g.resistance(1) == 2.0


def test_self_loop_rejected():
    with pytest.raises(SelfLoopError):
        from_edge_list("0 0 1")


def test_duplicate_edge_names_line():
    with pytest.raises(DuplicateEdgeError, match="line 2"):
        from_edge_list("0 1 1\n1 0 2")


@pytest.mark.parametrize("text", ["0 1", "a b 1", "0 1 x", "-1 2 1"])
def test_malformed_lines(text):
    with pytest.raises(ParseError) as info:
        from_edge_list(text)
    assert info.value.lineno == 1


@pytest.mark.parametrize("w", ["0", "-2", "inf", "nan"])
def test_bad_weights(w):
    with pytest.raises(WeightError):
        from_edge_list(f"0 1 {w}")


def test_sparse_ids_are_remapped():
    g = from_edge_list("10 30 1\n30 20 1")
    assert g.n == 3
    assert g.labels == (10, 20, 30)
    assert g.index_of(30) == 2
    assert to_edge_list(g).splitlines() == ["10 30 1.0", "20 30 1.0"]


def test_constructor_validation():
    with pytest.raises(InvalidVertexError):
        Graph(2, [(0, 2, 1.0)])
    with pytest.raises(DuplicateEdgeError):
        Graph(3, [(0, 1, 1.0), (1, 0, 1.0)])
    assert issubclass(SelfLoopError, GraphError) and issubclass(GraphError, ValueError)


def test_remove_edge_triangle_keeps_ids():
    g = triangle()
    h = remove_edge(g, 2)
    assert h.m == 2
    assert h.edge_ids().tolist() == [0, 1]
    assert h.endpoints(1) == (1, 2)
    assert g.m == 3  # the original is untouched
    with pytest.raises(InvalidEdgeError):
        h.endpoints(2)


def test_remove_edge_disconnects_path():
    g = path_graph(2)
    h = remove_edge(g, 0)
    assert is_connected(g, 0, 2)
    assert not is_connected(h, 0, 2)
    assert is_connected(h, 0, 0)


def test_remove_out_of_range():
    with pytest.raises(InvalidEdgeError):
        remove_edge(triangle(), 7)
    with pytest.raises(InvalidEdgeError):
        remove_edge(remove_edge(triangle(), 0), 0)


def test_degree():
    assert degree(path_graph(2), 1) == 2
    assert degree(Graph(3, [(0, 1, 1.0)]), 2) == 0
    star = Graph(6, [(0, i, 1.0) for i in range(1, 6)])
    assert degree(star, 0) == 5
    with pytest.raises(InvalidVertexError):
        degree(star, 6)


def test_add_edge_fresh_id_and_restores_resistance():
    g = random_connected(12, 20, seed=3)
    e = 5
    u, v = g.endpoints(e)
    back = add_edge(remove_edge(g, e), u, v, g.weight(e))
    assert back.m == g.m and back.id_bound == g.id_bound + 1
    for s, t in [(0, 11), (3, 7), (u, v)]:
        assert effective_resistance(back, s, t) == pytest.approx(effective_resistance(g, s, t), rel=1e-10)
    with pytest.raises(DuplicateEdgeError):
        add_edge(g, u, v, 1.0)


def test_subgraph_and_adjacency():
    g = triangle()
    h = subgraph(g, [0, 1])
    assert sorted(h.adjacency(1)) == [(0, 0), (2, 1)]
    assert h.edge_between(0, 2) is None and g.edge_between(2, 0) == 2


def test_orientations():
    g = triangle()
    fwd = orient(g, 1, 1)
    assert fwd == OrientedEdge(1, True) and fwd.ends(g) == (1, 2)
    assert fwd.reverse().ends(g) == (2, 1)
    with pytest.raises(InvalidVertexError):
        orient(g, 1, 0)


def test_path_witness():
    g = Graph(3, [(0, 1, 2.0), (1, 2, 4.0)])
    p = path_from_vertices(g, [0, 1, 2])
    assert p.edges == (0, 1) and p.hops == 2
    assert p.resistance_length == pytest.approx(0.75, rel=1e-12)
    with pytest.raises(InvalidEdgeError):
        path_from_vertices(g, [0, 2])


def test_pickle_round_trip_drops_caches():
    g = triangle()
    effective_resistance(g, 0, 2)
    h = pickle.loads(pickle.dumps(g))
    assert h.memo == {} and h.edges() == g.edges()


def test_arrays_are_read_only():
    g = triangle()
    with pytest.raises(ValueError):
        g.weights[0] = 3.0


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 25), st.integers(0, 40), st.integers(0, 10**6))
def test_round_trip_and_handshake(n, extra, seed):
    g = random_connected(n, n - 1 + extra, seed)
    assert sum(degree(g, v) for v in range(g.n)) == 2 * g.m
    h = from_edge_list(to_edge_list(g))
    assert h.n == g.n
    assert sorted((u, v, w) for _, u, v, w in h.edges()) == sorted((u, v, w) for _, u, v, w in g.edges())
    assert np.array_equal(h.weights, g.weights)
