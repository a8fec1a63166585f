import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from flowpath.conditions import (ConditionNotVerified, InstanceTooLarge, check_condition_bruteforce,
                                 check_condition_edges, middle_section, verify_flow_dominance,
                                 verify_flow_half, verify_resistance_decomposition,
                                 verify_rg_half_rp, verify_sampling_bounds,
                                 verify_subgraph_probability, verify_subpath_inheritance)
from flowpath.electric import DisconnectedError
from flowpath.generators import gen_figure1
from flowpath.graph import Graph, remove_edge
from flowpath.shortest import dijkstra
from oracles import four_cycle, path_graph, random_connected, triangle


# -- triangle: every quantity in closed form -------------------------------------------


def test_triangle_holds_with_unit_margin():
    report = check_condition_edges(triangle(), 0, 2)
    assert report.holds_condition1 and report.unique_shortest
    assert report.max_alpha == pytest.approx(1.0, rel=1e-12)
    assert report.shortest_path.edges == (2,) and report.violating_edge is None
    assert report.path_resistance == 1.0
    assert check_condition_bruteforce(triangle(), 0, 2)


def test_triangle_flow_and_sampling_slacks():
    g = triangle()
    assert verify_flow_half(g, 0, 2) == pytest.approx(2 / 3, rel=1e-12)
    per_edge, mass = verify_sampling_bounds(g, 0, 2)
    assert per_edge.tolist() == pytest.approx([7 / 24], rel=1e-12)
    assert mass == pytest.approx(5 / 12, rel=1e-12)
    assert verify_flow_dominance(g, 0, 2)


def test_triangle_decomposition_is_tight():
    slack, qs = verify_resistance_decomposition(triangle(), 0, 2)
    assert slack == pytest.approx(0.0, abs=1e-12)
    assert qs == pytest.approx((2.0,), rel=1e-12)


def test_triangle_half_path_bound():
    assert verify_rg_half_rp(triangle(), 0, 2) == pytest.approx(1 / 6, rel=1e-12)


def test_subgraph_probability_examples():
    g = triangle()
    assert verify_subgraph_probability(g, g.edge_ids(), 0, 2) == pytest.approx(0.0, abs=1e-12)
    assert verify_subgraph_probability(g, [2], 0, 2) == pytest.approx(0.0, abs=1e-12)
    assert verify_subgraph_probability(g, [0, 1], 0, 2) == pytest.approx(0.0, abs=1e-12)
    with pytest.raises(DisconnectedError):
        verify_subgraph_probability(g, [0], 0, 2)


# -- paths ------------------------------------------------------------------------------


@pytest.mark.parametrize("k", [1, 3, 8])
def test_path_graph_bridges(k):
    g = path_graph(k)
    report = check_condition_edges(g, 0, k)
    assert report.holds_condition1 and math.isinf(report.max_alpha)
    assert verify_rg_half_rp(g, 0, k) == pytest.approx(k / 2, rel=1e-12)
    per_edge, _ = verify_sampling_bounds(g, 0, k)
    assert per_edge.tolist() == pytest.approx([3 / (4 * k)] * k, rel=1e-12)
    slack, qs = verify_resistance_decomposition(g, 0, k)
    assert math.isinf(slack) and all(math.isinf(q) for q in qs)


def test_subpath_of_full_path_has_zero_gap():
    g, s, t = gen_figure1(seed=3, g1_edges=20)
    assert verify_subpath_inheritance(g, s, t, s, t) == pytest.approx(0.0, abs=1e-12)


def test_subpath_inheritance_on_figure1():
    g, s, t = gen_figure1(seed=3, g1_edges=20)
    verts = dijkstra(g, s, t).vertices
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            assert verify_subpath_inheritance(g, s, t, verts[i], verts[j]) >= -1e-9
    with pytest.raises(ValueError):
        verify_subpath_inheritance(g, s, t, verts[2], verts[1])


def test_middle_section_unit_path():
    g = path_graph(10)
    path = dijkstra(g, 0, 10)
    assert middle_section(g, path, 1.0) == set(range(2, 8))
    assert middle_section(g, path, 100.0) == set(range(1, 9))
    assert middle_section(g, path, 0.05) == set()


# -- failures ---------------------------------------------------------------------------


def test_four_cycle_tie_fails_everywhere():
    report = check_condition_edges(four_cycle(), 0, 2)
    assert not report.unique_shortest and not report.holds_condition1
    assert report.max_alpha == pytest.approx(0.0, abs=1e-12)
    assert report.violating_edge in report.shortest_path.edges
    assert not check_condition_bruteforce(four_cycle(), 0, 2)
    with pytest.raises(ConditionNotVerified):
        verify_flow_half(four_cycle(), 0, 2)


def test_checker_errors():
    with pytest.raises(InstanceTooLarge):
        check_condition_bruteforce(random_connected(10, 20, seed=0), 0, 9)
    with pytest.raises(DisconnectedError):
        check_condition_edges(remove_edge(path_graph(2), 0), 0, 2)


def test_reports_are_cached():
    g = triangle()
    assert check_condition_edges(g, 0, 2) is check_condition_edges(g, 0, 2)


def test_direct_edge_against_unit_detour():
    # direct edge of resistance 3 against a unit path 0-2-...-L-1; only L = 3 ties
    for L, expected in [(2, True), (3, False), (4, True)]:
        chain = [0] + list(range(2, L + 1)) + [1]
        g = Graph(L + 1, [(0, 1, 1 / 3)] + [(a, b, 1.0) for a, b in zip(chain, chain[1:])])
        assert check_condition_edges(g, 0, 1).holds_condition1 is expected
        assert check_condition_bruteforce(g, 0, 1) is expected


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 7), st.integers(0, 5), st.integers(0, 10**6))
def test_edge_checker_agrees_with_bruteforce(n, extra, seed):
    g = random_connected(n, min(n - 1 + extra, n * (n - 1) // 2, 12), seed, wlo=0.3, whi=3.0)
    s, t = random.Random(seed).sample(range(n), 2)
    assert check_condition_edges(g, s, t).holds_condition1 == check_condition_bruteforce(g, s, t)


def test_figure1_instance_holds():
    g, s, t = gen_figure1(seed=3)
    report = check_condition_edges(g, s, t)
    assert report.holds_condition1 and 0 < report.max_alpha < math.inf
    assert verify_flow_half(g, s, t) >= 0.5 - 1e-9
    assert verify_flow_dominance(g, s, t)
    assert verify_resistance_decomposition(g, s, t)[0] >= -1e-9
