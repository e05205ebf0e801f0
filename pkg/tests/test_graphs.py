from collections import Counter
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from perturbia.errors import DomainError, ResourceError
from perturbia.graphs import (MultiGraph, aut_order, brute_force_aut_order, double_factorial,
                              enumerate_graphs, graph_from_code, is_isomorphic_brute, is_one_pi,
                              label_group_order, loop_number, matching_orbit_counts, one_pi_decompose,
                              relabel, tree_form_defect)


@st.composite
def phi4_graphs(draw, max_internal=3, max_sources=4):
    v4 = draw(st.integers(0, max_internal))
    v1 = draw(st.integers(0, max_sources))
    assume((4 * v4 + v1) % 2 == 0 and v4 + v1 > 0)
    ends = [i for i in range(v4) for _ in range(4)] + [v4 + s for s in range(v1)]
    ends = draw(st.permutations(ends))
    return MultiGraph.phi4(v4, v1, list(zip(ends[::2], ends[1::2])))


def nx_graph(g):
    G = nx.MultiGraph()
    G.add_nodes_from(v.id for v in g.vertices)
    G.add_edges_from(g.edges)
    return G


# hand-counted symmetry factors
ORACLES = [
    (MultiGraph.phi4(1, 0, [(0, 0), (0, 0)]), 8),
    (MultiGraph.phi4(2, 0, [(0, 1)] * 4), 48),
    (MultiGraph.phi4(2, 0, [(0, 0), (1, 1), (0, 1), (0, 1)]), 16),
    (MultiGraph.phi4(2, 0, [(0, 0), (0, 0), (1, 1), (1, 1)]), 128),
    (MultiGraph.phi4(0, 2, [(0, 1)]), 2),
    (MultiGraph.phi4(1, 2, [(0, 0), (0, 1), (0, 2)]), 4),
    (MultiGraph.phi4(1, 4, [(0, 1), (0, 2), (0, 3), (0, 4)]), 24),
]


@pytest.mark.parametrize("g, aut", ORACLES)
def test_symmetry_factor_oracles(g, aut):
    assert aut_order(g) == aut == brute_force_aut_order(g)


@settings(max_examples=80, deadline=None)
@given(phi4_graphs(), st.randoms(use_true_random=False))
def test_canonical_form_is_relabelling_invariant(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = relabel(g, perm)
    assert h.code == g.code
    assert aut_order(h) == aut_order(g)
    assert is_isomorphic_brute(g, h)


@settings(max_examples=60, deadline=None)
@given(phi4_graphs(max_internal=2, max_sources=3))
def test_aut_matches_brute_force(g):
    assert aut_order(g) == brute_force_aut_order(g)


@settings(max_examples=60, deadline=None)
@given(phi4_graphs())
def test_code_decodes_to_an_isomorphic_graph(g):
    h = graph_from_code(g.code)
    assert h.code == g.code
    assert is_isomorphic_brute(g, h)


@settings(max_examples=80, deadline=None)
@given(phi4_graphs())
def test_structure_agrees_with_networkx(g):
    G = nx_graph(g)
    assert len(g.components()) == nx.number_connected_components(G)
    base = nx.number_connected_components(G)
    for k, (a, b) in enumerate(g.edges):
        H = G.copy()
        H.remove_edge(a, b)
        assert (k in g.bridges()) == (nx.number_connected_components(H) > base)
    assert loop_number(g) == G.number_of_edges() - G.number_of_nodes() + base


@settings(max_examples=80, deadline=None)
@given(phi4_graphs())
def test_tree_form_on_connected_graphs(g):
    if g.is_connected():
        assert tree_form_defect(g) == 0
    else:
        with pytest.raises(DomainError):
            one_pi_decompose(g)


@pytest.mark.parametrize("v4, v1", [(v4, v1) for v4 in range(3) for v1 in range(5) if (v4 or v1) and v1 % 2 == 0]
                         + [(3, 0), (1, 1), (1, 3), (2, 2)])
def test_enumeration_against_matching_brute_force(v4, v1):
    E = enumerate_graphs(v4, v1)
    counts = matching_orbit_counts(v4, v1)
    assert {g.code for g, _ in E} == set(counts)
    order = label_group_order(v4, v1)
    for g, aut in E:
        assert counts[g.code] * aut == order


def test_vacuum_two_vertex_classes():
    E = enumerate_graphs(2, 0)
    assert sorted(a for _, a in E) == [16, 48, 128]
    assert sum(Fraction(1, a) for _, a in E) == Fraction(35, 384)


def test_filters_nest():
    all_ = {g.code for g, _ in enumerate_graphs(2, 2)}
    conn = {g.code for g, _ in enumerate_graphs(2, 2, "connected")}
    one_pi = {g.code for g, _ in enumerate_graphs(2, 2, "one_pi")}
    trees = {g.code for g, _ in enumerate_graphs(1, 4, "trees")}
    assert one_pi <= conn <= all_
    assert len(trees) == 1
    for g, _ in enumerate_graphs(2, 2, "one_pi"):
        assert is_one_pi(g)


def test_odd_ends_give_a_diagnostic():
    E = enumerate_graphs(1, 1)
    assert not E and "odd" in E.diagnostic


def test_vertex_cap(monkeypatch):
    monkeypatch.setenv("PERTURBIA_MAX_GRAPH_VERTICES", "3")
    with pytest.raises(ResourceError):
        enumerate_graphs(2, 2)


def test_valence_is_validated():
    with pytest.raises(DomainError):
        MultiGraph.phi4(1, 0, [(0, 0)])


def test_json_round_trip():
    g = ORACLES[2][0]
    assert MultiGraph.from_json(g.to_json()) == g


def test_matching_identity_small():
    for v4 in range(3):
        for v1 in range(5):
            total = sum(Fraction(label_group_order(v4, v1), a) for _, a in enumerate_graphs(v4, v1))
            ends = 4 * v4 + v1
            assert total == (double_factorial(ends - 1) if ends % 2 == 0 else 0)
