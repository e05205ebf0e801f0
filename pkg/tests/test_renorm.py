import random
from fractions import Fraction as F

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from perturbia.errors import ConfigurationError, DomainError, NotConnectable
from perturbia.field_algebra import Theory
from perturbia.renorm import (POINT_CODE, UNBOUNDED, CountertermMap, Poly, Prescription, Universe,
                              _compose_elementary, act, code_of, compose, contract, dyson_max_power,
                              edge_subsets, inverse, stabilizer_is_trivial, term_degree,
                              transitive_connector)

U = Universe.build(3, 6)
BUBBLE = code_of(2, ((0, 1), (0, 1)))
seeds = st.integers(0, 10 ** 6)


def rand(seed, **kw):
    return CountertermMap.random(U, random.Random(seed), **kw)


def test_universe_shape():
    assert len(U) == 134
    assert len(U.one_pi_codes()) == 64
    assert U.codes[0] == POINT_CODE
    sizes = [(n, len(es)) for _, (n, es) in U.graphs]
    assert sizes == sorted(sizes)


def test_bubble_example():
    c1 = CountertermMap(U, {BUBBLE: F(2, 3)}, one_pi_supported=True)
    c2 = CountertermMap(U, {BUBBLE: F(-5, 7)}, one_pi_supported=True)
    assert compose(c1, c2).on_code(BUBBLE) == F(2, 3) - F(5, 7)
    assert inverse(c1).on_code(BUBBLE) == F(-2, 3)


@settings(max_examples=8, deadline=None)
@given(seeds, seeds, seeds)
def test_group_axioms(s1, s2, s3):
    a, b, c = rand(s1), rand(s2), rand(s3)
    e = CountertermMap.identity(U)
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    assert compose(e, a) == a == compose(a, e)
    ia = inverse(a)
    assert compose(ia, a) == e == compose(a, ia)


@settings(max_examples=6, deadline=None)
@given(seeds, seeds)
def test_action_law(s1, s2):
    a, b = rand(s1), rand(s2)
    f = Prescription.symbolic(U)
    assert act(a, act(b, f)) == act(compose(a, b), f)
    assert act(CountertermMap.identity(U), f) == f


@settings(max_examples=5, deadline=None)
@given(seeds)
def test_connector_recovers_the_map(seed):
    f = Prescription.symbolic(U)
    c = rand(seed, density=0.3)
    assert transitive_connector(f, act(c, f)) == c


@settings(max_examples=10, deadline=None)
@given(seeds, st.sampled_from(U.codes[1:]), st.builds(F, st.integers(-4, 4), st.integers(1, 3)))
def test_elementary_fast_path(seed, code, r):
    c = rand(seed)
    e = CountertermMap(U, {code: r})
    assert _compose_elementary(code, r, c) == compose(e, c)


def test_delta_prescription_is_faithful():
    F0 = Prescription.delta(U)
    c = rand(11)
    assert act(c, F0) == Prescription(U, c.values)
    assert stabilizer_is_trivial(U, trials=5)


def test_non_scalar_difference_is_not_connectable():
    f = Prescription.symbolic(U)
    g = Prescription(U, {k: v * Poly.symbol("s0") for k, v in f.values.items()})
    with pytest.raises(NotConnectable):
        transitive_connector(f, g)


def test_one_pi_support_is_closed():
    a, b = rand(1, one_pi_supported=True), rand(2, one_pi_supported=True)
    assert a.one_pi_supported and inverse(a).one_pi_supported
    assert compose(a, b).one_pi_supported


def test_json_round_trip_and_errors():
    c = rand(5)
    assert CountertermMap.from_json(U, c.to_json()) == c
    with pytest.raises(ConfigurationError):
        CountertermMap.from_json(U, {"values": {"zz": "1/2"}})
    with pytest.raises(ConfigurationError):
        CountertermMap.from_json(U, {"values": {code_of(4, ()).hex(): "1/2"}})


def _nx_contract(n, edges, subset):
    G = nx.MultiGraph()
    G.add_nodes_from(range(n))
    G.add_edges_from(e for i, e in enumerate(edges) if i not in subset)
    H = nx.Graph()
    H.add_nodes_from(range(n))
    H.add_edges_from(edges[i] for i in subset)
    for comp in nx.connected_components(H):
        comp = sorted(comp)
        for v in comp[1:]:
            G = nx.contracted_nodes(G, comp[0], v, self_loops=True, copy=True)
    idx = {v: i for i, v in enumerate(sorted(G.nodes))}
    return len(idx), tuple((idx[a], idx[b]) for a, b in G.edges())


@pytest.mark.parametrize("code", U.codes[::7])
def test_contraction_against_networkx(code):
    n, edges = U.graph(code)
    for subset in edge_subsets(len(edges)):
        k, rest = contract(n, edges, subset)
        kk, ref = _nx_contract(n, edges, subset)
        assert k == kk
        assert code_of(k, rest) == code_of(kk, ref)


def test_dyson_table():
    assert [dyson_max_power(d) for d in range(2, 10)] == [UNBOUNDED, 6, 4, 3, 3, 2, 2, 2]
    with pytest.raises(DomainError):
        dyson_max_power(1)


def test_term_degree():
    th = Theory.build(4, real=["phi"])
    assert term_degree(th.f("phi") ** 4, 4) == 4
    assert term_degree(th.f("phi", 0) ** 2, 4) == 4
    assert term_degree((3, 0), 6) == 6
    assert term_degree((2, 1), 3) == 2
