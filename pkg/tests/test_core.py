from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qr3lab.core import (GuardError, Hypergraph3, HypergraphError, OrderedPairSet, ParseError, VertexSet,
                         as_fraction, bits, complete, format_hypergraph, parse_hypergraph, popcount,
                         read_hypergraph, write_hypergraph)

from oracles import edge_set, ordered_indicator


@st.composite
def hypergraphs(draw, max_n=7):
    n = draw(st.integers(0, max_n))
    triples = list(combinations(range(n), 3))
    keep = draw(st.lists(st.booleans(), min_size=len(triples), max_size=len(triples)))
    return Hypergraph3(n, [t for t, k in zip(triples, keep) if k])


def test_edges_are_canonical_and_deduplicated():
    H = Hypergraph3(5, [(2, 0, 1), (0, 1, 2), (4, 3, 2)])
    assert H.edges == ((0, 1, 2), (2, 3, 4))
    assert H.num_edges == len(H) == 2


@pytest.mark.parametrize("triple", [(0, 0, 1), (0, 1, 5), (-1, 0, 1), (0, 1)])
def test_bad_triples_rejected(triple):
    with pytest.raises(HypergraphError):
        Hypergraph3(5, [triple])


def test_queries_on_small_example():
    H = Hypergraph3(5, [(0, 1, 2), (0, 1, 3), (1, 2, 4)])
    assert H.has_edge(2, 1, 0) and not H.has_edge(0, 2, 3)
    assert H.indicator(3, 0, 1) == 1
    assert H.link(0, 1) == frozenset({2, 3})
    assert H.codegree(1, 0) == 2
    assert H.codegree(1, 2) == 2
    assert H.degree(1) == 3
    assert H.density() == Fraction(3, 10)


def test_codegree_of_equal_vertices_is_an_error():
    with pytest.raises(HypergraphError):
        Hypergraph3(4).codegree(1, 1)


def test_density_needs_three_vertices():
    with pytest.raises(HypergraphError):
        Hypergraph3(2).density()


def test_complete_hypergraph():
    H = complete(6)
    assert H.num_edges == 20
    assert H.density() == 1
    assert all(H.codegree(u, v) == 4 for u, v in combinations(range(6), 2))


@settings(max_examples=60, deadline=None)
@given(hypergraphs())
def test_tensor_matches_definition(H):
    A = H.tensor
    assert np.array_equal(A, ordered_indicator(H))
    assert A.sum() == 6 * H.num_edges


@settings(max_examples=60, deadline=None)
@given(hypergraphs())
def test_codegree_sum_counts_each_edge_three_times(H):
    if H.n < 2:
        return
    total = sum(H.codegree(u, v) for u, v in combinations(range(H.n), 2))
    assert total == 3 * H.num_edges


@settings(max_examples=60, deadline=None)
@given(hypergraphs())
def test_text_round_trip(H):
    assert parse_hypergraph(format_hypergraph(H)) == H


def test_file_round_trip(tmp_path):
    H = Hypergraph3(6, [(0, 1, 2), (1, 3, 5)])
    path = tmp_path / "h.3hg"
    write_hypergraph(H, path)
    assert path.read_text() == "6 2\n0 1 2\n1 3 5\n"
    assert read_hypergraph(path) == H


def test_parse_error_reports_line():
    with pytest.raises(ParseError) as err:
        parse_hypergraph("4 2\n0 1 2\n0 1 7\n")
    assert err.value.line == 3
    assert "line 3" in str(err.value)


@pytest.mark.parametrize("text", ["4 1\n2 1 0\n", "4 2\n0 1 2\n0 1 2\n"])
def test_canonical_mode_is_strict(text):
    with pytest.raises(ParseError):
        parse_hypergraph(text)


def test_lenient_mode_sorts_and_collapses():
    H = parse_hypergraph("4 2\n2 1 0\n0 1 2\n", lenient=True)
    assert H.edges == ((0, 1, 2),)


@pytest.mark.parametrize("text", ["", "4\n", "4 x\n", "4 2\n0 1 2\n", "4 1\n0 1\n", "3 1\n0 0 1\n"])
def test_malformed_input(text):
    with pytest.raises(ParseError):
        parse_hypergraph(text)


def test_vertex_and_pair_sets():
    X = VertexSet(4, {0, 2})
    assert X.indicator().tolist() == [1, 0, 1, 0]
    assert VertexSet.from_indicator(X.indicator()) == X
    assert len(VertexSet.full(5)) == 5
    P = OrderedPairSet.product(3, [0], [1, 2])
    assert P.sorted() == [[0, 1], [0, 2]]
    assert OrderedPairSet.from_indicator(P.indicator()) == P
    assert len(OrderedPairSet.full(3)) == 9
    with pytest.raises(HypergraphError):
        VertexSet(3, {3})
    with pytest.raises(HypergraphError):
        OrderedPairSet(3, {(0, 3)})


def test_helpers():
    assert as_fraction(0.1) == Fraction(1, 10)
    assert as_fraction("2/3") == Fraction(2, 3)
    assert popcount(0b1011) == 3
    assert bits(0b1010) == [1, 3]
    assert issubclass(GuardError, ValueError)


def test_induced_and_with_edge():
    H = Hypergraph3(5, [(0, 1, 2), (2, 3, 4)])
    assert H.induced([2, 3, 4]).edges == ((0, 1, 2),)
    assert edge_set(H.with_edge((1, 3, 4))) == {(0, 1, 2), (2, 3, 4), (1, 3, 4)}
