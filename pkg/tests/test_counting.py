from itertools import combinations, product
from math import perm

import pytest
from hypothesis import given, settings, strategies as st

from qr3lab import generators
from qr3lab.core import Hypergraph3, HypergraphError, complete
from qr3lab.counting import (EDGE, K4, K4MINUS, Pattern, automorphisms, contains_K4, count_labeled,
                             count_unordered, expected_labeled, parse_pattern)

from oracles import brute_contains_k4, brute_labeled_count

PATTERNS = [K4, K4MINUS, EDGE, parse_pattern("v=5;012,123,234"), parse_pattern("v=4;012,013")]


@pytest.mark.parametrize("F", PATTERNS, ids=lambda F: F.label())
@pytest.mark.parametrize("seed", range(4))
def test_labeled_count_matches_brute_force(F, seed):
    H = generators.random_hypergraph(7, 0.55, seed)
    assert count_labeled(F, H) == brute_labeled_count(F, H)


def test_counts_in_complete_hypergraph():
    H = complete(6)
    assert count_labeled(K4, H) == perm(6, 4)
    assert count_unordered(K4, H) == 15
    assert count_unordered(EDGE, H) == 20
    assert count_unordered(K4MINUS, H) == 15 * 4


def test_automorphism_counts():
    assert automorphisms(K4) == 24
    assert automorphisms(K4MINUS) == 6
    assert automorphisms(EDGE) == 6


def test_pattern_larger_than_host():
    assert count_labeled(K4, complete(3)) == 0


@settings(max_examples=50, deadline=None)
@given(st.integers(4, 8), st.integers(0, 2 ** 20), st.floats(0.3, 0.95))
def test_contains_k4_matches_brute_force(n, seed, p):
    H = generators.random_hypergraph(n, p, seed)
    found = contains_K4(H)
    assert (found is not None) == brute_contains_k4(H)
    if found:
        assert list(found) == sorted(found)
        assert all(H.has_edge(*t) for t in combinations(found, 3))


def test_contains_k4_on_k4():
    assert contains_K4(complete(4)) == (0, 1, 2, 3)
    assert contains_K4(Hypergraph3(4, [(0, 1, 2), (0, 1, 3), (0, 2, 3)])) is None


def test_tournament_hypergraphs_have_no_k4_minus():
    for bits in product((0, 1), repeat=6):
        H = generators.cyclic_triangle_hypergraph(generators.Tournament.from_pairs(4, bits))
        assert count_labeled(K4MINUS, H) == 0


@pytest.mark.parametrize("n", [9, 12, 15])
def test_turan_construction_has_no_k4(n):
    assert count_labeled(K4, generators.turan_construction(n)) == 0


def test_parse_pattern_forms():
    assert parse_pattern("K4") is K4
    assert parse_pattern("k4-") is K4MINUS
    F = parse_pattern("v=4;012,013,023")
    assert F.edges == K4MINUS.edges
    for bad in ("k5", "v=4;01", "v=4;019", "x=4;012"):
        with pytest.raises(HypergraphError):
            parse_pattern(bad)


def test_pattern_size_limit():
    with pytest.raises(HypergraphError):
        Pattern(9, ((0, 1, 2),))


def test_expected_labeled():
    assert expected_labeled(K4, 40, 0.3) == pytest.approx(0.3 ** 4 * 40 * 39 * 38 * 37)
