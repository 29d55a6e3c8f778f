import json
import warnings
from fractions import Fraction
from itertools import combinations
from math import ceil

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qr3lab.core import GuardError, Hypergraph3, HypergraphError
from qr3lab.experiments import crafted_step3_instance
from qr3lab.reduced import (K4Pattern, ReducedHypergraph, StepFailure, degree_hypothesis, find_hole,
                            find_pattern_bruteforce, from_partition, hole_profile, hole_signature,
                            lemma_solver, low_degree, read_reduced, validate_pattern, write_reduced)
from qr3lab.regularity import partition_from_dict

from oracles import brute_hole, brute_patterns


def empty(m, size):
    return ReducedHypergraph(m, ReducedHypergraph.uniform_sizes(m, size))


def solve(A, eps):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return lemma_solver(A, eps)


# --- structure ------------------------------------------------------------------

def test_piece_shapes_follow_class_sizes():
    sizes = {(0, 1): 2, (0, 2): 3, (1, 2): 4, (0, 3): 1, (1, 3): 2, (2, 3): 5}
    A = ReducedHypergraph(4, sizes)
    assert A.pieces[0, 1, 2].shape == (2, 3, 4)
    assert A.pieces[1, 2, 3].shape == (4, 2, 5)
    assert A.piece(3, 1, 2) is A.pieces[1, 2, 3]


def test_invalid_structures():
    with pytest.raises(HypergraphError):
        ReducedHypergraph(2, {(0, 1): 1})
    with pytest.raises(HypergraphError):
        ReducedHypergraph(3, {(0, 1): 0, (0, 2): 1, (1, 2): 1})
    with pytest.raises(HypergraphError):
        ReducedHypergraph(3, ReducedHypergraph.uniform_sizes(3, 2), {(0, 1, 2): np.ones((2, 2, 3))})
    with pytest.raises(HypergraphError):
        ReducedHypergraph(3, ReducedHypergraph.uniform_sizes(3, 2), {(0, 2, 1): np.ones((2, 2, 2))})


def test_json_round_trip(tmp_path):
    A = ReducedHypergraph.random(5, 3, 0.5, 4)
    write_reduced(A, tmp_path / "a.json")
    B = read_reduced(tmp_path / "a.json")
    assert all(np.array_equal(A.pieces[t], B.pieces[t]) for t in A.pieces)
    doc = json.loads((tmp_path / "a.json").read_text())
    assert set(doc) == {"m", "class_sizes", "edges"}
    assert "0,1,2" in doc["edges"]


def test_json_rejects_out_of_range_edges():
    doc = {"m": 3, "class_sizes": {"0,1": 1, "0,2": 1, "1,2": 1}, "edges": {"0,1,2": [[0, 0, 1]]}}
    with pytest.raises(HypergraphError):
        ReducedHypergraph.from_dict(doc)


def test_random_is_seeded():
    a, b = ReducedHypergraph.random(4, 3, 0.5, 9), ReducedHypergraph.random(4, 3, 0.5, 9)
    assert all(np.array_equal(a.pieces[t], b.pieces[t]) for t in a.pieces)


def test_from_partition_marks_dense_triads():
    doc = {"classes": [[0], [1], [2]], "parts": {"0,1": [[[0, 1]]], "0,2": [[[0, 2]]], "1,2": [[[1, 2]]]}}
    classes, parts = partition_from_dict(doc)
    A = from_partition(Hypergraph3(3, [(0, 1, 2)]), classes, parts, Fraction(1, 2))
    assert A.pieces[0, 1, 2].tolist() == [[[True]]]
    A = from_partition(Hypergraph3(3), classes, parts, Fraction(1, 2))
    assert A.num_edges == 0


# --- degree hypothesis -------------------------------------------------------------

def test_degree_hypothesis_on_complete():
    chk = degree_hypothesis(ReducedHypergraph.complete(5, 3), Fraction(1, 2), Fraction(1, 10))
    assert chk.ok
    assert all(v == [] for v in chk.exceptions.values())


def test_isolated_class_is_reported():
    A = ReducedHypergraph.complete(4, 3)
    A = A.with_pieces({(0, 1, 2): np.zeros((3, 3, 3), bool)})
    chk = degree_hypothesis(A, Fraction(1, 10), Fraction(1, 2))
    assert not chk.ok
    assert chk.exceptions[(0, 1), 2] == [0, 1, 2]
    assert ((0, 1), 2) in chk.violations


def test_exception_threshold_is_strict():
    # degree exactly (1/2 + eps) * |P_ac| * |P_bc| is not an exception
    A = empty(3, 2)
    T = np.zeros((2, 2, 2), bool)
    T[0, :, :] = [[1, 1], [1, 0]]  # vertex 0 of class 01 has degree 3 = (1/2 + 1/4) * 4
    A = A.with_pieces({(0, 1, 2): T})
    assert low_degree(A, (0, 1), 2, Fraction(1, 4)) == [1]
    assert low_degree(A, (0, 1), 2, Fraction(1, 3)) == [0, 1]


def test_degree_hypothesis_rate_on_random_instances():
    ok = sum(degree_hypothesis(ReducedHypergraph.random(6, 8, 0.75, s), Fraction(1, 10), Fraction(1, 5)).ok
             for s in range(50))
    assert ok >= 45


def test_degree_hypothesis_preconditions():
    with pytest.raises(ValueError):
        degree_hypothesis(empty(3, 1), 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        degree_hypothesis(empty(3, 1), Fraction(1, 10), 1)


# --- holes ---------------------------------------------------------------------------

def test_empty_piece_hole_is_full_classes():
    A = empty(4, 3)
    hole = find_hole(A, (0, 1, 2), 2, 2, 2, Fraction(1, 2))
    assert hole.sets == ((0, 1, 2), (0, 1, 2), (0, 1, 2))


def test_complete_piece_has_no_hole():
    A = ReducedHypergraph.complete(4, 3)
    assert find_hole(A, (0, 1, 2), 1, 1, 1, Fraction(1, 4)) is None
    assert find_hole(A, (0, 1, 2), 1, 1, 1, Fraction(1, 4), method="greedy", restarts=20) is None


def test_planted_half_block():
    rng = np.random.default_rng(0)
    T = rng.random((8, 8, 8)) < 0.9
    T[:4, :4, :4] = False
    A = empty(3, 8).with_pieces({(0, 1, 2): T})
    hole = find_hole(A, (0, 1, 2), 2, 2, 2, Fraction(1, 4))
    I1, I2, I3 = hole.sets
    assert min(len(I1), len(I2), len(I3)) >= 4
    assert not T[np.ix_(I1, I2, I3)].any()
    greedy = find_hole(A, (0, 1, 2), 1, 1, 1, Fraction(1, 4), method="greedy")
    assert greedy is not None and not T[np.ix_(*greedy.sets)].any()


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 20),
       st.floats(0.2, 0.8), st.integers(1, 3), st.integers(1, 3), st.integers(1, 3))
def test_exact_hole_matches_brute_force(s1, s2, s3, seed, p, a, b, c):
    T = np.random.default_rng(seed).random((s1, s2, s3)) < p
    A = ReducedHypergraph(3, {(0, 1): s1, (0, 2): s2, (1, 2): s3}, {(0, 1, 2): T})
    delta = Fraction(1, 3)
    hole = find_hole(A, (0, 1, 2), a, b, c, delta)
    t = [ceil(x * delta * s) for x, s in zip((a, b, c), (s1, s2, s3))]
    assert (hole is not None) == brute_hole(T, *t)
    if hole:
        I1, I2, I3 = hole.sets
        assert len(I1) >= t[0] and len(I2) >= t[1] and len(I3) >= t[2]
        assert not T[np.ix_(I1, I2, I3)].any()


def test_hole_guard():
    with pytest.raises(GuardError):
        hole_profile(np.zeros((13, 2, 2), bool))


def test_signature_of_empty_and_complete_pieces():
    A = empty(4, 3)
    sig = hole_signature(A, 2, Fraction(1, 2))
    assert sig.cells == frozenset((p, q, r) for p in (1, 2) for q in (1, 2) for r in (1, 2))
    assert len(hole_signature(ReducedHypergraph.complete(4, 3), 3, Fraction(1, 2))) == 0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 20), st.floats(0.2, 0.9), st.sampled_from([Fraction(1, 2), Fraction(1, 3),
                                                                        Fraction(1, 5)]))
def test_signature_is_downward_closed_and_matches_definition(seed, p, delta):
    A = ReducedHypergraph.random(3, 4, p, seed)
    sig = hole_signature(A, 2, delta)
    K = int(1 / delta)
    T = A.pieces[0, 1, 2]
    for cell in sig.cells:
        for i in range(3):
            if cell[i] > 1:
                lower = list(cell)
                lower[i] -= 1
                assert tuple(lower) in sig
    for p_, q, r in [(x, y, z) for x in range(1, K + 1) for y in range(1, K + 1) for z in range(1, K + 1)]:
        t = [ceil(v * delta * 4) for v in (p_, q, r)]
        expect = all(x <= 4 for x in t) and brute_hole(T, *t)
        assert ((p_, q, r) in sig) == expect


# --- patterns --------------------------------------------------------------------------

def test_validator_flips_when_an_edge_is_removed():
    A = ReducedHypergraph.complete(5, 2)
    pat = find_pattern_bruteforce(A)
    assert validate_pattern(A, pat)
    for piece, cell in pat.triples():
        T = A.pieces[piece].copy()
        T[cell] = False
        assert not validate_pattern(A.with_pieces({piece: T}), pat)


def test_validator_rejects_bad_indices():
    A = ReducedHypergraph.complete(4, 2)
    assert not validate_pattern(A, K4Pattern((1, 0, 2, 3), (0,) * 6))
    assert not validate_pattern(A, K4Pattern((0, 1, 2, 3), (0, 0, 0, 0, 0, 2)))


def test_brute_force_basics():
    assert find_pattern_bruteforce(ReducedHypergraph.complete(4, 2)) is not None
    assert find_pattern_bruteforce(empty(5, 2)) is None
    with pytest.raises(GuardError):
        find_pattern_bruteforce(empty(12, 12))  # C(12,4) * 12^6 > 1e9


@pytest.mark.parametrize("seed", range(6))
def test_brute_force_finds_first_pattern(seed):
    A = ReducedHypergraph.random(5, 2, 0.4, seed)
    every = brute_patterns(A)
    found = find_pattern_bruteforce(A)
    if every:
        assert (found.indices, found.vertices) == min(every)
    else:
        assert found is None


def test_solver_on_complete_instance():
    A = ReducedHypergraph.complete(4, 3)
    out = lemma_solver(A, Fraction(1, 10))
    assert isinstance(out, K4Pattern)
    assert validate_pattern(A, out)
    assert out.indices == (0, 1, 2, 3)
    assert out.trace["degree_hypothesis"]


def test_solver_step3_failure():
    out = solve(crafted_step3_instance(), Fraction(1, 10))
    assert isinstance(out, StepFailure) and out.step == 3
    assert out.witness["I12"] == []
    assert out.witness["I13"] == [0, 1, 2] and out.witness["I23"] == [0, 1, 2]


def test_single_empty_piece_fails_at_step1():
    A = ReducedHypergraph.complete(4, 3).with_pieces({(0, 1, 2): np.zeros((3, 3, 3), bool)})
    out = solve(A, Fraction(1, 10))
    assert isinstance(out, StepFailure) and out.step == 1


def test_solver_warns_when_degree_hypothesis_fails():
    with pytest.warns(UserWarning):
        lemma_solver(crafted_step3_instance(), Fraction(1, 10))


def test_step2_avoids_exception_sets():
    # make vertex 0 of classes 03 and 13 low-degree in the pieces with index 2
    A = ReducedHypergraph.complete(4, 3)
    T023 = A.pieces[0, 2, 3].copy()
    T023[:, 0, :] = False  # axis 1 is class 03
    T123 = A.pieces[1, 2, 3].copy()
    T123[:, 0, :] = False  # axis 1 is class 13
    A = A.with_pieces({(0, 2, 3): T023, (1, 2, 3): T123})
    out = solve(A, Fraction(1, 10))
    assert isinstance(out, K4Pattern)
    assert out.vertex("14") != 0 and out.vertex("24") != 0
    assert validate_pattern(A, out)


@pytest.mark.parametrize("seed", range(20))
def test_solver_consistent_with_brute_force(seed):
    A = ReducedHypergraph.random(5, 3, 0.7, seed)
    out = solve(A, Fraction(1, 10))
    brute = brute_patterns(A)
    if isinstance(out, K4Pattern):
        assert validate_pattern(A, out)
        assert (out.indices, out.vertices) in brute
    else:
        assert out.step in (1, 2, 3)


def test_pattern_free_instances_give_step_failure():
    # only pieces containing index 4 carry edges, so no four indices close a pattern
    A = ReducedHypergraph.complete(5, 2)
    A = A.with_pieces({t: np.zeros((2, 2, 2), bool) for t in combinations(range(4), 3)})
    assert find_pattern_bruteforce(A) is None
    assert isinstance(solve(A, Fraction(1, 10)), StepFailure)
