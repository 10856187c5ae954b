import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xorsat_geometry.clusters import (DifferentClusters, InconsistentStructure, NotACoreSolution,
                                      NotASolution, NotTwoCore, OverlappingCycles,
                                      TooManySolutions, build_cluster_structure, cluster_count,
                                      cluster_walk, extend_core_solution, frozen_variables,
                                      hamming_steps, is_d_connected, same_cluster)
from xorsat_geometry.experiments import check_instance
from xorsat_geometry.gf2 import Gf2System, enumerate_solutions, is_solution
from xorsat_geometry.hypergraph import Hypergraph, gen_hnm
from xorsat_geometry.peeling import r_core

from conftest import bits, triangle_hub


def test_hub_structure():
    h = triangle_hub()
    cs = build_cluster_structure(h)
    assert cs.B == (0,) and cs.reps == (0,)
    assert cs.chi[1] == cs.chi[2] == frozenset({0}) and cs.chi[0] == frozenset({0})
    assert cs.fixed == frozenset({3}) and cs.chi[3] == frozenset({3})
    assert frozen_variables(cs) == frozenset({3})
    assert cluster_count(cs, Gf2System.from_hypergraph(h)) == (0, 1)
    assert same_cluster(cs, bits("0000"), bits("1110"))
    assert same_cluster(cs, bits("1110"), bits("1110"))
    walk = cluster_walk(cs, bits("0000"), bits("1110"))
    assert [w.tolist() for w in walk] == [[0, 0, 0, 0], [1, 1, 1, 0]]
    assert hamming_steps(walk) == [3]
    assert len(cluster_walk(cs, bits("1110"), bits("1110"))) == 1
    assert np.array_equal(extend_core_solution(cs, bits("0000"), []), bits("0000"))
    sols = enumerate_solutions(Gf2System.from_hypergraph(h), 16)
    assert is_d_connected(sols, bits("0000"), bits("1110"), 3)
    assert not is_d_connected(sols, bits("0000"), bits("1110"), 2)


def test_single_edge_structure():
    h = Hypergraph.from_edges(3, [(0, 1, 2)])
    cs = build_cluster_structure(h)
    assert cs.B == (1, 2) and cs.chi[0] == frozenset({1, 2})
    assert frozen_variables(cs) == frozenset()
    assert cluster_count(cs, Gf2System.from_hypergraph(h)) == (0, 2)
    x = extend_core_solution(cs, np.zeros(3, dtype=np.uint8), [1, 0])
    assert x.tolist() == [1, 1, 0]
    assert extend_core_solution(cs, np.zeros(3, dtype=np.uint8), {1: 0, 2: 0}).tolist() == [0, 0, 0]
    assert cs.dependents[1] == (0, 1) and cs.max_toggle_support() == 2


def test_empty_hypergraph_structure():
    cs = build_cluster_structure(Hypergraph.from_edges(3, [], k=3))
    assert cs.B == (0, 1, 2)
    assert all(cs.chi[v] == frozenset({v}) for v in range(3))


def test_error_paths():
    h = triangle_hub()
    cs = build_cluster_structure(h)
    with pytest.raises(NotASolution):
        same_cluster(cs, bits("1000"), bits("0000"))
    with pytest.raises(NotACoreSolution):
        extend_core_solution(cs, bits("1000"), [])
    with pytest.raises(InconsistentStructure):
        cluster_count(cs, Gf2System.from_rows(5, []))
    with pytest.raises(OverlappingCycles):
        build_cluster_structure(Hypergraph.from_edges(3, [(0, 1, 2), (0, 1, 2)]))
    _, trace3 = r_core(h, 3)
    with pytest.raises(NotTwoCore):
        build_cluster_structure(h, trace3)
    with pytest.raises(TooManySolutions):
        sols = [np.zeros(13, dtype=np.uint8)] * 5000
        is_d_connected(sols, sols[0], sols[0], 1)


def test_distance_one_disconnected():
    sols = [bits("0000"), bits("1100")]
    assert not is_d_connected(sols, sols[0], sols[1], 1)
    assert is_d_connected(sols, sols[0], sols[1], 4)


def _instance_with_two_clusters():
    for seed in range(500):
        h = gen_hnm(12, 11, 3, seed)
        cs = build_cluster_structure(h)
        sys = Gf2System.from_hypergraph(h)
        if cluster_count(cs, sys)[0] >= 1:
            return h, cs, enumerate_solutions(sys, 1 << 12)
    raise AssertionError("no multi-cluster instance found")


def test_different_clusters():
    h, cs, sols = _instance_with_two_clusters()
    fixed = sorted(cs.fixed)
    x = sols[0]
    y = next(s for s in sols if np.any(s[fixed] != x[fixed]))
    assert not same_cluster(cs, x, y)
    with pytest.raises(DifferentClusters):
        cluster_walk(cs, x, y)


@settings(max_examples=120, deadline=None)
@given(st.integers(4, 14), st.integers(3, 4), st.integers(0, 2**31), st.floats(0.4, 1.3))
def test_structure_matches_enumeration(n, k, seed, dens):
    from math import comb
    h = gen_hnm(n, min(int(round(dens * n)), comb(n, k)), k, seed)
    rep = check_instance(h, random.Random(seed))
    assert rep.failures == 0, rep.notes


@settings(max_examples=60, deadline=None)
@given(st.integers(6, 14), st.integers(0, 2**31))
def test_walk_steps_match_toggle_sets(n, seed):
    h = gen_hnm(n, n, 3, seed)
    try:
        cs = build_cluster_structure(h)
    except OverlappingCycles:
        return
    sys = Gf2System.from_hypergraph(h)
    sols = enumerate_solutions(sys, 1 << 14)
    x = sols[0]
    for y in sols[1:6]:
        if not same_cluster(cs, x, y):
            continue
        walk = cluster_walk(cs, x, y)
        toggled = [b for b in cs.B if x[b] != y[b]]
        assert hamming_steps(walk) == [len(cs.dependents[b]) for b in toggled]
        assert all(is_solution(sys, w) for w in walk)
