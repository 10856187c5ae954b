import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xorsat_geometry.flip import (EmptySet, NotACore, NotLinked, build_gamma,
                                  contains_flippable_cycle, cycle_mass_statistic,
                                  find_core_flippable_cycles, flippable_set_masks,
                                  is_flippable_cycle, is_flippable_set, is_linked_set,
                                  linked_set_examples, minimal_flippable_sets, two_linked_paths)
from xorsat_geometry.gf2 import Gf2System, enumerate_solutions, is_solution
from xorsat_geometry.hypergraph import Hypergraph, gen_hnm
from xorsat_geometry.peeling import r_core

from conftest import triangle_hub, two_triangle_hubs


def vertex_sets(cycles):
    return {frozenset(c.vertices) for c in cycles}


def test_hub_has_one_cycle():
    cycles = find_core_flippable_cycles(triangle_hub())
    assert vertex_sets(cycles) == {frozenset({0, 1, 2})}
    c = cycles[0]
    edges = triangle_hub().edge_list()
    for i, v in enumerate(c.vertices):
        assert v in edges[c.edges[i]] and c.vertices[i - 1] in edges[c.edges[i]]


def test_degree_three_core_has_no_cycles():
    # all four triples of {0,1,2,3}: every vertex has degree 3
    h = Hypergraph.from_edges(4, list(itertools.combinations(range(4), 3)))
    assert find_core_flippable_cycles(h) == []


def test_disjoint_copies():
    assert vertex_sets(find_core_flippable_cycles(two_triangle_hubs())) == {
        frozenset({0, 1, 2}), frozenset({4, 5, 6})}


def test_not_a_core():
    with pytest.raises(NotACore):
        find_core_flippable_cycles(Hypergraph.from_edges(3, [(0, 1, 2)]))


def test_parallel_edges_give_two_cycles_and_overlaps():
    h = Hypergraph.from_edges(3, [(0, 1, 2), (0, 1, 2)])
    assert vertex_sets(find_core_flippable_cycles(h)) == {
        frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 2})}
    stat = cycle_mass_statistic(h)
    assert (stat.cycle_count, stat.total_vertices, stat.disjoint) == (3, 6, False)


def test_flippable_sets():
    h = triangle_hub()
    assert is_flippable_set(h, {0, 1, 2})
    assert not is_flippable_set(h, {0})
    with pytest.raises(EmptySet):
        is_flippable_set(h, set())
    g = gen_hnm(10, 8, 3, 4)
    sols = enumerate_solutions(Gf2System.from_hypergraph(g), 1 << 10)
    for x, y in itertools.combinations(sols[:8], 2):
        assert is_flippable_set(g, np.flatnonzero(x ^ y).tolist())


def test_linked_sets_examples():
    assert not is_linked_set(triangle_hub(), {0, 1, 2})
    assert contains_flippable_cycle(triangle_hub(), {0, 1, 2})
    assert not is_linked_set(Hypergraph.from_edges(4, [(0, 1, 2), (1, 2, 3)]), {0})


def test_gamma_single_chain():
    h = Hypergraph.from_edges(5, [(0, 1, 3), (1, 2, 4)])
    s = {0, 1, 2}
    assert is_linked_set(h, s)
    paths, stray = two_linked_paths(h, s)
    assert stray == [] and [p.vertices for p in paths] == [(0, 1, 2)]
    g = build_gamma(h, s)
    assert g.vertices == (0, 2) and g.ell[2] == 1 and g.ell[3] == 0
    assert g.edges == [(0, 2)]


def test_gamma_all_triple_edges():
    h = Hypergraph.from_edges(4, list(itertools.combinations(range(4), 3)))
    g = build_gamma(h, {0, 1, 2, 3})
    assert g.ell[2] == 0 and g.ell[3] == 4 and len(g.vertices) == 4


def test_gamma_loop_path():
    # 0 -e0- 1 -e1- 2 -e2- 0 is a 2-linked path closing at 0 (degree 4)
    edges = [(0, 1, 3), (1, 2, 4), (2, 0, 5), (0, 6, 7), (6, 7, 8), (0, 7, 9)]
    h = Hypergraph.from_edges(10, edges)
    s = {0, 1, 2, 6, 7}
    assert is_linked_set(h, s)
    g = build_gamma(h, s)
    assert g.vertices == (0, 6, 7)
    assert sorted(g.edges) == [(0, 0), (0, 6, 7), (0, 7), (6, 7)]
    assert [g.degree(v) for v in g.vertices] == [4, 2, 3]
    assert (g.ell[2], g.ell[3]) == (3, 1)


def test_gamma_requires_linked():
    with pytest.raises(NotLinked):
        build_gamma(triangle_hub(), {0, 1, 2})


def test_minimal_flippable_sets():
    assert minimal_flippable_sets(triangle_hub()) == [frozenset({0, 1, 2})]
    assert set(minimal_flippable_sets(two_triangle_hubs())) == {frozenset({0, 1, 2}), frozenset({4, 5, 6})}
    # the four triples of {0,1,2,3} have full rank
    full = Hypergraph.from_edges(4, list(itertools.combinations(range(4), 3)))
    assert enumerate_solutions(Gf2System.from_hypergraph(full), 16)[0].sum() == 0
    assert minimal_flippable_sets(full) == []


def test_cycle_mass_examples():
    stat = cycle_mass_statistic(triangle_hub())
    assert (stat.cycle_count, stat.total_vertices, stat.disjoint) == (1, 3, True)
    full = Hypergraph.from_edges(4, list(itertools.combinations(range(4), 3)))
    stat = cycle_mass_statistic(full)
    assert (stat.cycle_count, stat.total_vertices, stat.disjoint) == (0, 0, True)


def random_core(n, k, seed, dens):
    h = gen_hnm(n, min(int(dens * n), math.comb(n, k)), k, seed)
    core, _ = r_core(h, 2)
    return core


cores = st.tuples(st.integers(5, 14), st.integers(2, 4), st.integers(0, 2**31), st.floats(0.5, 1.6))


@settings(max_examples=150, deadline=None)
@given(cores)
def test_cycle_search_is_exhaustive(params):
    core = random_core(*params)
    found = vertex_sets(find_core_flippable_cycles(core))
    deg2 = np.flatnonzero(core.degree == 2).tolist()
    if len(deg2) > 12:
        return
    brute = {frozenset(s) for size in range(2, len(deg2) + 1)
             for s in itertools.combinations(deg2, size) if is_flippable_cycle(core, s)}
    assert found == brute


@settings(max_examples=100, deadline=None)
@given(cores)
def test_cycles_flip_and_are_minimal(params):
    core = random_core(*params)
    sys = Gf2System.from_hypergraph(core)
    zero = np.zeros(core.n, dtype=np.uint8)
    for c in find_core_flippable_cycles(core):
        x = zero.copy()
        x[list(c.vertices)] = 1
        assert is_solution(sys, x)
        for size in range(1, min(len(c), 8)):
            for sub in itertools.combinations(c.vertices, size):
                assert not is_flippable_set(core, sub)
    if np.count_nonzero(core.degree) <= 16:
        minimal = minimal_flippable_sets(core)
        for s in minimal:
            assert is_flippable_set(core, s)
            if len(s) <= 10:
                assert not any(is_flippable_set(core, sub) for size in range(1, len(s))
                               for sub in itertools.combinations(sorted(s), size))
        cyc = vertex_sets(find_core_flippable_cycles(core))
        if cycle_mass_statistic(core).disjoint:
            assert cyc <= set(minimal)


@settings(max_examples=100, deadline=None)
@given(st.integers(6, 14), st.integers(0, 2**31), st.floats(0.6, 1.5))
def test_flippable_sets_without_cycles_are_linked(n, seed, dens):
    core = random_core(n, 3, seed, dens)
    if np.count_nonzero(core.degree) > 16:
        return
    labels, supports = flippable_set_masks(core, 1 << 16)
    for x in supports:
        s = {int(labels[i]) for i in range(labels.size) if (x >> i) & 1}
        if not contains_flippable_cycle(core, s):
            assert is_linked_set(core, s)


def test_constructed_linked_sets_satisfy_gamma_invariants():
    for h, s in linked_set_examples(60, seed=17):
        g = build_gamma(h, s)
        assert 1 <= len(g.vertices) <= len(s)
        assert all(g.degree(v) == h.degree[v] for v in g.vertices)
        assert g.density_bound_holds(h.k)
        # each maximal path is listed exactly once
        path_edges = [e for p in g.paths for e in p.edges]
        assert len(path_edges) == len(set(path_edges))
