import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xorsat_geometry.hypergraph import Hypergraph, gen_hnm
from xorsat_geometry.peeling import (CoreVertex, TraceMismatch, build_digraph, depth_upper,
                                     exact_depth, parallel_round_stats, r_core, reach_stats,
                                     remaining_after, replay_sequence, sequential_core,
                                     validate_trace)


def triangle_pendant() -> Hypergraph:
    return Hypergraph.from_edges(4, [(0, 1), (1, 2), (2, 0), (3, 0)])


def test_path_stripping(path3):
    core, trace = r_core(path3, 2)
    assert core.m == 0 and trace.core_vertices.size == 0
    assert trace.order.tolist() == [0, 2, 1]
    assert trace.rounds() == [[0, 2], [1]]
    validate_trace(path3, trace)


def test_triangle_pendant_core():
    h = triangle_pendant()
    core, trace = r_core(h, 2)
    assert trace.core_vertices.tolist() == [0, 1, 2]
    assert trace.order.tolist() == [3]
    assert sorted(tuple(sorted(e)) for e in core.edge_list()) == [(0, 1), (0, 2), (1, 2)]
    d = build_digraph(trace, h)
    assert list(zip(d.src.tolist(), d.dst.tolist())) == [(0, 3)]
    assert depth_upper(d, 3) == (1, [3])


def test_path_digraph(path3):
    _, trace = r_core(path3, 2)
    d = build_digraph(trace, path3)
    assert sorted(zip(d.src.tolist(), d.dst.tolist())) == [(1, 0), (1, 2)]
    assert trace.live_edges(1).size == 0 and d.in_degree[1] == 0
    assert d.reach(1) == [0, 1, 2]
    stats = reach_stats(d)
    assert stats.sizes.tolist() == [1, 3, 1] and stats.max_size == 3
    size, witness = depth_upper(d, 1)
    assert size == 3 and witness in ([0, 2, 1], [2, 0, 1])
    assert replay_sequence(path3, 2, witness)


def test_isolated_vertex_and_core_sentinel():
    h = Hypergraph.from_edges(5, [(0, 1), (1, 2), (2, 0)])
    _, trace = r_core(h, 2)
    d = build_digraph(trace, h)
    assert d.nodes[4] and d.reach(4) == [4]
    stats = reach_stats(d)
    assert stats.sizes[4] == 1
    assert stats.sizes[0] == 0 and not d.nodes[0]


def test_depth_upper_rejects_core_vertex():
    h = triangle_pendant()
    _, trace = r_core(h, 2)
    with pytest.raises(CoreVertex):
        depth_upper(build_digraph(trace, h), 0)


def test_trace_mismatch():
    h = gen_hnm(20, 15, 3, 1)
    _, trace = r_core(h, 2)
    with pytest.raises(TraceMismatch):
        build_digraph(trace, gen_hnm(20, 14, 3, 1))


def test_round_stats_path(path3):
    hist = parallel_round_stats(path3, 2, 2)
    assert hist[0].tolist() == [0, 2, 1]
    assert hist[1].tolist() == [1]
    assert parallel_round_stats(path3, 2, 0)[0].tolist() == [0, 2, 1]


def test_large_instance_trace_is_valid():
    h = gen_hnm(50_000, 45_000, 3, 9)
    core, trace = r_core(h, 2)
    validate_trace(h, trace)
    assert np.array_equal(sequential_core(h, 2), trace.in_core)
    assert np.array_equal(sequential_core(h, 2, descending=True), trace.in_core)
    assert core.m > 0 and core.degree[core.degree > 0].min() >= 2


small = st.tuples(st.integers(4, 14), st.integers(2, 4), st.integers(0, 2**31), st.floats(0.2, 1.2),
                  st.integers(2, 3))


@settings(max_examples=120, deadline=None)
@given(small)
def test_core_properties(params):
    n, k, seed, dens, r = params
    h = gen_hnm(n, min(int(dens * n), math.comb(n, k)), k, seed)
    core, trace = r_core(h, r)
    validate_trace(h, trace)
    assert np.array_equal(sequential_core(h, r), trace.in_core)
    assert np.array_equal(sequential_core(h, r, descending=True), trace.in_core)
    d = build_digraph(trace, h)
    # in-degree 0 exactly when the vertex killed no edge
    for v in trace.order.tolist():
        assert (d.in_degree[v] == 0) == (trace.live_edges(v).size == 0)
        assert trace.live_edges(v).size <= r - 1
    stats = reach_stats(d)
    for v in np.flatnonzero(d.nodes).tolist():
        assert stats.sizes[v] == len(d.reach(v))


def _ball(h: Hypergraph, sources: set[int], radius: int) -> set[int]:
    inc, edges = h.incidence, h.edges.tolist()
    seen, frontier = set(sources), set(sources)
    for _ in range(radius):
        nxt = {u for v in frontier for e in inc[v] for u in edges[e]} - seen
        seen |= nxt
        frontier = nxt
    return seen


@settings(max_examples=80, deadline=None)
@given(st.integers(5, 12), st.integers(0, 2**31), st.floats(0.3, 1.0))
def test_depth_bounds_and_reach_locality(n, seed, dens):
    h = gen_hnm(n, int(dens * n), 3, seed)
    _, trace = r_core(h, 2)
    d = build_digraph(trace, h)
    for v in trace.order.tolist():
        size, witness = depth_upper(d, v)
        assert witness[-1] == v and replay_sequence(h, 2, witness)
        assert exact_depth(h, 2, v) <= size
        reach = set(d.reach(v))
        for i in range(1, 4):
            if trace.round_of[v] > i:
                alive = remaining_after(h, 2, i)
                assert reach <= _ball(h, {u for u in reach if alive[u]}, i)
