"""r-core peeling, stripping traces and the stripping digraph.

The parallel stripping process removes, in each round, every remaining
vertex of degree < r.  Inside a round vertices are removed in ascending
index order, which turns the rounds into one sequential stripping sequence.
Under that order the edges alive when ``v`` is removed (its *live edges*)
are exactly the edges whose first-removed vertex is ``v``, so the whole
trace comes out of the round numbers without replaying it.

Convention: ``v`` belongs to its own reachable set R+(v), so ``|R+(v)|``
counts v and bounds the length of a stripping sequence ending at v.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .hypergraph import Hypergraph


class TraceMismatch(ValueError):
    pass


class CoreVertex(ValueError):
    pass


def _csr(keys: np.ndarray, values: np.ndarray, size: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.argsort(keys, kind="stable")
    ptr = np.zeros(size + 1, dtype=np.int64)
    np.cumsum(np.bincount(keys, minlength=size), out=ptr[1:])
    return ptr, values[idx]


def _gather(ptr: np.ndarray, data: np.ndarray, rows: np.ndarray) -> np.ndarray:
    """Concatenate ``data[ptr[r]:ptr[r+1]]`` over ``rows``."""
    starts = ptr[rows]
    lens = ptr[rows + 1] - starts
    total = int(lens.sum())
    if total == 0:
        return data[:0]
    offs = np.repeat(starts - np.cumsum(lens) + lens, lens)
    return data[offs + np.arange(total)]


def _incidence_csr(h: Hypergraph) -> tuple[np.ndarray, np.ndarray]:
    flat = h.edges.ravel()
    eids = np.repeat(np.arange(h.m, dtype=np.int64), h.k)
    return _csr(flat, eids, h.n)


def _rounds(h: Hypergraph, r: int) -> Iterator[tuple[int, np.ndarray, np.ndarray, np.ndarray]]:
    """Yield ``(t, removed_now, remaining, degree)`` after each round t >= 1.

    ``degree`` is the degree in H_t; removed vertices keep stale entries.
    """
    ptr, inc = _incidence_csr(h)
    deg = h.degree.copy()
    remaining = np.ones(h.n, dtype=bool)
    edge_alive = np.ones(h.m, dtype=bool)
    t = 0
    while True:
        cand = np.flatnonzero(remaining & (deg < r))
        if cand.size == 0:
            return
        t += 1
        remaining[cand] = False
        hit = _gather(ptr, inc, cand)
        hit = np.unique(hit[edge_alive[hit]])
        edge_alive[hit] = False
        if hit.size:
            deg -= np.bincount(h.edges[hit].ravel(), minlength=h.n)
        yield t, cand, remaining, deg


@dataclass(frozen=True, eq=False)
class StrippingTrace:
    """Terminal r-stripping sequence consistent with the parallel rounds.

    ``round_of[v]`` is the 1-based round that removed v (-1 for core
    vertices); ``position[v]`` is v's index in ``order`` (-1 for core).
    ``edge_killer[e]`` is the vertex whose removal deleted edge e, or -1 if e
    is a core edge; the live edges E_v of v are the edges it killed.
    """

    n: int
    r: int
    order: np.ndarray
    round_of: np.ndarray
    position: np.ndarray
    edge_killer: np.ndarray
    num_rounds: int
    _live_ptr: np.ndarray = field(repr=False)
    _live_ids: np.ndarray = field(repr=False)

    @property
    def in_core(self) -> np.ndarray:
        return self.round_of < 0

    @property
    def core_vertices(self) -> np.ndarray:
        return np.flatnonzero(self.round_of < 0)

    @property
    def core_edge_ids(self) -> np.ndarray:
        return np.flatnonzero(self.edge_killer < 0)

    def live_edges(self, v: int) -> np.ndarray:
        return self._live_ids[self._live_ptr[v]:self._live_ptr[v + 1]]

    def rounds(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.num_rounds)]
        for v in self.order.tolist():
            out[self.round_of[v] - 1].append(v)
        return out


def r_core(h: Hypergraph, r: int) -> tuple[Hypergraph, StrippingTrace]:
    """The r-core of ``h`` (same vertex indexing, core edges only) and its trace."""
    if r < 2:
        raise ValueError("r must be at least 2")
    n = h.n
    round_of = np.full(n, -1, dtype=np.int64)
    num_rounds = 0
    for t, cand, _, _ in _rounds(h, r):
        round_of[cand] = t
        num_rounds = t

    stripped = round_of >= 0
    key = np.where(stripped, round_of * n + np.arange(n), np.iinfo(np.int64).max)
    order = np.flatnonzero(stripped)
    order = order[np.argsort(key[order], kind="stable")]
    position = np.full(n, -1, dtype=np.int64)
    position[order] = np.arange(order.size)

    edge_killer = np.full(h.m, -1, dtype=np.int64)
    if h.m:
        ekeys = key[h.edges]
        first = np.argmin(ekeys, axis=1)
        killer = h.edges[np.arange(h.m), first]
        dead = stripped[killer]
        edge_killer[dead] = killer[dead]
    dead_ids = np.flatnonzero(edge_killer >= 0)
    live_ptr, live_ids = _csr(edge_killer[dead_ids], dead_ids, n)

    trace = StrippingTrace(n=n, r=r, order=order, round_of=round_of, position=position,
                           edge_killer=edge_killer, num_rounds=num_rounds,
                           _live_ptr=live_ptr, _live_ids=live_ids)
    for arr in (order, round_of, position, edge_killer, live_ptr, live_ids):
        arr.setflags(write=False)
    core = Hypergraph(n, h.k, h.edges[edge_killer < 0])
    return core, trace


def sequential_core(h: Hypergraph, r: int, descending: bool = False) -> np.ndarray:
    """Boolean core mask from a one-at-a-time worklist peel.

    Independent of :func:`r_core`; used to check order independence.
    """
    deg = h.degree.tolist()
    inc = h.incidence
    edges = h.edges.tolist()
    removed = [False] * h.n
    edge_dead = [False] * h.m
    start = range(h.n - 1, -1, -1) if descending else range(h.n)
    stack = [v for v in start if deg[v] < r][::-1]
    while stack:
        v = stack.pop()
        if removed[v]:
            continue
        removed[v] = True
        for e in inc[v]:
            if edge_dead[e]:
                continue
            edge_dead[e] = True
            for u in edges[e]:
                deg[u] -= 1
                if not removed[u] and deg[u] < r:
                    stack.append(u)
    return ~np.array(removed, dtype=bool)


def replay_sequence(h: Hypergraph, r: int, seq: Sequence[int]) -> bool:
    """True iff ``seq`` can be removed in order, each vertex having degree < r."""
    deg = h.degree.tolist()
    inc = h.incidence
    edges = h.edges.tolist()
    removed = set()
    edge_dead = [False] * h.m
    for v in seq:
        v = int(v)
        if v in removed or deg[v] >= r:
            return False
        removed.add(v)
        for e in inc[v]:
            if not edge_dead[e]:
                edge_dead[e] = True
                for u in edges[e]:
                    deg[u] -= 1
    return True


def validate_trace(h: Hypergraph, trace: StrippingTrace) -> None:
    """Replay the whole trace; raise :class:`TraceMismatch` on any inconsistency."""
    if trace.n != h.n or trace.edge_killer.size != h.m:
        raise TraceMismatch("trace was built for a different hypergraph")
    deg = h.degree.tolist()
    inc = h.incidence
    edges = h.edges.tolist()
    edge_dead = [False] * h.m
    killer = trace.edge_killer.tolist()
    last_round = 0
    for v in trace.order.tolist():
        rnd = int(trace.round_of[v])
        if rnd < last_round:
            raise TraceMismatch(f"vertex {v} of round {rnd} comes after round {last_round}")
        last_round = rnd
        if deg[v] >= trace.r:
            raise TraceMismatch(f"vertex {v} has degree {deg[v]} >= r at removal")
        for e in inc[v]:
            if not edge_dead[e]:
                if killer[e] != v:
                    raise TraceMismatch(f"edge {e} alive at {v}'s removal but killed by {killer[e]}")
                edge_dead[e] = True
                for u in edges[e]:
                    deg[u] -= 1
    for e, dead in enumerate(edge_dead):
        if not dead and killer[e] != -1:
            raise TraceMismatch(f"edge {e} marked as killed but survives the trace")
    core = trace.in_core
    if any(core[v] and deg[v] < trace.r for v in range(h.n)):
        raise TraceMismatch("remaining graph is not an r-core")


# ------------------------------------------------------------- the digraph D


@dataclass(frozen=True, eq=False)
class StripDigraph:
    """Arc (u, v) for every stripped v and every u != v in a live edge of v.

    ``nodes`` masks the vertex set: stripped vertices plus core vertices that
    share an edge with a stripped vertex.  Arcs point from later-removed (or
    core) vertices to earlier-removed ones, so the graph is acyclic.
    """

    h: Hypergraph
    trace: StrippingTrace
    nodes: np.ndarray
    src: np.ndarray
    dst: np.ndarray
    out_ptr: np.ndarray
    out_idx: np.ndarray
    in_degree: np.ndarray

    def successors(self, u: int) -> np.ndarray:
        return self.out_idx[self.out_ptr[u]:self.out_ptr[u + 1]]

    def reach(self, v: int) -> list[int]:
        """R+(v), including v itself."""
        if not self.nodes[v]:
            return []
        seen = {v}
        queue = deque([v])
        ptr, idx = self.out_ptr, self.out_idx
        while queue:
            u = queue.popleft()
            for w in idx[ptr[u]:ptr[u + 1]].tolist():
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return sorted(seen)


def build_digraph(trace: StrippingTrace, h: Hypergraph) -> StripDigraph:
    if trace.n != h.n or trace.edge_killer.size != h.m:
        raise TraceMismatch("trace was built for a different hypergraph")
    dead = np.flatnonzero(trace.edge_killer >= 0)
    killer = trace.edge_killer[dead]
    members = h.edges[dead]
    if dead.size and not np.all((members == killer[:, None]).any(axis=1)):
        raise TraceMismatch("an edge's recorded killer is not one of its vertices")
    src = members.ravel()
    dst = np.repeat(killer, h.k)
    keep = src != dst
    src, dst = src[keep], dst[keep]
    if src.size:
        pairs = np.unique(np.stack([src, dst], axis=1), axis=0)
        src, dst = pairs[:, 0].copy(), pairs[:, 1].copy()
    nodes = ~trace.in_core
    nodes[members.ravel()] = True
    out_ptr, out_idx = _csr(src, dst, h.n)
    in_degree = np.bincount(dst, minlength=h.n)
    return StripDigraph(h=h, trace=trace, nodes=nodes, src=src, dst=dst,
                        out_ptr=out_ptr, out_idx=out_idx, in_degree=in_degree)


@dataclass
class ReachStats:
    sizes: np.ndarray            # |R+(v)| per vertex, 0 for vertices outside D
    max_size: int
    histogram: dict[int, int]


def reach_stats(d: StripDigraph) -> ReachStats:
    """Exact |R+(v)| for every vertex of D.

    Sets are built bottom-up in removal order (every arc points to an earlier
    vertex); a child's set is dropped once all its parents have used it.
    """
    trace = d.trace
    sizes = np.zeros(d.h.n, dtype=np.int64)
    pending = d.in_degree.tolist()
    ptr, idx = d.out_ptr.tolist(), d.out_idx.tolist()
    sets: dict[int, set] = {}
    core_nodes = np.flatnonzero(d.nodes & trace.in_core).tolist()
    for v in trace.order.tolist() + core_nodes:
        s = {v}
        for w in idx[ptr[v]:ptr[v + 1]]:
            s |= sets[w]
            pending[w] -= 1
            if pending[w] == 0:
                del sets[w]
        sizes[v] = len(s)
        if pending[v]:
            sets[v] = s
    vals, counts = np.unique(sizes[d.nodes], return_counts=True)
    return ReachStats(sizes=sizes, max_size=int(sizes.max()) if sizes.size else 0,
                      histogram={int(a): int(b) for a, b in zip(vals, counts)})


def depth_upper(d: StripDigraph, v: int) -> tuple[int, list[int]]:
    """``(|R+(v)|, witness)``: a stripping sequence over R+(v) ending at v.

    The witness is R+(v) sorted by trace position, which reverses a
    topological order of D; it is replayed before being returned.
    """
    trace = d.trace
    if trace.in_core[v]:
        raise CoreVertex(f"vertex {v} is in the {trace.r}-core")
    reach = d.reach(v)
    witness = sorted(reach, key=lambda u: trace.position[u])
    if witness[-1] != v or not replay_sequence(d.h, trace.r, witness):
        raise TraceMismatch(f"witness for {v} does not replay")
    return len(reach), witness


def exact_depth(h: Hypergraph, r: int, v: int, max_noncore: int = 12) -> int:
    """Length of a shortest r-stripping sequence ending with ``v`` (subset BFS).

    Exponential in the number of non-core vertices, hence the limit.
    """
    core_mask = sequential_core(h, r)
    if core_mask[v]:
        raise CoreVertex(f"vertex {v} is in the {r}-core")
    free = np.flatnonzero(~core_mask).tolist()
    if len(free) > max_noncore:
        raise ValueError(f"{len(free)} non-core vertices exceed the limit {max_noncore}")
    bit = {u: i for i, u in enumerate(free)}
    edges = h.edges.tolist()
    inc = h.incidence

    def degree_after(state: int, u: int) -> int:
        total = 0
        for e in inc[u]:
            if not any(w in bit and (state >> bit[w]) & 1 for w in edges[e]):
                total += 1
        return total

    frontier = {0}
    seen = {0}
    for length in range(1, len(free) + 1):
        nxt = set()
        for state in frontier:
            for u in free:
                b = 1 << bit[u]
                if state & b or degree_after(state, u) >= r:
                    continue
                if u == v:
                    return length
                new = state | b
                if new not in seen:
                    seen.add(new)
                    nxt.add(new)
        frontier = nxt
    raise RuntimeError("vertex could not be stripped")


def round_degree_histograms(h: Hypergraph, r: int, t_max: int) -> list[np.ndarray]:
    """Degree histograms of the surviving vertices of H_0, ..., H_{t_max}.

    ``hist[t][d]`` counts vertices still present after t parallel rounds with
    degree d.  Once the process stops the last histogram repeats.
    """
    hists = [np.bincount(h.degree, minlength=1)]
    for t, _, remaining, deg in _rounds(h, r):
        if t > t_max:
            break
        hists.append(np.bincount(deg[remaining], minlength=1))
    while len(hists) < t_max + 1:
        hists.append(hists[-1].copy())
    return hists[:t_max + 1]


parallel_round_stats = round_degree_histograms


def remaining_after(h: Hypergraph, r: int, t: int) -> np.ndarray:
    """Vertex mask of H_t, the hypergraph left after t parallel rounds."""
    remaining = np.ones(h.n, dtype=bool)
    for rnd, _, rem, _ in _rounds(h, r):
        if rnd > t:
            break
        remaining = rem.copy()
    return remaining
