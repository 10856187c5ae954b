"""Cluster structure of a homogeneous k-XOR system read off its 2-stripping.

Every solution is pinned down by its values on three kinds of vertex:

* ``fixed``: 2-core vertices outside every core flippable cycle,
* one representative per core flippable cycle (its lowest vertex),
* stripped vertices that killed no edge (in-degree 0 in the digraph D).

The last two form ``B``.  Each other vertex v satisfies
``x[v] = XOR(x[w] for w in chi[v]) ^ z[v]`` where ``chi[v]`` is a subset of
``B | fixed`` and ``z[v]`` is constant on a cluster.  Toggling one b in B, and
with it every vertex whose chi contains b, moves between solutions of the
same cluster.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .flip import FlippableCycle, find_core_flippable_cycles
from .gf2 import Gf2System, rank
from .hypergraph import Hypergraph
from .peeling import StripDigraph, StrippingTrace, build_digraph, r_core

MAX_ORACLE_SOLUTIONS = 4096


class OverlappingCycles(ValueError):
    pass


class NotTwoCore(ValueError):
    pass


class NotASolution(ValueError):
    pass


class NotACoreSolution(ValueError):
    pass


class InconsistentStructure(RuntimeError):
    pass


class DifferentClusters(ValueError):
    pass


class TooManySolutions(ValueError):
    pass


@dataclass(frozen=True)
class ClusterStructure:
    h: Hypergraph
    trace: StrippingTrace
    fixed: frozenset[int]
    cycles: tuple[FlippableCycle, ...]   # edge ids index h.edges
    reps: tuple[int, ...]                # v_C, one per cycle
    B: tuple[int, ...]
    chi: tuple[frozenset[int], ...]      # per vertex
    dependents: Mapping[int, tuple[int, ...]]

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def free_stripped(self) -> tuple[int, ...]:
        """B without the cycle representatives, ascending."""
        reps = set(self.reps)
        return tuple(b for b in self.B if b not in reps)

    @property
    def cycle_vertices(self) -> frozenset[int]:
        return frozenset(v for c in self.cycles for v in c.vertices)

    def toggle_set(self, b: int) -> tuple[int, ...]:
        """Vertices that change when b is toggled inside its cluster."""
        return self.dependents[b]

    def max_toggle_support(self) -> int:
        return max((len(self.dependents[b]) for b in self.B), default=0)


def _check_loop_free(h: Hypergraph) -> None:
    if h.m and h.k > 1:
        srt = np.sort(h.edges, axis=1)
        if np.any(srt[:, 1:] == srt[:, :-1]):
            raise ValueError("cluster structure needs edges without repeated vertices")


def build_cluster_structure(h: Hypergraph, trace: StrippingTrace | None = None,
                            d: StripDigraph | None = None) -> ClusterStructure:
    """Fixed set, cycles, B, chi and dependents.  Missing trace/digraph are computed."""
    _check_loop_free(h)
    if trace is None:
        _, trace = r_core(h, 2)
    if trace.r != 2:
        raise NotTwoCore(f"trace uses r={trace.r}, need r=2")
    if d is None:
        d = build_digraph(trace, h)
    core_ids = trace.core_edge_ids
    core = Hypergraph(h.n, h.k, h.edges[core_ids])
    cycles = []
    owner: dict[int, int] = {}
    for ci, c in enumerate(find_core_flippable_cycles(core)):
        for v in c.vertices:
            if v in owner:
                raise OverlappingCycles(f"vertex {v} lies on cycles {owner[v]} and {ci}")
            owner[v] = ci
        cycles.append(FlippableCycle(c.vertices, tuple(int(core_ids[e]) for e in c.edges)))
    reps = tuple(min(c.vertices) for c in cycles)

    in_core = trace.in_core
    fixed = frozenset(int(v) for v in np.flatnonzero(in_core) if int(v) not in owner)
    stripped_free = [int(v) for v in trace.order.tolist() if d.in_degree[v] == 0]
    B = tuple(sorted(set(reps) | set(stripped_free)))

    chi: list[frozenset[int] | None] = [None] * h.n
    for v in fixed:
        chi[v] = frozenset((v,))
    for v, ci in owner.items():
        chi[v] = frozenset((reps[ci],))
    for v in stripped_free:
        chi[v] = frozenset((v,))
    edges = h.edges.tolist()
    for v in reversed(trace.order.tolist()):
        if chi[v] is not None:
            continue
        live = trace.live_edges(v)
        # r = 2: a vertex with in-degree >= 1 killed exactly one edge
        acc: set[int] = set()
        for u in edges[int(live[0])]:
            if u != v:
                acc ^= chi[u]
        chi[v] = frozenset(acc)

    deps: dict[int, list[int]] = {b: [] for b in B}
    for u, s in enumerate(chi):
        for b in s:
            if b in deps:
                deps[b].append(u)
    return ClusterStructure(h=h, trace=trace, fixed=fixed, cycles=tuple(cycles), reps=reps, B=B,
                            chi=tuple(chi), dependents={b: tuple(us) for b, us in deps.items()})


def frozen_variables(cs: ClusterStructure) -> frozenset[int]:
    B = set(cs.B)
    stripped = cs.trace.order.tolist()
    return cs.fixed | frozenset(v for v in stripped if not (cs.chi[v] & B))


def _violations(h: Hypergraph, x: np.ndarray) -> int:
    if h.m == 0:
        return 0
    return int(np.count_nonzero(x[h.edges].sum(axis=1) & 1))


def _as_solution(cs: ClusterStructure, x) -> np.ndarray:
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (cs.n,) or _violations(cs.h, x):
        raise NotASolution("assignment does not satisfy every equation")
    return x


def z_values(cs: ClusterStructure, x) -> np.ndarray:
    """x[v] ^ XOR(x[chi[v]]) per vertex; constant on each cluster."""
    x = np.asarray(x, dtype=np.uint8)
    out = np.empty(cs.n, dtype=np.uint8)
    for v, s in enumerate(cs.chi):
        acc = int(x[v])
        for w in s:
            acc ^= int(x[w])
        out[v] = acc
    return out


def same_cluster(cs: ClusterStructure, x, y) -> bool:
    """Whether two solutions differ on the core only along whole flippable cycles."""
    x, y = _as_solution(cs, x), _as_solution(cs, y)
    diff = (x ^ y).astype(bool)
    if np.any(diff[list(cs.fixed)] if cs.fixed else False):
        return False
    for c in cs.cycles:
        hit = diff[list(c.vertices)]
        if hit.any() and not hit.all():
            raise InconsistentStructure("solutions split a flippable cycle")
    return True


def cluster_id(cs: ClusterStructure, x) -> tuple:
    """Values on ``fixed`` plus each cycle's pattern relative to its representative."""
    x = np.asarray(x, dtype=np.uint8)
    fixed_part = tuple(int(x[v]) for v in sorted(cs.fixed))
    cyc_part = tuple(tuple(int(x[v] ^ x[rep]) for v in c.vertices)
                     for c, rep in zip(cs.cycles, cs.reps))
    return fixed_part, cyc_part


def cluster_count(cs: ClusterStructure, sys: Gf2System) -> tuple[int, int]:
    """``(log2 #clusters, log2 cluster size)``."""
    if sys.n != cs.n:
        raise InconsistentStructure("system and structure have different variable counts")
    dim = sys.n - rank(sys)
    if dim < len(cs.B):
        raise InconsistentStructure(f"kernel dimension {dim} < |B| = {len(cs.B)}")
    return dim - len(cs.B), len(cs.B)


def extend_core_solution(cs: ClusterStructure, core_sol, free_bits) -> np.ndarray:
    """Full solution from core values and bits for the stripped free vertices.

    ``core_sol`` has one entry per vertex; only core entries are read.
    ``free_bits`` is a mapping vertex -> bit or a sequence aligned with
    ``cs.free_stripped``.
    """
    h, trace = cs.h, cs.trace
    core_sol = np.asarray(core_sol, dtype=np.uint8)
    if core_sol.shape != (h.n,):
        raise NotACoreSolution(f"core assignment must have length {h.n}")
    free = cs.free_stripped
    if not isinstance(free_bits, Mapping):
        free_bits = list(free_bits)
        if len(free_bits) != len(free):
            raise ValueError(f"expected {len(free)} free bits, got {len(free_bits)}")
        free_bits = dict(zip(free, free_bits))
    x = np.where(trace.in_core, core_sol & 1, 0).astype(np.uint8)
    core_edges = h.edges[trace.core_edge_ids]
    if core_edges.size and np.any(x[core_edges].sum(axis=1) & 1):
        raise NotACoreSolution("core assignment violates a core equation")
    for v in free:
        x[v] = int(free_bits[v]) & 1
    edges = h.edges.tolist()
    for v in reversed(trace.order.tolist()):
        live = trace.live_edges(v)
        if live.size == 0:
            continue
        acc = 0
        for u in edges[int(live[0])]:
            if u != v:
                acc ^= int(x[u])
        x[v] = acc
    return x


def cluster_walk(cs: ClusterStructure, x, y) -> list[np.ndarray]:
    """Solutions from x to y, toggling differing members of B in ascending order."""
    x, y = _as_solution(cs, x), _as_solution(cs, y)
    if not same_cluster(cs, x, y):
        raise DifferentClusters("x and y lie in different clusters")
    walk = [x.copy()]
    cur = x.copy()
    for b in cs.B:
        if cur[b] != y[b]:
            cur[list(cs.dependents[b])] ^= 1
            walk.append(cur.copy())
    if not np.array_equal(cur, y):
        raise InconsistentStructure("walk did not reach its target")
    return walk


def hamming_steps(walk: Sequence[np.ndarray]) -> list[int]:
    return [int(np.count_nonzero(a != b)) for a, b in zip(walk, walk[1:])]


def toggle_vectors(cs: ClusterStructure) -> list[np.ndarray]:
    """One 0/1 vector per b in B: the set that flips when b is toggled."""
    out = []
    for b in cs.B:
        vec = np.zeros(cs.n, dtype=np.uint8)
        vec[list(cs.dependents[b])] = 1
        out.append(vec)
    return out


def is_d_connected(sols: Sequence[np.ndarray], x, y, d: int) -> bool:
    """BFS over sols with an edge between any two at Hamming distance <= d."""
    if len(sols) > MAX_ORACLE_SOLUTIONS:
        raise TooManySolutions(f"{len(sols)} solutions exceed {MAX_ORACLE_SOLUTIONS}")
    mat = np.asarray(sols, dtype=np.uint8).reshape(len(sols), -1)
    x, y = np.asarray(x, dtype=np.uint8), np.asarray(y, dtype=np.uint8)

    def locate(z: np.ndarray) -> int:
        hits = np.flatnonzero(np.all(mat == z, axis=1)) if len(sols) else []
        if len(hits) == 0:
            raise ValueError("endpoint is not among the given solutions")
        return int(hits[0])

    src, dst = locate(x), locate(y)
    seen = np.zeros(len(sols), dtype=bool)
    seen[src] = True
    queue = deque([src])
    while queue:
        i = queue.popleft()
        if i == dst:
            return True
        near = np.flatnonzero(~seen & (np.count_nonzero(mat != mat[i], axis=1) <= d))
        seen[near] = True
        queue.extend(near.tolist())
    return False
