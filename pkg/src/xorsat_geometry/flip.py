"""Flippable sets, flippable cycles, linked sets and the contracted graph Gamma(S).

A flippable cycle lives on degree-2 vertices, so it is searched for in the
*link graph*: one node per hyperedge, one link per degree-2 vertex joining
its two hyperedges.  Flippable cycles are exactly the simple cycles of that
multigraph (two parallel links make a cycle of length 2).

Linked-set and Gamma(S) routines assume every edge touching S is simple
(no repeated vertex); random H_k(n, m) instances always are.  A set that *is*
a flippable cycle counts as containing one, so it is never linked.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .gf2 import CapExceeded, Gf2System, enumerate_solution_masks
from .hypergraph import Hypergraph, UnionFind, gen_hnm, make_rng
from .peeling import r_core


class NotACore(ValueError):
    pass


class EmptySet(ValueError):
    pass


class NotLinked(ValueError):
    pass


@dataclass(frozen=True)
class FlippableCycle:
    """``edges[i]`` contains ``vertices[i-1]`` and ``vertices[i]`` (indices mod t)."""

    vertices: tuple[int, ...]
    edges: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.vertices)


def _degree_two_links(h: Hypergraph) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(vertex, edge_a, edge_b) for each degree-2 vertex lying in two distinct edges."""
    if h.m == 0:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, empty
    deg = h.degree
    flat = h.edges.ravel()
    eids = np.repeat(np.arange(h.m, dtype=np.int64), h.k)
    sel = deg[flat] == 2
    vs, es = flat[sel], eids[sel]
    order = np.lexsort((es, vs))
    vs, es = vs[order].reshape(-1, 2), es[order].reshape(-1, 2)
    keep = es[:, 0] != es[:, 1]
    return vs[keep, 0], es[keep, 0], es[keep, 1]


def find_flippable_cycles(h: Hypergraph, max_steps: int = 1_000_000) -> list[FlippableCycle]:
    """Every flippable cycle of ``h``, exhaustively.

    Tree-like parts of the link graph are pruned first; what is left is
    searched for simple cycles by backtracking.  ``max_steps`` bounds the
    search (branching link components are rare but can blow up).
    """
    verts, ea, eb = _degree_two_links(h)
    alive = np.ones(verts.size, dtype=bool)
    while True:
        nd = np.bincount(np.concatenate([ea[alive], eb[alive]]), minlength=h.m)
        bad = alive & ((nd[ea] < 2) | (nd[eb] < 2))
        if not bad.any():
            break
        alive &= ~bad
    verts, ea, eb = verts[alive].tolist(), ea[alive].tolist(), eb[alive].tolist()
    adj: dict[int, list[tuple[int, int]]] = {}
    for li, (a, b) in enumerate(zip(ea, eb)):
        adj.setdefault(a, []).append((li, b))
        adj.setdefault(b, []).append((li, a))

    cycles: list[FlippableCycle] = []
    seen: set[frozenset] = set()
    done: set[int] = set()
    steps = 0
    for s in sorted(adj):
        path_nodes = [s]
        path_links: list[int] = []
        on_path = {s}
        stack = [iter(adj[s])]
        while stack:
            pushed = False
            for li, w in stack[-1]:
                steps += 1
                if steps > max_steps:
                    raise CapExceeded(f"cycle search exceeded {max_steps} steps")
                if w == s:
                    if path_links and li not in path_links:
                        links = path_links + [li]
                        key = frozenset(links)
                        if key not in seen:
                            seen.add(key)
                            # links[i] joins path_nodes[i] and path_nodes[i+1] (mod t)
                            cyc_v = tuple(verts[x] for x in links)
                            cyc_e = tuple(path_nodes[(i + 1) % len(links)] for i in range(len(links)))
                            t = len(cyc_v)
                            cycles.append(FlippableCycle(cyc_v, tuple(cyc_e[(i - 1) % t] for i in range(t))))
                    continue
                if w in on_path or w in done:
                    continue
                path_nodes.append(w)
                path_links.append(li)
                on_path.add(w)
                stack.append(iter(adj[w]))
                pushed = True
                break
            if not pushed:
                stack.pop()
                on_path.discard(path_nodes.pop())
                if path_links:
                    path_links.pop()
        done.add(s)
    cycles.sort(key=lambda c: (min(c.vertices), len(c), sorted(c.vertices)))
    return cycles


def check_not_core(h: Hypergraph) -> None:
    deg = h.degree
    bad = (deg > 0) & (deg < 2)
    if bad.any():
        raise NotACore(f"vertex {int(np.flatnonzero(bad)[0])} has degree 1")


def find_core_flippable_cycles(core: Hypergraph, max_steps: int = 1_000_000) -> list[FlippableCycle]:
    """Flippable cycles of a 2-core (isolated vertices are ignored).

    Edge ids in the result index ``core.edges``.
    """
    check_not_core(core)
    return find_flippable_cycles(core, max_steps=max_steps)


def is_flippable_cycle(h: Hypergraph, s: Iterable[int]) -> bool:
    """Direct check of the cycle definition, independent of the link-graph search."""
    s = sorted(set(int(v) for v in s))
    if len(s) < 2 or any(h.degree[v] != 2 for v in s):
        return False
    inc = h.incidence
    touching: dict[int, list[int]] = {}
    for v in s:
        if inc[v][0] == inc[v][1]:
            return False
        for e in inc[v]:
            touching.setdefault(e, []).append(v)
    if len(touching) != len(s) or any(len(vs) != 2 for vs in touching.values()):
        return False
    # Vertices and edges alternate; the structure must be one cycle, not several.
    uf = UnionFind(len(s))
    pos = {v: i for i, v in enumerate(s)}
    for a, b in touching.values():
        uf.union(pos[a], pos[b])
    return len({uf.find(i) for i in range(len(s))}) == 1


def _member_mask(h: Hypergraph, s: Iterable[int]) -> np.ndarray:
    mask = np.zeros(h.n, dtype=bool)
    mask[list(s)] = True
    return mask


def is_flippable_set(h: Hypergraph, s: Iterable[int]) -> bool:
    """Every edge holds an even number of members of s (loops count twice)."""
    s = list(s)
    if not s:
        raise EmptySet("a flippable set is nonempty")
    if h.m == 0:
        return True
    counts = _member_mask(h, s)[h.edges].sum(axis=1)
    return bool(np.all(counts % 2 == 0))


def _distinct_hits(h: Hypergraph, mask: np.ndarray) -> np.ndarray:
    if h.m == 0:
        return np.zeros(0, dtype=np.int64)
    srt = np.sort(h.edges, axis=1)
    first = np.ones_like(srt, dtype=bool)
    first[:, 1:] = srt[:, 1:] != srt[:, :-1]
    return (mask[srt] & first).sum(axis=1)


def contains_flippable_cycle(h: Hypergraph, s: Iterable[int]) -> bool:
    """Whether some flippable cycle of ``h`` is a subset of ``s``."""
    mask = _member_mask(h, s)
    verts, ea, eb = _degree_two_links(h)
    keep = mask[verts] if verts.size else np.zeros(0, dtype=bool)
    uf = UnionFind(h.m)
    for a, b in zip(ea[keep].tolist(), eb[keep].tolist()):
        if not uf.union(a, b):
            return True
    return False


@dataclass(frozen=True)
class TwoLinkedPath:
    vertices: tuple[int, ...]    # v_0 .. v_t; v_0 == v_t allowed for t >= 2
    edges: tuple[int, ...]       # e_1 .. e_t


def two_linked_paths(h: Hypergraph, s: Iterable[int]) -> tuple[list[TwoLinkedPath], list[int]]:
    """Maximal 2-linked paths of ``s`` and the edges meeting s twice that lie on none.

    Connecting vertices are members of s of degree 2 whose two edges both
    meet s in exactly two vertices; every path runs between two
    non-connecting members.  Paths are oriented lower endpoint first.
    """
    s = sorted(set(int(v) for v in s))
    mask = _member_mask(h, s)
    hits = _distinct_hits(h, mask)
    simple = np.all(np.sort(h.edges, axis=1)[:, 1:] != np.sort(h.edges, axis=1)[:, :-1], axis=1) \
        if h.m else np.zeros(0, dtype=bool)
    edges = h.edges.tolist()
    two = set(np.flatnonzero((hits == 2) & simple).tolist())
    bad = sorted(np.flatnonzero((hits == 2) & ~simple).tolist())
    inc = h.incidence

    def other_in_s(e: int, v: int) -> int:
        return next(u for u in edges[e] if mask[u] and u != v)

    connector = {v for v in s if len(inc[v]) == 2 and inc[v][0] != inc[v][1]
                 and inc[v][0] in two and inc[v][1] in two}
    assigned: set[int] = set()
    paths: list[TwoLinkedPath] = []
    for e0 in sorted(two):
        if e0 in assigned:
            continue
        a, b = sorted(u for u in set(edges[e0]) if mask[u])
        verts, path_edges = [a, b], [e0]
        closed = False
        # extend forward from b, then backward from a
        for forward in (True, False):
            end = verts[-1] if forward else verts[0]
            last = path_edges[-1] if forward else path_edges[0]
            while end in connector:
                nxt = inc[end][1] if inc[end][0] == last else inc[end][0]
                if nxt == e0 or nxt in path_edges:
                    closed = True
                    break
                end = other_in_s(nxt, end)
                if forward:
                    path_edges.append(nxt)
                    verts.append(end)
                else:
                    path_edges.insert(0, nxt)
                    verts.insert(0, end)
                last = nxt
            if closed:
                break
        assigned.update(path_edges)
        if closed:
            bad.extend(path_edges)
            continue
        if verts[0] > verts[-1]:
            verts.reverse()
            path_edges.reverse()
        paths.append(TwoLinkedPath(tuple(verts), tuple(path_edges)))
    return paths, sorted(set(bad))


def is_linked_set(h: Hypergraph, s: Iterable[int]) -> bool:
    s = sorted(set(int(v) for v in s))
    if not s:
        return True
    mask = _member_mask(h, s)
    if np.any(_distinct_hits(h, mask) == 1):
        return False
    if contains_flippable_cycle(h, s):
        return False
    _, stray = two_linked_paths(h, s)
    return not stray


@dataclass
class GammaStructure:
    vertices: tuple[int, ...]
    edges: list[tuple[int, ...]]          # 2-edges first (one per path), then contracted hyperedges
    paths: list[TwoLinkedPath]
    ell: dict[int, int] = field(default_factory=dict)

    def degree(self, v: int) -> int:
        return sum(e.count(v) for e in self.edges)

    def weight(self) -> int:
        """sum over i of (i-1) * ell_i."""
        return sum((i - 1) * c for i, c in self.ell.items())

    def density_bound_holds(self, k: int) -> bool:
        # (1 + 1/2k)|V| <= weight, compared in integers.
        return 2 * k * self.weight() >= (2 * k + 1) * len(self.vertices)


def build_gamma(h: Hypergraph, s: Iterable[int]) -> GammaStructure:
    """Contract each 2-linked path of s to one edge; cut larger edges down to s."""
    s = sorted(set(int(v) for v in s))
    if not s or not is_linked_set(h, s):
        raise NotLinked("build_gamma needs a nonempty linked set")
    paths, _ = two_linked_paths(h, s)
    mask = _member_mask(h, s)
    connectors = {v for p in paths for v in p.vertices[1:-1]}
    gamma_edges: list[tuple[int, ...]] = [(p.vertices[0], p.vertices[-1]) for p in paths]
    hits = _distinct_hits(h, mask)
    for e in np.flatnonzero(hits > 2).tolist():
        gamma_edges.append(tuple(sorted(u for u in set(h.edges[e].tolist()) if mask[u])))
    ell: dict[int, int] = {i: 0 for i in range(2, h.k + 1)}
    for e in gamma_edges:
        ell[len(e)] += 1
    vertices = tuple(v for v in s if v not in connectors)
    return GammaStructure(vertices=vertices, edges=gamma_edges, paths=paths, ell=ell)


def _compact(core: Hypergraph) -> tuple[np.ndarray, Gf2System]:
    """Non-isolated vertices of ``core`` and the core system over them."""
    labels = np.flatnonzero(core.degree > 0)
    index = np.full(core.n, -1, dtype=np.int64)
    index[labels] = np.arange(labels.size)
    return labels, Gf2System.from_rows(labels.size, index[core.edges].tolist())


def flippable_set_masks(core: Hypergraph, cap: int) -> tuple[np.ndarray, list[int]]:
    """Nonzero kernel vectors of the core system (bits index the returned labels)."""
    labels, sys = _compact(core)
    sols = enumerate_solution_masks(sys, cap)
    return labels, [x for x in sols if x]


def minimal_flippable_sets(core: Hypergraph, cap: int = 1 << 16,
                           max_vertices: int = 24) -> list[frozenset[int]]:
    """All inclusion-minimal flippable sets of a small core, by kernel enumeration."""
    nverts = int(np.count_nonzero(core.degree))
    if nverts > max_vertices:
        raise ValueError(f"core has {nverts} vertices, more than {max_vertices}")
    labels, supports = flippable_set_masks(core, cap)
    supports.sort(key=lambda x: (x.bit_count(), x))
    minimal: list[int] = []
    for x in supports:
        if not any(y & x == y for y in minimal):
            minimal.append(x)
    out = []
    for x in minimal:
        out.append(frozenset(int(labels[i]) for i in range(labels.size) if (x >> i) & 1))
    return out


@dataclass(frozen=True)
class CycleMass:
    cycle_count: int
    total_vertices: int
    disjoint: bool


def cycle_mass_statistic(core: Hypergraph, cycles: list[FlippableCycle] | None = None) -> CycleMass:
    if cycles is None:
        cycles = find_core_flippable_cycles(core)
    seen: set[int] = set()
    disjoint = True
    for c in cycles:
        if seen.intersection(c.vertices):
            disjoint = False
        seen.update(c.vertices)
    return CycleMass(len(cycles), sum(len(c) for c in cycles), disjoint)


def linked_set_examples(count: int, seed: int, ks: tuple[int, ...] = (3, 4),
                        n_range: tuple[int, int] = (8, 16), per_graph: int = 3) -> list[tuple[Hypergraph, frozenset[int]]]:
    """Nonempty linked sets inside small random 2-cores.

    Candidates are flippable sets without a flippable-cycle subset (linked by
    construction) and random subsets that happen to pass :func:`is_linked_set`.
    Every returned hypergraph has minimum degree 2 on its non-isolated vertices.
    """
    rng = make_rng(seed)
    out: list[tuple[Hypergraph, frozenset[int]]] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 200 * count + 1000:
            raise RuntimeError("could not build enough linked sets")
        k = int(rng.choice(ks))
        n = int(rng.integers(n_range[0], n_range[1] + 1))
        m = int(rng.integers(n // 2, n + n // 2 + 1))
        h = gen_hnm(n, min(m, _comb(n, k)), k, rng)
        core, _ = r_core(h, 2)
        verts = np.flatnonzero(core.degree > 0)
        if verts.size == 0:
            continue
        pool: list[frozenset[int]] = []
        try:
            labels, supports = flippable_set_masks(core, 1 << 12)
        except CapExceeded:
            supports, labels = [], verts
        for x in supports[:64]:
            pool.append(frozenset(int(labels[i]) for i in range(labels.size) if (x >> i) & 1))
        for _ in range(32):
            size = int(rng.integers(1, verts.size + 1))
            pool.append(frozenset(rng.choice(verts, size=size, replace=False).tolist()))
        pool.append(frozenset(verts.tolist()))
        taken: set[frozenset[int]] = set()
        for s in pool:
            if s not in taken and is_linked_set(core, s):
                taken.add(s)
                out.append((core, s))
                if len(out) == count or len(taken) == per_graph:
                    break
    return out


def _comb(n: int, k: int) -> int:
    from math import comb
    return comb(n, k)
