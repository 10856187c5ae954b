"""k-uniform hypergraphs: random generators, components, instance files.

Every generator takes an integer seed and draws from numpy's Philox
(counter-based, 64-bit) bit generator, so a seed determines the output on
every platform.  Vertices are 0-based in memory and 1-based on disk.
"""

from __future__ import annotations

import io
import itertools
import math
import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np


class TooManyEdges(ValueError):
    pass


class NonDivisibleTotalDegree(ValueError):
    pass


class InstanceFormatError(ValueError):
    pass


def make_rng(seed: int | np.random.Generator) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.Philox(int(seed)))


@dataclass(frozen=True, eq=False)
class Hypergraph:
    """A k-uniform multi-hypergraph on vertices ``0..n-1``.

    ``edges`` is an ``(m, k)`` int64 array; a row may repeat a vertex (a loop)
    and rows may repeat (multi-edges).  Degrees count incidences with
    multiplicity, so ``degree.sum() == k * m`` always holds.
    """

    n: int
    k: int
    edges: np.ndarray

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=np.int64)
        if edges.size == 0:
            edges = edges.reshape(0, self.k)
        if edges.ndim != 2 or edges.shape[1] != self.k:
            raise ValueError(f"edges must have shape (m, {self.k}), got {edges.shape}")
        if edges.size and (edges.min() < 0 or edges.max() >= self.n):
            raise ValueError("edge refers to a vertex outside 0..n-1")
        edges.setflags(write=False)
        object.__setattr__(self, "edges", edges)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], k: int | None = None) -> "Hypergraph":
        rows = [list(e) for e in edges]
        if k is None:
            if not rows:
                raise ValueError("k is required for an edgeless hypergraph")
            k = len(rows[0])
        return cls(n=n, k=k, edges=np.array(rows, dtype=np.int64).reshape(len(rows), k))

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @cached_property
    def degree(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        deg.setflags(write=False)
        return deg

    @cached_property
    def incidence(self) -> list[list[int]]:
        """``incidence[v]`` lists edge ids containing v, once per occurrence."""
        inc: list[list[int]] = [[] for _ in range(self.n)]
        for eid, row in enumerate(self.edges.tolist()):
            for v in row:
                inc[v].append(eid)
        return inc

    def edge_list(self) -> list[tuple[int, ...]]:
        return [tuple(r) for r in self.edges.tolist()]

    def is_simple(self) -> bool:
        """No loops and no repeated edges."""
        if self.m == 0:
            return True
        srt = np.sort(self.edges, axis=1)
        if self.k > 1 and np.any(srt[:, 1:] == srt[:, :-1]):
            return False
        return np.unique(srt, axis=0).shape[0] == self.m

    def induced(self, keep: np.ndarray) -> "Hypergraph":
        """Edges lying entirely inside the boolean vertex mask ``keep``; n is unchanged."""
        keep = np.asarray(keep, dtype=bool)
        rows = keep[self.edges].all(axis=1) if self.m else np.zeros(0, dtype=bool)
        return Hypergraph(self.n, self.k, self.edges[rows])

    def __repr__(self) -> str:
        return f"Hypergraph(n={self.n}, k={self.k}, m={self.m})"


# ---------------------------------------------------------------- generators


def _sample_distinct_edges(n: int, m: int, k: int, rng: np.random.Generator) -> np.ndarray:
    total = math.comb(n, k)
    if m > total:
        raise TooManyEdges(f"m={m} exceeds C({n},{k})={total}")
    if m == 0:
        return np.zeros((0, k), dtype=np.int64)
    if total <= 2_000_000:
        pick = rng.choice(total, size=m, replace=False)
        allc = np.array(list(itertools.combinations(range(n), k)), dtype=np.int64)
        return allc[pick]

    # Sequential rejection: keep the first occurrence of each distinct k-set,
    # which is exactly sampling m of them without replacement.
    keyable = n ** k < 2**62
    kept = np.zeros((0, k), dtype=np.int64)
    keys = np.zeros(0, dtype=np.int64)
    seen: set[tuple[int, ...]] = set()
    while kept.shape[0] < m:
        need = m - kept.shape[0]
        batch = rng.integers(0, n, size=(int(need * 1.05) + 64, k), dtype=np.int64)
        batch.sort(axis=1)
        ok = np.all(batch[:, 1:] != batch[:, :-1], axis=1)
        batch = batch[ok]
        if keyable:
            bkeys = np.zeros(batch.shape[0], dtype=np.int64)
            for j in range(k):
                bkeys = bkeys * n + batch[:, j]
            allkeys = np.concatenate([keys, bkeys])
            _, first = np.unique(allkeys, return_index=True)
            first.sort()
            first = first[:m]
            rows = np.concatenate([kept, batch])[first]
            kept, keys = rows, allkeys[first]
        else:
            fresh = []
            for row in map(tuple, batch.tolist()):
                if row not in seen:
                    seen.add(row)
                    fresh.append(row)
                    if kept.shape[0] + len(fresh) == m:
                        break
            if fresh:
                kept = np.concatenate([kept, np.array(fresh, dtype=np.int64)])
    return kept[:m]


def gen_hnm(n: int, m: int, k: int, seed) -> Hypergraph:
    """Uniform k-uniform hypergraph with exactly ``m`` distinct simple edges."""
    if k < 2:
        raise ValueError("k must be at least 2")
    rng = make_rng(seed)
    return Hypergraph(n, k, _sample_distinct_edges(n, m, k, rng))


def gen_hnp(n: int, c: float, k: int, seed) -> Hypergraph:
    """Each k-set is an edge independently with probability ``min(1, c / n**(k-1))``.

    Sampled as a Binomial edge count followed by that many distinct uniform
    edges, which has the same law as independent coin flips.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    rng = make_rng(seed)
    p = min(1.0, c / float(n) ** (k - 1))
    total = math.comb(n, k)
    if total < 2**62:
        m = int(rng.binomial(total, p))
    else:
        m = int(rng.poisson(total * p))
    return Hypergraph(n, k, _sample_distinct_edges(n, min(m, total), k, rng))


def gen_configuration(deg: Sequence[int], k: int, seed, simple: bool = False,
                      max_tries: int = 100_000) -> Hypergraph:
    """Configuration model: a uniform partition of vertex-copies into k-sets.

    Loops and multi-edges are kept unless ``simple`` is set, in which case
    the whole partition is redrawn until it is simple.
    """
    deg = np.asarray(deg, dtype=np.int64)
    if np.any(deg < 0):
        raise ValueError("degrees must be nonnegative")
    total = int(deg.sum())
    if total % k:
        raise NonDivisibleTotalDegree(f"total degree {total} is not divisible by k={k}")
    rng = make_rng(seed)
    stubs = np.repeat(np.arange(deg.size, dtype=np.int64), deg)
    for _ in range(max_tries):
        edges = rng.permutation(stubs).reshape(-1, k)
        edges.sort(axis=1)
        h = Hypergraph(deg.size, k, edges)
        if not simple or h.is_simple():
            return h
    raise RuntimeError(f"no simple configuration found in {max_tries} tries")


# ---------------------------------------------------------------- components


class UnionFind:
    def __init__(self, size: int):
        self.parent = list(range(size))
        self.size = [1] * size

    def find(self, a: int) -> int:
        parent = self.parent
        root = a
        while parent[root] != root:
            root = parent[root]
        while parent[a] != root:
            parent[a], a = root, parent[a]
        return root

    def union(self, a: int, b: int) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        return True


def component_labels(h: Hypergraph, vertices: np.ndarray | None = None) -> np.ndarray:
    """Component id per vertex (ids ordered by smallest member).

    With a boolean ``vertices`` mask, only edges inside the mask are used and
    vertices outside it get label -1.
    """
    uf = UnionFind(h.n)
    edges = h.edges if vertices is None else h.induced(vertices).edges
    for row in edges.tolist():
        a = row[0]
        for b in row[1:]:
            uf.union(a, b)
    labels = np.full(h.n, -1, dtype=np.int64)
    ids: dict[int, int] = {}
    for v in range(h.n):
        if vertices is not None and not vertices[v]:
            continue
        root = uf.find(v)
        labels[v] = ids.setdefault(root, len(ids))
    return labels


def components(h: Hypergraph, vertices: np.ndarray | None = None) -> list[list[int]]:
    labels = component_labels(h, vertices)
    groups: list[list[int]] = [[] for _ in range(int(labels.max()) + 1 if labels.size else 0)]
    for v, lab in enumerate(labels.tolist()):
        if lab >= 0:
            groups[lab].append(v)
    return groups


def max_component_size(h: Hypergraph, vertices: np.ndarray | None = None) -> int:
    labels = component_labels(h, vertices)
    labels = labels[labels >= 0]
    return int(np.bincount(labels).max()) if labels.size else 0


def tree_component_max_degree(h: Hypergraph) -> int:
    """Largest vertex degree inside an acyclic component (0 if there is none).

    A component is acyclic when all its edges have k distinct vertices and
    ``sum(k - 1 over its edges) == |vertices| - 1``.  Isolated vertices are
    trees of degree 0.
    """
    labels = component_labels(h)
    ncomp = int(labels.max()) + 1 if h.n else 0
    nverts = np.bincount(labels, minlength=ncomp)
    slack = np.zeros(ncomp, dtype=np.int64)
    loopy = np.zeros(ncomp, dtype=bool)
    if h.m:
        elab = labels[h.edges[:, 0]]
        srt = np.sort(h.edges, axis=1)
        distinct = 1 + np.count_nonzero(srt[:, 1:] != srt[:, :-1], axis=1)
        slack = np.bincount(elab, weights=distinct - 1, minlength=ncomp).astype(np.int64)
        loopy = np.bincount(elab, weights=(distinct < h.k), minlength=ncomp) > 0
    is_tree = (slack == nverts - 1) & ~loopy
    if not is_tree.any():
        return 0
    in_tree = is_tree[labels]
    return int(h.degree[in_tree].max())


# ---------------------------------------------------------------- file format


def write_instance(h: Hypergraph, dest: str | os.PathLike | TextIO,
                   comments: Sequence[str] = ()) -> None:
    """Write the ``p xnf <n> <m> <k>`` text format (1-based, each line ends in 0)."""
    buf = io.StringIO()
    for line in comments:
        buf.write(f"c {line}\n")
    buf.write(f"p xnf {h.n} {h.m} {h.k}\n")
    for row in h.edges.tolist():
        buf.write(" ".join(str(v + 1) for v in row) + " 0\n")
    text = buf.getvalue()
    if hasattr(dest, "write"):
        dest.write(text)
    else:
        with open(dest, "w") as fh:
            fh.write(text)


def parse_instance(text: str) -> Hypergraph:
    header = None
    rows: list[list[int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 5 or parts[1] != "xnf" or header is not None:
                raise InstanceFormatError(f"line {lineno}: bad header {line!r}")
            header = tuple(int(x) for x in parts[2:])
            continue
        if header is None:
            raise InstanceFormatError(f"line {lineno}: edge before header")
        vals = [int(x) for x in line.split()]
        n, _, k = header
        if len(vals) != k + 1 or vals[-1] != 0:
            raise InstanceFormatError(f"line {lineno}: expected {k} indices and a trailing 0")
        if any(v < 1 or v > n for v in vals[:-1]):
            raise InstanceFormatError(f"line {lineno}: vertex index out of range 1..{n}")
        rows.append([v - 1 for v in vals[:-1]])
    if header is None:
        raise InstanceFormatError("missing 'p xnf' header")
    n, m, k = header
    if len(rows) != m:
        raise InstanceFormatError(f"header says {m} edges, found {len(rows)}")
    return Hypergraph(n, k, np.array(rows, dtype=np.int64).reshape(m, k))


def read_instance(src: str | os.PathLike | TextIO) -> Hypergraph:
    if hasattr(src, "read"):
        return parse_instance(src.read())
    with open(src) as fh:
        return parse_instance(fh.read())
