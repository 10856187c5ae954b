"""Linear algebra over GF(2) with rows packed into Python ints.

Bit ``j`` of a row mask is variable ``j``.  Every equation has right-hand
side 0, so "solving" a system means describing its kernel.  Assignments are
exchanged with callers as ``numpy.uint8`` arrays of 0/1 values.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class CapExceeded(RuntimeError):
    """Raised when an enumeration would produce more items than allowed."""


class LengthMismatch(ValueError):
    """Raised when an assignment does not have one bit per variable."""


def canonical_row(indices: Iterable[int]) -> tuple[int, ...]:
    """Sorted tuple of the indices that occur an odd number of times.

    A variable repeated inside one equation cancels in pairs, which is what
    configuration-model loops need.
    """
    counts = Counter(int(i) for i in indices)
    return tuple(sorted(v for v, c in counts.items() if c % 2))


@dataclass(frozen=True)
class Gf2System:
    """Homogeneous system ``A x = 0``; ``rows[i]`` lists the variables of equation i."""

    n: int
    rows: tuple[tuple[int, ...], ...]

    @classmethod
    def from_rows(cls, n: int, rows: Iterable[Iterable[int]]) -> "Gf2System":
        canon = tuple(canonical_row(r) for r in rows)
        for r in canon:
            if r and (r[0] < 0 or r[-1] >= n):
                raise ValueError(f"row {r} has an index outside 0..{n - 1}")
        return cls(n=int(n), rows=canon)

    @classmethod
    def from_hypergraph(cls, h) -> "Gf2System":
        return cls.from_rows(h.n, h.edges.tolist())

    @property
    def m(self) -> int:
        return len(self.rows)

    def row_masks(self) -> list[int]:
        masks = []
        for r in self.rows:
            mask = 0
            for v in r:
                mask |= 1 << v
            masks.append(mask)
        return masks


def to_mask(x: Sequence[int]) -> int:
    bits = np.asarray(x, dtype=np.uint8) & 1
    return int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little")


def from_mask(mask: int, n: int) -> np.ndarray:
    raw = np.frombuffer(mask.to_bytes((n + 7) // 8, "little"), dtype=np.uint8)
    return np.unpackbits(raw, bitorder="little")[:n].copy()


def _echelon(sys: Gf2System) -> dict[int, int]:
    """Reduce rows so each kept row's pivot is its lowest set bit.

    Returns ``{pivot column: row mask}``.  Rows are inserted in order and
    reduced against earlier pivots, so the result is deterministic.
    """
    pivots: dict[int, int] = {}
    for row in sys.row_masks():
        while row:
            col = (row & -row).bit_length() - 1
            prow = pivots.get(col)
            if prow is None:
                pivots[col] = row
                break
            row ^= prow
    return pivots


def _kernel_masks(n: int, pivots: dict[int, int]) -> tuple[list[int], list[int]]:
    """Free columns (ascending) and one kernel vector per free column."""
    free = [c for c in range(n) if c not in pivots]
    # A pivot row only has bits above its pivot, so resolve pivots top-down.
    order = sorted(pivots, reverse=True)
    basis = []
    for f in free:
        x = 1 << f
        for c in order:
            row = pivots[c]
            if (row & x).bit_count() & 1:
                x |= 1 << c
        basis.append(x)
    return free, basis


def rank_and_kernel(sys: Gf2System) -> tuple[int, list[np.ndarray]]:
    """Rank of the system and a basis of its solution space.

    The basis vector for free column ``f`` has a 1 at ``f`` and 0 at every
    other free column.
    """
    pivots = _echelon(sys)
    _, basis = _kernel_masks(sys.n, pivots)
    return len(pivots), [from_mask(b, sys.n) for b in basis]


def rank(sys: Gf2System) -> int:
    return len(_echelon(sys))


def kernel_masks(sys: Gf2System) -> tuple[int, list[int], list[int]]:
    """Like :func:`rank_and_kernel` but returns free columns and int masks."""
    pivots = _echelon(sys)
    free, basis = _kernel_masks(sys.n, pivots)
    return len(pivots), free, basis


def enumerate_solution_masks(sys: Gf2System, cap: int) -> list[int]:
    r, _, basis = kernel_masks(sys)
    dim = sys.n - r
    if dim >= 63 or (1 << dim) > cap:
        raise CapExceeded(f"2^{dim} solutions exceed cap {cap}")
    out = []
    # Lexicographic over the free coordinates, lowest free column most significant.
    for idx in range(1 << dim):
        x = 0
        for j, b in enumerate(basis):
            if (idx >> (dim - 1 - j)) & 1:
                x ^= b
        out.append(x)
    return out


def enumerate_solutions(sys: Gf2System, cap: int) -> list[np.ndarray]:
    """All solutions of ``sys``, each exactly once, in a fixed order."""
    return [from_mask(x, sys.n) for x in enumerate_solution_masks(sys, cap)]


def is_solution(sys: Gf2System, x: Sequence[int]) -> bool:
    x = np.asarray(x, dtype=np.uint8)
    if x.shape != (sys.n,):
        raise LengthMismatch(f"assignment has length {x.size}, system has {sys.n} variables")
    for row in sys.rows:
        if int(x[list(row)].sum()) & 1:
            return False
    return True


def random_solution(sys: Gf2System, rng: np.random.Generator) -> np.ndarray:
    """Uniform random solution: a random combination of the kernel basis."""
    _, _, basis = kernel_masks(sys)
    x = 0
    coins = rng.integers(0, 2, size=len(basis))
    for b, coin in zip(basis, coins):
        if coin:
            x ^= b
    return from_mask(x, sys.n)
