import numpy as np
import pytest

from xorsat_geometry.hypergraph import Hypergraph

# Three triples over v1=0, v2=1, v3=2 sharing a=3.
TRIANGLE_EDGES = [(2, 0, 3), (0, 1, 3), (1, 2, 3)]


def triangle_hub() -> Hypergraph:
    return Hypergraph.from_edges(4, TRIANGLE_EDGES)


def two_triangle_hubs() -> Hypergraph:
    return Hypergraph.from_edges(8, TRIANGLE_EDGES + [tuple(v + 4 for v in e) for e in TRIANGLE_EDGES])


@pytest.fixture
def hub() -> Hypergraph:
    return triangle_hub()


@pytest.fixture
def path3() -> Hypergraph:
    return Hypergraph.from_edges(3, [(0, 1), (1, 2)])


def bits(s: str) -> np.ndarray:
    return np.array([int(ch) for ch in s], dtype=np.uint8)
