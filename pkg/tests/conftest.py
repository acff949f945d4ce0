"""
Shared fixtures: seeded generators and small random graphs.
"""

import numpy as np
import pytest

from digft import Graph


def random_adjacency(rng: np.random.Generator, n: int, p: float = 0.4, weights: str = "nonnegative") -> np.ndarray:
    """Random directed adjacency without self-loops."""
    mask = rng.random((n, n)) < p
    np.fill_diagonal(mask, False)
    if weights == "nonnegative":
        values = rng.uniform(0.2, 2.0, (n, n))
    elif weights == "indefinite":
        values = rng.uniform(0.2, 2.0, (n, n)) * rng.choice([-1.0, 1.0], (n, n))
    elif weights == "complex":
        values = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    elif weights == "symmetric":
        values = rng.uniform(0.2, 2.0, (n, n))
        upper = np.triu(mask, 1)
        adj = np.where(upper, values, 0.0)
        return adj + adj.T
    else:
        raise ValueError(weights)
    return np.where(mask, values, 0.0)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)


@pytest.fixture
def make_graph(rng):
    """Factory: make_graph(n, weights='nonnegative'|'indefinite'|'complex'|'symmetric', p=0.4)."""

    def _make(n: int = 6, weights: str = "nonnegative", p: float = 0.4) -> Graph:
        return Graph.from_matrix(random_adjacency(rng, n, p, weights), name=f"{weights}-{n}")

    return _make


@pytest.fixture
def two_node_directed() -> Graph:
    """A_12 = 1, no other edges."""
    return Graph.from_matrix([[0, 1], [0, 0]], name="edge")


@pytest.fixture
def path3() -> Graph:
    """Directed path 0 -> 1 -> 2 with unit weights."""
    return Graph.from_matrix([[0, 1, 0], [0, 0, 1], [0, 0, 0]], name="path3")
