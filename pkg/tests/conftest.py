"""Shared test oracles: naive reference implementations kept deliberately
independent of the library code paths they check."""

from __future__ import annotations

import numpy as np
import pytest

from corelab.graphs import Graph


def random_symmetric_01(gen: np.random.Generator, n: int, density: float = 0.5) -> np.ndarray:
    a = (gen.random((n, n)) < density).astype(np.int64)
    a = np.triu(a, 1)
    return a + a.T


def random_simple_graph(gen: np.random.Generator, n: int, p: float) -> Graph:
    mask = gen.random((n, n)) < p
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if mask[i, j]]
    return Graph(n, edges)


def naive_gf2_rank(a: np.ndarray) -> int:
    """Single-bit elimination over uint8 entries; the reference for the
    bit-packed path."""
    m = (np.asarray(a, dtype=np.uint8) % 2).copy()
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        piv = None
        for r in range(rank, rows):
            if m[r, c]:
                piv = r
                break
        if piv is None:
            continue
        m[[rank, piv]] = m[[piv, rank]]
        for r in range(rows):
            if r != rank and m[r, c]:
                m[r] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def peel_random_order(G: Graph, k: int, gen: np.random.Generator) -> list[int]:
    """Order-randomized peeling; k_core must be order-independent."""
    alive = set(range(G.n))
    changed = True
    while changed:
        changed = False
        for v in gen.permutation(sorted(alive)):
            v = int(v)
            if v in alive and sum(1 for u in G.neighbors(v) if int(u) in alive) < k:
                alive.remove(v)
                changed = True
    return sorted(alive)


@pytest.fixture
def gen():
    return np.random.default_rng(20240817)
