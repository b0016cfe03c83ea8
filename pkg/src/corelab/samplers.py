"""Seeded samplers for every graph distribution the experiments use.

All samplers are pure functions of (parameters, stream): a fixed RngStream
reproduces the same graph byte-for-byte, across runs and thread counts.
"""

from __future__ import annotations

import math

import numpy as np

from .graphs import Graph, MultiGraph, k_core
from .rng import RngStream


def _pair_unrank(t: np.ndarray, n: int) -> np.ndarray:
    """Map linear indices over {(u,v): u<v} (ordered by u, then v) to pairs."""
    counts = np.arange(n - 1, 0, -1, dtype=np.int64)
    starts = np.concatenate([[0], np.cumsum(counts)])
    u = np.searchsorted(starts, t, side="right") - 1
    v = t - starts[u] + u + 1
    return np.column_stack([u, v])


def gnp(n: int, p: float, rng: RngStream) -> Graph:
    """Erdos-Renyi G(n, p); each unordered pair is an edge independently.

    For p <= 0.1 the edges are generated by geometric skipping over pair
    indices, so the cost is O(n + expected number of edges).
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must be a probability")
    total = n * (n - 1) // 2
    if p == 0.0 or total == 0:
        return Graph(n, None)
    if p == 1.0:
        return Graph(n, _pair_unrank(np.arange(total, dtype=np.int64), n))
    gen = rng.generator
    if p <= 0.1:
        picks = []
        pos = -1
        log1mp = math.log1p(-p)
        batch = max(64, int(total * p * 1.2) + 16)
        while pos < total:
            u = gen.random(batch)
            gaps = np.floor(np.log(u) / log1mp).astype(np.int64) + 1
            idx = pos + np.cumsum(gaps)
            picks.append(idx)
            pos = int(idx[-1])
        idx = np.concatenate(picks)
        idx = idx[idx < total]
        return Graph(n, _pair_unrank(idx, n))
    hits = []
    for s in range(0, total, 1 << 22):
        e = min(total, s + (1 << 22))
        mask = gen.random(e - s) < p
        hits.append(np.nonzero(mask)[0] + s)
    return Graph(n, _pair_unrank(np.concatenate(hits), n))


def gnm(n: int, m: int, rng: RngStream) -> Graph:
    """Uniform simple graph with exactly m edges (Floyd's subset sampling)."""
    total = n * (n - 1) // 2
    if not 0 <= m <= total:
        raise ValueError("edge count out of range")
    gen = rng.generator
    chosen: set[int] = set()
    for i in range(total - m, total):
        t = int(gen.integers(0, i + 1))
        if t in chosen:
            chosen.add(i)
        else:
            chosen.add(t)
    idx = np.fromiter(chosen, dtype=np.int64, count=m)
    return Graph(n, _pair_unrank(np.sort(idx), n))


def configuration_multigraph(d, rng: RngStream) -> MultiGraph:
    """Configuration model: uniform perfect matching on degree-labelled points.

    The d_v points of each vertex are matched uniformly at random and the
    matching is contracted; loops count 2 toward the degree.
    """
    d = np.asarray(d, dtype=np.int64)
    if d.size and d.min() < 0:
        raise ValueError("degrees must be nonnegative")
    r = int(d.sum())
    if r % 2:
        raise ValueError("degree sum must be even")
    points = np.repeat(np.arange(d.size, dtype=np.int64), d)
    perm = rng.generator.permutation(points)
    return MultiGraph(d.size, perm.reshape(-1, 2))


def uniform_graph_with_degrees(d, rng: RngStream, max_rejections: int = 10_000) -> Graph:
    """Uniform simple graph with degree sequence d, by rejection of non-simple
    configurations. Raises if the rejection cap is exceeded (the sequence is
    not graphical, or its simplicity probability is vanishing)."""
    for _ in range(max_rejections):
        mg = configuration_multigraph(d, rng)
        if mg.is_simple():
            return mg.to_graph()
    raise RuntimeError(f"no simple configuration found in {max_rejections} attempts")


def sample_core(n: int, lambda_edge: float, k: int, rng: RngStream):
    """Draw G ~ G(n, lambda_edge/n) and return its k-core.

    Returns (core, V, m_core) with V the core's vertex ids in the host graph.
    Conditioned on (V, m_core), the core is uniform over graphs on V with
    m_core edges and minimum degree >= k, so this is an exact sampler for that
    conditional family. The core may be empty.
    """
    if lambda_edge < 0:
        raise ValueError("edge density must be nonnegative")
    G = gnp(n, min(1.0, lambda_edge / n), rng)
    V, core = k_core(G, k)
    return core, V, core.m


def truncated_poisson_degrees(n: int, m: int, k: int, rng: RngStream,
                              max_retries: int = 1_000_000) -> np.ndarray:
    """Approximate core-like degree sequence: n i.i.d. draws from the
    k-truncated Poisson law with mean 2m/n, adjusted to sum exactly to 2m.

    The adjustment resamples single entries, keeping a draw only when it moves
    the sum toward the target, so the result is a documented approximation of
    the exact conditional law (adequate for large-scale scaling runs only).
    """
    if m < k * n / 2:
        raise ValueError("need m >= k*n/2")
    from .theory import TruncPoisson, solve_lambda

    c = 2 * m / n
    if c <= k:
        raise ValueError("mean degree must exceed k")
    tp = TruncPoisson(k, solve_lambda(k, c))
    vals, pmf = tp.support()
    gen = rng.generator
    d = gen.choice(vals, size=n, p=pmf)
    target = 2 * m
    cur = int(d.sum())
    for _ in range(max_retries):
        if cur == target:
            return d.astype(np.int64)
        i = int(gen.integers(0, n))
        new = int(gen.choice(vals, p=pmf))
        cand = cur - int(d[i]) + new
        if abs(cand - target) <= abs(cur - target):
            d[i] = new
            cur = cand
    raise RuntimeError("degree-sum adjustment did not converge")
