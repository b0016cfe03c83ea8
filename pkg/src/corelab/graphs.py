"""Simple undirected graphs: CSR adjacency, k-core peeling, subgraph and distance ops.

Vertices are 0..n-1. Graphs are immutable after construction; subgraph
operations return new graphs plus an id map back to the host graph, so
seeded experiments replay deterministically.
"""

from __future__ import annotations

from collections import deque

import numpy as np


class Graph:
    """Immutable simple undirected graph with sorted CSR adjacency.

    Invariants enforced at construction: no loops, no parallel edges,
    adjacency symmetric, sum of degrees equal to 2m.
    """

    __slots__ = ("n", "m", "indptr", "indices")

    def __init__(self, n: int, edges=None):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        self.n = int(n)
        e = _as_edge_array(edges)
        if e.size:
            if e.min() < 0 or e.max() >= n:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] == e[:, 1]):
                raise ValueError("self-loops not allowed")
        u = np.concatenate([e[:, 0], e[:, 1]])
        v = np.concatenate([e[:, 1], e[:, 0]])
        order = np.lexsort((v, u))
        u, v = u[order], v[order]
        if u.size:
            dup = (u[1:] == u[:-1]) & (v[1:] == v[:-1])
            if np.any(dup):
                raise ValueError("duplicate edges not allowed")
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(u, minlength=n), out=self.indptr[1:])
        self.indices = v.astype(np.int64)
        self.m = e.shape[0]
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)

    @classmethod
    def _from_csr(cls, n: int, m: int, indptr: np.ndarray, indices: np.ndarray) -> "Graph":
        g = object.__new__(cls)
        g.n, g.m = int(n), int(m)
        g.indptr, g.indices = indptr, indices
        g.indptr.setflags(write=False)
        g.indices.setflags(write=False)
        return g

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return i < row.size and row[i] == v

    def edge_array(self) -> np.ndarray:
        """All edges as an (m, 2) array with u < v, lexicographically sorted."""
        u = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees())
        v = self.indices
        keep = u < v
        return np.column_stack([u[keep], v[keep]])

    def adjacency_dense(self) -> np.ndarray:
        """Dense 0/1 adjacency matrix (int64)."""
        a = np.zeros((self.n, self.n), dtype=np.int64)
        e = self.edge_array()
        a[e[:, 0], e[:, 1]] = 1
        a[e[:, 1], e[:, 0]] = 1
        return a

    def __eq__(self, other) -> bool:
        return (isinstance(other, Graph) and self.n == other.n
                and np.array_equal(self.indptr, other.indptr)
                and np.array_equal(self.indices, other.indices))

    def __hash__(self):
        return hash((self.n, self.m, self.indices.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


class MultiGraph:
    """Multigraph over unordered vertex pairs; loops and parallel edges allowed.

    A loop contributes 2 to the degree of its vertex.
    """

    __slots__ = ("n", "edges")

    def __init__(self, n: int, edges):
        self.n = int(n)
        e = _as_edge_array(edges)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        self.edges = np.column_stack([lo, hi])

    def degrees(self) -> np.ndarray:
        d = np.bincount(self.edges[:, 0], minlength=self.n)
        d += np.bincount(self.edges[:, 1], minlength=self.n)
        return d

    def is_simple(self) -> bool:
        e = self.edges
        if np.any(e[:, 0] == e[:, 1]):
            return False
        ids = e[:, 0] * self.n + e[:, 1]
        return np.unique(ids).size == ids.size

    def to_graph(self) -> Graph:
        if not self.is_simple():
            raise ValueError("multigraph has loops or parallel edges")
        return Graph(self.n, self.edges)


def _as_edge_array(edges) -> np.ndarray:
    if edges is None:
        return np.empty((0, 2), dtype=np.int64)
    e = np.asarray(edges, dtype=np.int64)
    if e.size == 0:
        return np.empty((0, 2), dtype=np.int64)
    if e.ndim != 2 or e.shape[1] != 2:
        raise ValueError("edges must be an iterable of (u, v) pairs")
    return e


def _as_vertex_array(U, n: int | None = None) -> np.ndarray:
    u = np.unique(np.asarray(list(U) if not isinstance(U, np.ndarray) else U, dtype=np.int64))
    if n is not None and u.size and (u[0] < 0 or u[-1] >= n):
        raise ValueError("vertex id out of range")
    return u


def _member_mask(n: int, U) -> np.ndarray:
    mask = np.zeros(n, dtype=bool)
    mask[_as_vertex_array(U, n)] = True
    return mask


def k_core(G: Graph, k: int) -> tuple[np.ndarray, Graph]:
    """Peel vertices of degree < k until none remain.

    Returns (U, H): the retained vertex ids (sorted, in G's labelling) and the
    induced subgraph relabelled 0..|U|-1. The result is the unique maximal
    induced subgraph with minimum degree >= k; an empty core is valid.

    Cascade peeling touches each edge O(1) times, so the whole call is O(n + m).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    deg = G.degrees().copy()
    alive = np.ones(G.n, dtype=bool)
    stack = list(np.nonzero(deg < k)[0])
    alive[deg < k] = False
    indptr, indices = G.indptr, G.indices
    while stack:
        v = stack.pop()
        for u in indices[indptr[v]:indptr[v + 1]]:
            if alive[u]:
                deg[u] -= 1
                if deg[u] < k:
                    alive[u] = False
                    stack.append(int(u))
    U = np.nonzero(alive)[0]
    H, _ = induced_subgraph(G, U)
    return U, H


def induced_subgraph(G: Graph, U) -> tuple[Graph, np.ndarray]:
    """Induce on U, relabelling vertices 0..|U|-1.

    Returns (H, ids) where ids[new] = old, so pipeline stages can recover
    host-graph vertex ids.
    """
    ids = _as_vertex_array(U, G.n)
    pos = np.full(G.n, -1, dtype=np.int64)
    pos[ids] = np.arange(ids.size)
    e = G.edge_array()
    if e.size:
        keep = (pos[e[:, 0]] >= 0) & (pos[e[:, 1]] >= 0)
        e = np.column_stack([pos[e[keep, 0]], pos[e[keep, 1]]])
    H = Graph(ids.size, e)
    return H, ids


def deg_into(G: Graph, v: int, S) -> int:
    """Number of neighbors of v inside S."""
    mask = _member_mask(G.n, S)
    return int(mask[G.neighbors(v)].sum())


def ordered_edge_count(G: Graph, S, T) -> int:
    """Count ordered pairs (x, y) in S x T with xy an edge.

    Edges with both ends in the intersection are counted twice.
    """
    maskT = _member_mask(G.n, T)
    total = 0
    for x in _as_vertex_array(S, G.n):
        total += int(maskT[G.neighbors(x)].sum())
    return total


def within_distance(G: Graph, sources, r: int) -> np.ndarray:
    """BFS ball of radius r around the source set (sources included)."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    seen = _member_mask(G.n, sources)
    frontier = np.nonzero(seen)[0]
    for _ in range(r):
        if frontier.size == 0:
            break
        nxt = []
        for v in frontier:
            for u in G.neighbors(v):
                if not seen[u]:
                    seen[u] = True
                    nxt.append(int(u))
        frontier = np.array(nxt, dtype=np.int64)
    return np.nonzero(seen)[0]


def odd_degree_vertices(G: Graph) -> np.ndarray:
    """Vertices of odd degree; the count is always even by the handshake lemma."""
    return np.nonzero(G.degrees() % 2 == 1)[0]


def bfs_distances(G: Graph, source: int, cutoff: int | None = None) -> np.ndarray:
    """Distances from source (-1 where unreached); stops beyond cutoff."""
    dist = np.full(G.n, -1, dtype=np.int64)
    dist[source] = 0
    q = deque([source])
    while q:
        v = q.popleft()
        if cutoff is not None and dist[v] >= cutoff:
            continue
        for u in G.neighbors(v):
            if dist[u] < 0:
                dist[u] = dist[v] + 1
                q.append(int(u))
    return dist


def write_edgelist(G: Graph, path) -> None:
    """Write the bit-exact text format: "n m" then one "u v" line per edge (u < v)."""
    with open(path, "w", newline="\n") as f:
        f.write(f"{G.n} {G.m}\n")
        for u, v in G.edge_array():
            f.write(f"{u} {v}\n")


def read_edgelist(path) -> Graph:
    """Read the edge-list format, rejecting loops, duplicates and bad ids."""
    with open(path) as f:
        header = f.readline().split()
        if len(header) != 2:
            raise ValueError("edge list header must be 'n m'")
        n, m = int(header[0]), int(header[1])
        edges = np.empty((m, 2), dtype=np.int64)
        for i in range(m):
            parts = f.readline().split()
            if len(parts) != 2:
                raise ValueError(f"edge line {i + 2}: expected 'u v'")
            u, v = int(parts[0]), int(parts[1])
            if not u < v:
                raise ValueError(f"edge line {i + 2}: require u < v")
            edges[i] = (u, v)
    return Graph(n, edges)
