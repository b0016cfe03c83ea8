import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corelab.graphs import (Graph, MultiGraph, deg_into, induced_subgraph, k_core,
                            odd_degree_vertices, ordered_edge_count, read_edgelist,
                            within_distance, write_edgelist)
from conftest import peel_random_order, random_simple_graph


def K4():
    return Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


def path(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


class TestConstruction:
    def test_rejects_loops(self):
        with pytest.raises(ValueError):
            Graph(3, [(0, 0)])

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError):
            Graph(3, [(0, 1), (1, 0)])

    def test_rejects_out_of_range(self):
        with pytest.raises(ValueError):
            Graph(3, [(0, 3)])

    def test_handshake(self, gen):
        for _ in range(20):
            G = random_simple_graph(gen, int(gen.integers(1, 40)), 0.2)
            assert G.degrees().sum() == 2 * G.m

    def test_neighbors_sorted_symmetric(self, gen):
        G = random_simple_graph(gen, 30, 0.2)
        for v in range(G.n):
            nb = G.neighbors(v)
            assert np.all(np.diff(nb) > 0)
            for u in nb:
                assert v in G.neighbors(int(u))


class TestKCore:
    def test_triangle_k3_empty(self):
        U, H = k_core(Graph(3, [(0, 1), (1, 2), (0, 2)]), 3)
        assert U.size == 0 and H.n == 0

    def test_k4_k3_is_k4(self):
        U, H = k_core(K4(), 3)
        assert list(U) == [0, 1, 2, 3] and H.m == 6

    def test_path_cascades_cycle_stays(self):
        U, _ = k_core(path(5), 2)
        assert U.size == 0
        U, H = k_core(cycle(5), 2)
        assert U.size == 5 and H.m == 5

    def test_idempotent(self, gen):
        for _ in range(10):
            G = random_simple_graph(gen, 60, 0.08)
            _, H = k_core(G, 3)
            U2, H2 = k_core(H, 3)
            assert H2.n == H.n and H2.m == H.m

    def test_order_independence(self, gen):
        # >= 100 random peeling orders across random graphs
        total_orders = 0
        while total_orders < 120:
            n = int(gen.integers(10, 200))
            G = random_simple_graph(gen, n, 3.0 / n)
            U, _ = k_core(G, 2)
            for _ in range(12):
                assert peel_random_order(G, 2, gen) == list(U)
                total_orders += 1

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError):
            k_core(K4(), 0)


class TestSubgraphOps:
    def test_induced_empty_and_full(self):
        G = K4()
        H, ids = induced_subgraph(G, [])
        assert H.n == 0 and H.m == 0 and ids.size == 0
        H, ids = induced_subgraph(G, range(4))
        assert H == G and list(ids) == [0, 1, 2, 3]

    def test_induced_triangle(self):
        H, ids = induced_subgraph(K4(), [0, 1, 2])
        assert H.n == 3 and H.m == 3

    def test_id_map_recovers_host(self, gen):
        G = random_simple_graph(gen, 40, 0.15)
        U = np.sort(gen.permutation(40)[:17])
        H, ids = induced_subgraph(G, U)
        for a, b in H.edge_array():
            assert G.has_edge(int(ids[a]), int(ids[b]))
        assert G.degrees()[ids].sum() >= H.degrees().sum()

    def test_deg_into(self):
        G = K4()
        assert deg_into(G, 0, []) == 0
        assert deg_into(G, 0, [1, 2, 3]) == 3
        assert deg_into(cycle(5), 0, [1]) == 1

    def test_ordered_edge_count(self):
        assert ordered_edge_count(K4(), range(4), range(4)) == 12
        C4 = cycle(4)
        assert ordered_edge_count(C4, [0, 1], [2, 3]) == 2
        assert ordered_edge_count(C4, [], range(4)) == 0

    def test_ordered_edge_count_self(self, gen):
        G = random_simple_graph(gen, 30, 0.2)
        S = list(gen.permutation(30)[:12])
        H, _ = induced_subgraph(G, S)
        assert ordered_edge_count(G, S, S) == 2 * H.m


class TestDistanceAndParity:
    def test_within_distance_examples(self):
        assert list(within_distance(K4(), [0], 0)) == [0]
        assert list(within_distance(path(5), [0], 2)) == [0, 1, 2]
        G = Graph(4, [(0, 1)])
        assert list(within_distance(G, [3], 10)) == [3]

    def test_odd_degree(self):
        assert list(odd_degree_vertices(K4())) == [0, 1, 2, 3]
        assert odd_degree_vertices(cycle(5)).size == 0
        assert list(odd_degree_vertices(Graph(2, [(0, 1)]))) == [0, 1]

    def test_odd_count_even(self, gen):
        for _ in range(20):
            G = random_simple_graph(gen, int(gen.integers(2, 50)), 0.3)
            assert odd_degree_vertices(G).size % 2 == 0


class TestMultiGraph:
    def test_loop_counts_twice(self):
        mg = MultiGraph(2, [(0, 0), (0, 1)])
        assert list(mg.degrees()) == [3, 1]
        assert not mg.is_simple()

    def test_to_graph(self):
        mg = MultiGraph(3, [(0, 1), (1, 2)])
        assert mg.is_simple()
        assert mg.to_graph().m == 2
        with pytest.raises(ValueError):
            MultiGraph(2, [(0, 1), (0, 1)]).to_graph()


class TestEdgeList:
    def test_roundtrip(self, tmp_path, gen):
        G = random_simple_graph(gen, 25, 0.2)
        f = tmp_path / "g.edges"
        write_edgelist(G, f)
        H = read_edgelist(f)
        assert H == G

    def test_bit_exact(self, tmp_path):
        f = tmp_path / "g.edges"
        write_edgelist(K4(), f)
        assert f.read_bytes() == b"4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n"

    def test_reader_rejects(self, tmp_path):
        for body in ["2 1\n0 0\n", "2 2\n0 1\n0 1\n", "2 1\n0 5\n", "2 1\n1 0\n"]:
            f = tmp_path / "bad.edges"
            f.write_text(body)
            with pytest.raises(ValueError):
                read_edgelist(f)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 24), st.data())
def test_graph_invariants_property(n, data):
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    chosen = data.draw(st.lists(st.sampled_from(pairs), unique=True, max_size=len(pairs)))
    G = Graph(n, chosen)
    assert G.m == len(chosen)
    assert G.degrees().sum() == 2 * G.m
    U, H = k_core(G, 2)
    assert H.n == 0 or H.degrees().min() >= 2
    # maximality: every vertex outside the core fails in core + itself
    core_set = set(int(u) for u in U)
    for v in range(n):
        if v not in core_set:
            Hv, _ = induced_subgraph(G, sorted(core_set | {v}))
            assert Hv.degrees().min() < 2
