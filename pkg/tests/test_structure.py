from itertools import combinations

import numpy as np
import pytest

from corelab.graphs import Graph, induced_subgraph
from corelab.linalg import BitMatrix
from corelab.structure import (build_Q, check_ukp_f2, expansion1_falsify,
                               expansion2_check, goodness, joined_pairs,
                               _enum_dense_small_set)
from conftest import random_simple_graph


def K4():
    return Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def cycle(n):
    return Graph(n, [(i, (i + 1) % n) for i in range(n)])


PETERSEN = Graph(10, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (5, 7), (7, 9),
                      (9, 6), (6, 8), (8, 5), (0, 5), (1, 6), (2, 7), (3, 8), (4, 9)])


class TestGoodness:
    def test_c5_fails_on_parity(self):
        rep = goodness(cycle(5), range(5), 0.1, 0.2)
        assert not rep.good and rep.odd_degree_count == 0

    def test_k4_good(self):
        rep = goodness(K4(), range(4), 0.99, 0.5)
        assert rep.good and rep.min_degree == 3 and rep.near_degree2_count == 0

    def test_degree2_pair_distance(self):
        # two degree-2 vertices at distance 3 fail the separation bullet
        G = Graph(10, [(0, 1), (0, 2), (1, 2), (0, 3), (3, 4), (4, 5), (5, 6),
                       (6, 7), (6, 8), (7, 8), (1, 9), (2, 9), (7, 9), (8, 3)])
        H, _ = induced_subgraph(G, range(10))
        deg2 = np.nonzero(H.degrees() == 2)[0]
        rep = goodness(G, range(10), 0.05, 0.9)
        if deg2.size >= 2:
            assert rep.min_degree2_pair_distance is not None

    def test_monotone_in_theta(self, gen):
        for _ in range(20):
            G = random_simple_graph(gen, 30, 0.15)
            lo = goodness(G, range(30), 0.05, 0.3)
            hi = goodness(G, range(30), 0.5, 0.3)
            if hi.good:
                assert lo.good  # raising theta can only flip good -> bad

    def test_threshold_domain(self):
        with pytest.raises(ValueError):
            goodness(K4(), range(4), 0.0, 0.5)


class TestBuildQ:
    def test_k4_all(self):
        assert list(build_Q(K4(), range(4))) == [0, 1, 2, 3]

    def test_c7_all_near_degree2(self):
        assert list(build_Q(cycle(7), range(7))) == list(range(7))

    def test_petersen_empty(self):
        # girth 5, 3-regular: no 4-cycles, no degree-2 vertices
        assert build_Q(PETERSEN, range(10)).size == 0


class TestKernelSpread:
    def test_identity_passes_vacuously(self):
        rep = check_ukp_f2(BitMatrix.from_dense(np.eye(5, dtype=int)), 0, [], 0.3)
        assert rep.passed and rep.corank == 0

    def test_c4_kernel_span_witness(self):
        # the kernel contains the all-ones vector, a witness at any eta
        A = BitMatrix.from_graph(cycle(4))
        rep = check_ukp_f2(A, 0, [], 0.5)
        assert not rep.passed and rep.witness.weight == 4
        rep = check_ukp_f2(A, 0, [], 0.6)
        assert not rep.passed

    def test_petersen_spreads(self):
        rep = check_ukp_f2(BitMatrix.from_graph(PETERSEN), 2, [], 0.1)
        assert rep.passed

    def test_ell_cap(self):
        with pytest.raises(ValueError):
            check_ukp_f2(BitMatrix(3, 3), 3, [], 0.1)

    def brute_force(self, A: BitMatrix, ell: int, Q, eta: float) -> bool:
        n = A.n_cols
        qmask = 0
        for q in Q:
            qmask |= 1 << int(q)
        lo, hi = eta * n, n - eta * n
        for v in range(1, 1 << n):
            av = A.matvec(v)
            if av.bit_count() <= ell and (av & qmask) == 0:
                w = v.bit_count()
                if w < lo or w > hi:
                    return False
        return True

    def test_against_brute_force(self, gen):
        # exhaustive over all 2^n vectors, n <= 14
        for _ in range(120):
            n = int(gen.integers(3, 14))
            G = random_simple_graph(gen, n, gen.uniform(0.15, 0.5))
            A = BitMatrix.from_graph(G)
            q = [int(x) for x in gen.permutation(n)[:int(gen.integers(0, 3))]]
            ell = int(gen.integers(0, 3))
            eta = float(gen.uniform(0.05, 0.4))
            want = self.brute_force(A, ell, q, eta)
            got = check_ukp_f2(A, ell, q, eta).passed
            assert got == want, (n, ell, q, eta)

    def test_witness_fields(self):
        A = BitMatrix.from_graph(cycle(4))
        rep = check_ukp_f2(A, 2, [], 0.5)
        w = rep.witness
        assert w is not None
        assert A.matvec(w.vector).bit_count() <= 2
        assert w.level_fraction > 0.5


class TestExpansion1:
    def test_star_counterexample(self):
        star = Graph(10, [(0, i) for i in range(1, 10)])
        rep = expansion1_falsify(star, eta=0.25, theta=0.8)
        assert rep.counterexample == (0,) and rep.exact

    def test_empty_none(self):
        rep = expansion1_falsify(Graph(6, None), 0.5, 0.5)
        assert rep.counterexample is None

    def test_greedy_large(self, gen):
        G = random_simple_graph(gen, 60, 0.05)
        rep = expansion1_falsify(G, eta=0.05, theta=0.9)
        assert not rep.exact or G.n <= 20

    def test_exact_vs_greedy_consistency(self, gen):
        # when the exact search finds nothing, coverage really is impossible
        for _ in range(20):
            G = random_simple_graph(gen, 12, 0.25)
            rep = expansion1_falsify(G, eta=0.35, theta=0.95)
            if rep.counterexample is None:
                best = 0
                for s in range(1, rep.size_limit + 1):
                    for S in combinations(range(12), s):
                        mask = np.zeros(12, dtype=bool)
                        for v in S:
                            mask[G.neighbors(v)] = True
                        best = max(best, int(mask.sum()))
                assert best < rep.required


class TestExpansion2:
    def test_tree_passes(self):
        tree = Graph(7, [(0, 1), (0, 2), (1, 3), (1, 4), (2, 5), (2, 6)])
        assert expansion2_check(tree, eta=0.9).ok1

    def test_k4_pendant_fails_density(self):
        K4p = Graph(5, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (3, 4)])
        rep = expansion2_check(K4p, eta=0.9)
        assert not rep.ok1

    def test_c4_pendant_near_count(self):
        C4p = Graph(5, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 4)])
        rep = expansion2_check(C4p, eta=0.9)
        assert rep.near_four_cycle_count == 5

    def test_dense_set_oracle(self, gen):
        # exact part (1) against brute-force subset enumeration, n <= 14
        for _ in range(80):
            n = int(gen.integers(4, 14))
            G = random_simple_graph(gen, n, gen.uniform(0.08, 0.4))
            got = _enum_dense_small_set(G, 11, 2_000_000)
            brute = None
            for s in range(3, min(n, 11) + 1):
                for S in combinations(range(n), s):
                    H, _ = induced_subgraph(G, S)
                    if H.m > H.n:
                        brute = S
                        break
                if brute:
                    break
            assert (got is None) == (brute is None)
            if got is not None:
                H, _ = induced_subgraph(G, got)
                assert H.m > H.n and H.n <= 11

    def test_dumbbell_found(self):
        db = Graph(8, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (4, 5), (5, 6),
                       (6, 7), (5, 7)])
        rep = expansion2_check(db, eta=0.9)
        assert not rep.ok1

    def test_pair_witness_fields(self, gen):
        # a dense blob violates the (S, W) system
        blob = Graph(8, [(i, j) for i in range(6) for j in range(i + 1, 6)])
        rep = expansion2_check(blob, eta=0.99)
        assert rep.pair_witness is not None and rep.pair_exact
        S, W = rep.pair_witness
        assert len(S) >= 5 and not set(S) & set(W)


class TestJoinedPairs:
    def test_adjacent_pair(self):
        G = Graph(3, [(0, 1)])
        assert (0, 1) in joined_pairs(G, [0, 1], 1)

    def test_c6_self_joined_at_6(self):
        C6 = cycle(6)
        pairs6 = joined_pairs(C6, range(6), 6)
        assert all((u, u) in pairs6 for u in range(6))
        pairs5 = joined_pairs(C6, range(6), 5)
        assert all((u, u) not in pairs5 for u in range(6))

    def test_isolated_vertex_empty(self):
        G = Graph(3, [(0, 1)])
        assert joined_pairs(G, [2], 4) == []

    def test_symmetric(self, gen):
        for _ in range(20):
            G = random_simple_graph(gen, 14, 0.2)
            X = [int(x) for x in gen.permutation(14)[:6]]
            pairs = set(joined_pairs(G, X, 4))
            for u, v in pairs:
                assert (v, u) in pairs

    def test_r_cap(self):
        with pytest.raises(ValueError):
            joined_pairs(K4(), [0], 9)
