import numpy as np
import pytest

from corelab.graphs import Graph
from corelab.linalg import (BitMatrix, Gf2Solver, GfpAppendState, ModMatrix,
                            append_vertex_rank, fraction_free_rank, is_prime,
                            matmul_mod, nullspace_basis_gf2, random_prime,
                            rank_gf2, rank_mod_p, rational_rank,
                            _rank_modp_blocked, _rank_modp_simple)
from conftest import naive_gf2_rank, random_symmetric_01

P30 = 1_073_741_789  # a 30-bit prime


class TestPrimes:
    def test_is_prime(self):
        assert is_prime(2) and is_prime(3) and is_prime(P30)
        assert not is_prime(1) and not is_prime(561) and not is_prime(2 ** 29)

    def test_random_prime_in_range(self, gen):
        for _ in range(20):
            p = random_prime(30, gen)
            assert 2 ** 29 <= p < 2 ** 30 and is_prime(p)


class TestGf2:
    def test_identity_and_zero(self):
        assert rank_gf2(BitMatrix.from_dense(np.eye(7, dtype=int))) == 7
        assert rank_gf2(BitMatrix(5, 5)) == 0

    def test_against_naive_oracle(self, gen):
        # bit-packed elimination equals single-bit elimination
        for _ in range(1000):
            a = (gen.random((50, 50)) < gen.uniform(0.05, 0.9)).astype(np.int64)
            assert rank_gf2(BitMatrix.from_dense(a)) == naive_gf2_rank(a)

    def test_nullspace_examples(self):
        assert nullspace_basis_gf2(BitMatrix.from_dense(np.eye(6, dtype=int))) == []
        basis = nullspace_basis_gf2(BitMatrix(4, 4))
        assert sorted(basis) == [1, 2, 4, 8]

    def test_nullspace_fuzz(self, gen):
        for _ in range(1000):
            r, c = int(gen.integers(1, 24)), int(gen.integers(1, 24))
            a = (gen.random((r, c)) < 0.4).astype(np.int64)
            bm = BitMatrix.from_dense(a)
            basis = nullspace_basis_gf2(bm)
            assert len(basis) == c - rank_gf2(bm)
            for v in basis:
                assert bm.matvec(v) == 0

    def test_solver_solutions(self, gen):
        for _ in range(200):
            n = int(gen.integers(2, 20))
            a = random_symmetric_01(gen, n, 0.4)
            bm = BitMatrix.from_dense(a)
            sol = Gf2Solver(bm)
            assert sol.rank == rank_gf2(bm)
            for w in sol.kernel:
                assert bm.matvec(w) == 0
            for i in range(n):
                x = sol.solve_unit(i)
                if x is not None:
                    assert bm.matvec(x) == 1 << i
                for j in range(i + 1, n):
                    x = sol.solve_pair(i, j)
                    if x is not None:
                        assert bm.matvec(x) == (1 << i) | (1 << j)


class TestModP:
    def test_examples(self):
        assert rank_mod_p(ModMatrix(np.eye(9, dtype=int), P30)) == 9
        C4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        assert rank_mod_p(ModMatrix(C4.adjacency_dense(), 10007)) == 2

    def test_rejects_nonprime(self):
        with pytest.raises(ValueError):
            ModMatrix(np.eye(2, dtype=int), 10)
        with pytest.raises(ValueError):
            ModMatrix(np.eye(2, dtype=int), 1 << 31)

    def test_against_fraction_free(self, gen):
        for _ in range(150):
            n = int(gen.integers(1, 40))
            a = random_symmetric_01(gen, n)
            r_ff = fraction_free_rank(a)
            for _ in range(2):
                p = random_prime(30, gen)
                assert rank_mod_p(ModMatrix(a, p)) == r_ff

    def test_blocked_vs_simple(self, gen):
        for _ in range(25):
            n = int(gen.integers(130, 320))
            a = (gen.random((n, n)) < gen.uniform(0.005, 0.1)).astype(np.int64)
            a = np.triu(a, 1)
            a = a + a.T
            p = random_prime(30, gen)
            assert _rank_modp_blocked(a.copy(), p) == _rank_modp_simple(a.copy(), p)

    def test_transpose_rank(self, gen):
        for _ in range(30):
            a = (gen.random((int(gen.integers(2, 30)), int(gen.integers(2, 30)))) < 0.3).astype(np.int64)
            assert rank_mod_p(ModMatrix(a, P30)) == rank_mod_p(ModMatrix(a.T, P30))

    def test_matmul_mod_exact(self, gen):
        for _ in range(20):
            k = int(gen.integers(1, 200))
            F = gen.integers(0, P30, (int(gen.integers(1, 8)), k))
            U = gen.integers(0, P30, (k, int(gen.integers(1, 8))))
            want = (F.astype(object) @ U.astype(object)) % P30
            got = matmul_mod(F, U, P30)
            assert np.array_equal(got.astype(object), want)


class TestFractionFree:
    def test_examples(self):
        assert fraction_free_rank(np.eye(8, dtype=int)) == 8
        assert fraction_free_rank(np.ones((6, 6), dtype=int)) == 1
        assert fraction_free_rank(np.zeros((0, 0), dtype=int)) == 0

    def test_cap(self):
        with pytest.raises(ValueError):
            fraction_free_rank(np.eye(65, dtype=int))

    def test_multi_prime_lower_bound(self, gen):
        # rank over any prime never exceeds the rational rank
        for _ in range(100):
            n = int(gen.integers(1, 30))
            a = random_symmetric_01(gen, n)
            r = fraction_free_rank(a)
            for _ in range(5):
                p = random_prime(int(gen.integers(4, 30)), gen)
                assert rank_mod_p(ModMatrix(a, p)) <= r


class TestRationalRank:
    def test_identity_exact(self, gen):
        cert = rational_rank(np.eye(12, dtype=int), rng=gen)
        assert cert.rank == 12 and cert.certainty == "exact" and cert.failure_bound == 0.0

    def test_c4_cross_check(self, gen):
        C4 = Graph(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        a = C4.adjacency_dense()
        cert = rational_rank(a, 3, gen)
        assert cert.rank == 2 == fraction_free_rank(a)
        assert cert.certainty == "lower-bound" and 0 < cert.failure_bound < 1e-3
        assert cert.corank == 2

    def test_empty_matrix_nonsingular(self, gen):
        cert = rational_rank(np.zeros((0, 0), dtype=int), rng=gen)
        assert cert.corank == 0 and cert.certainty == "exact"

    def test_triangle_gf2_undershoots(self, gen):
        # p = 2 genuinely loses rank on the triangle; random large primes do not
        tri = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]])
        assert rank_gf2(BitMatrix.from_dense(tri)) == 2
        assert rational_rank(tri, 3, gen).rank == 3

    def test_prime_set_independence(self, gen):
        # disjoint 3-prime sets agree on sampled core adjacencies
        from corelab.samplers import sample_core
        from corelab.rng import RngStream
        for t in range(1000):
            core, _, _ = sample_core(500, 6.0, 3, RngStream(777, t))
            if core.n == 0:
                continue
            a = core.adjacency_dense()
            c1 = rational_rank(a, 3, gen)
            c2 = rational_rank(a, 3, gen)
            assert c1.rank == c2.rank


class TestAppendState:
    def test_zero_vector_keeps_rank(self, gen):
        a = random_symmetric_01(gen, 8)
        st = GfpAppendState(a, P30)
        r0 = st.rank
        assert append_vertex_rank(st, np.zeros(8, dtype=int)) == r0

    def test_1x1_pair(self):
        st = GfpAppendState(np.zeros((1, 1), dtype=int), P30)
        assert st.rank == 0
        assert append_vertex_rank(st, np.array([1])) == 2

    def test_against_recompute(self, gen):
        # 1000 random extensions, n <= 200, versus from-scratch rank
        done = 0
        while done < 1000:
            n = int(gen.integers(1, 60))
            a = random_symmetric_01(gen, n, 0.15)
            p = random_prime(30, gen)
            st = GfpAppendState(a, p)
            cur = a
            for _ in range(int(gen.integers(1, 6))):
                x = (gen.random(cur.shape[0]) < 0.3).astype(np.int64)
                r_inc = append_vertex_rank(st, x)
                m = cur.shape[0]
                ext = np.zeros((m + 1, m + 1), dtype=np.int64)
                ext[:m, :m] = cur
                ext[:m, m] = x
                ext[m, :m] = x
                cur = ext
                assert r_inc == rank_mod_p(ModMatrix(cur, p))
                done += 1

    def test_increment_bounds(self, gen):
        a = random_symmetric_01(gen, 20, 0.2)
        st = GfpAppendState(a, P30)
        prev = st.rank
        for _ in range(30):
            new = st.append((gen.random(st.ncur) < 0.4).astype(np.int64))
            assert new - prev in (0, 1, 2)
            prev = new

    def test_rejects_bad_input(self):
        with pytest.raises(ValueError):
            GfpAppendState(np.array([[1, 0], [0, 0]]), P30)  # nonzero diagonal
        with pytest.raises(ValueError):
            GfpAppendState(np.array([[0, 1], [0, 0]]), P30)  # asymmetric
