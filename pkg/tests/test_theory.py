import math

import numpy as np
import pytest

from corelab.graphs import Graph
from corelab.rng import RngStream
from corelab.theory import (DegreeDist, TruncPoisson, bulk_distribution,
                            corank_functional, find_degree_threshold,
                            functional_bound_report, local_tv_distance,
                            log_concavity_check, max_corank_functional,
                            removal_law, size_biased, solve_lambda,
                            surrogate_distribution, surrogate_pgf2_samples,
                            tv_distance_counts)


class TestSolveLambda:
    def test_residual_grid(self):
        # round-trip residual across c in (k, 2k]
        for k in (3, 4, 5):
            for c in np.linspace(k + 0.05, 2 * k, 12):
                lam = solve_lambda(k, float(c))
                got = TruncPoisson(k, lam).mean
                assert abs(got - c) <= 1e-9 * c

    def test_small_c_small_lambda(self):
        assert solve_lambda(3, 3.001) < 0.1

    def test_monotone(self):
        assert solve_lambda(3, 4.0) < solve_lambda(3, 5.0)

    def test_domain(self):
        with pytest.raises(ValueError):
            solve_lambda(3, 3.0)


class TestTruncPoisson:
    def test_normalization_and_support(self):
        tp = TruncPoisson(3, 2.5)
        assert abs(tp._pmf.sum() - 1.0) < 1e-12
        assert tp.pmf(0) == tp.pmf(2) == 0.0
        assert tp.pmf(3) > 0

    def test_closed_form_k3_lam1(self):
        tp = TruncPoisson(3, 1.0)
        assert abs(tp.pmf(3) - (1 / 6) / (math.e - 2.5)) < 1e-14


class TestRemovalLaw:
    def setup_method(self):
        self.c = 4.0
        self.lam = solve_lambda(3, self.c)
        self.tp = TruncPoisson(3, self.lam)

    def test_mass_balance_grid(self):
        for alpha in (0.02, 0.1, 0.3):
            for Delta in (3, 5, 8, 20):
                law = removal_law(self.tp, alpha, Delta, self.c)
                total = law.delta.sum() + law.delta_prime.sum()
                assert abs(total - (1 - law.beta)) < 1e-10
                assert 0 <= law.beta <= alpha and 0 <= law.gamma <= 1

    def test_alpha_zero(self):
        law = removal_law(self.tp, 0.0, 10, self.c)
        assert law.beta == 0 and np.all(law.delta_prime == 0)
        mu = bulk_distribution(law)
        assert np.allclose(mu.pmf[:self.tp._pmf.size], self.tp._pmf, atol=1e-14)

    def test_delta_past_truncation(self):
        law = removal_law(self.tp, 0.1, 400, self.c)
        # beta, gamma vanish to the float floor; thinning degenerates
        assert law.beta < 1e-300 or law.beta == 0.0
        size = self.tp._pmf.size
        assert np.allclose(law.delta[:size], 0.9 * self.tp._pmf, atol=1e-13)
        assert np.allclose(law.delta_prime[:size], 0.1 * self.tp._pmf, atol=1e-13)

    def test_gamma_cross_check_runs(self):
        # both gamma series agree to 1e-10 (checked inside, raising otherwise)
        removal_law(self.tp, 0.1, 20, self.c)

    def test_zeta_binomial(self):
        law = removal_law(self.tp, 0.1, 6, self.c)
        for j in (3, 5, 9):
            total = sum(law.zeta(j, t) for t in range(j + 1))
            assert abs(total - 1.0) < 1e-12


class TestDegreeDist:
    def test_pgf_values(self):
        tp = TruncPoisson(3, solve_lambda(3, 4.0))
        f = tp.as_distribution()
        assert abs(f.pgf(1.0) - 1.0) < 1e-12
        assert abs(f.pgf(1.0, 1) - f.mean()) < 1e-10

    def test_pgf_derivative_finite_difference(self):
        tp = TruncPoisson(3, solve_lambda(3, 4.5))
        f = tp.as_distribution()
        for x in np.linspace(0.05, 0.95, 7):
            for order in (1, 2):
                errs = []
                for h in (1e-3, 5e-4):
                    fd = (f.pgf(x + h, order - 1) - f.pgf(x - h, order - 1)) / (2 * h)
                    errs.append(abs(fd - f.pgf(x, order)))
                # halving h quarters the O(h^2) error
                assert errs[1] < errs[0] * 0.4 + 1e-12

    def test_normalization_enforced(self):
        with pytest.raises(ValueError):
            DegreeDist(np.array([0.5, 0.3]))


class TestCorankFunctional:
    def setup_method(self):
        self.c = 4.0
        self.tp = TruncPoisson(3, solve_lambda(3, self.c))

    def test_zero_at_origin_for_rho(self):
        # exact when f(0) = 0: M(0) = phi(1) + phi(0) - 1 = f(0)
        rho = self.tp.as_distribution()
        assert abs(corank_functional(rho, 0.0)) < 1e-12

    def test_point_mass_cases(self):
        for d in (2, 3, 5):
            pm = np.zeros(d + 1)
            pm[d] = 1.0
            f = DegreeDist(pm)
            assert abs(corank_functional(f, 1.0)) < 1e-12
            assert abs(corank_functional(f, 0.0)) < 1e-12

    def test_derivative_zero_at_origin(self):
        # M'(0) = phi''(1)/phi'(1) * phi'(0) = 0 whenever f(0) = f(1) = 0
        rho = self.tp.as_distribution()
        analytic = rho.pgf(1.0, 2) / rho.pgf(1.0, 1) * rho.pgf(0.0, 1)
        assert analytic == 0.0
        h = 1e-5
        slope = (corank_functional(rho, h) - corank_functional(rho, 0.0)) / h
        assert abs(slope) < 1e-3

    def test_max_at_least_origin(self):
        law = removal_law(self.tp, 0.1, 12, self.c)
        mu = bulk_distribution(law)
        _, v = max_corank_functional(mu)
        assert v >= corank_functional(mu, 0.0) - 1e-15

    def test_grid_doubling_stable(self):
        rho = self.tp.as_distribution()
        _, v1 = max_corank_functional(rho, grid_points=10_001)
        _, v2 = max_corank_functional(rho, grid_points=20_001)
        assert abs(v1 - v2) < 1e-8

    def test_independent_coarse_grid(self):
        rho = self.tp.as_distribution()
        _, v = max_corank_functional(rho)
        xs = np.linspace(0, 1, 2503)
        coarse = max(corank_functional(rho, float(x)) for x in xs)
        assert v >= coarse - 1e-12 and abs(v - coarse) < 1e-6

    def test_zero_mean_rejected(self):
        with pytest.raises(ValueError):
            corank_functional(DegreeDist(np.array([1.0])), 0.5)


class TestSurrogate:
    def test_nonnegative_and_transfer(self):
        c = 4.0
        lam = solve_lambda(3, c)
        tp = TruncPoisson(3, lam)
        dstar, rep = find_degree_threshold(3, 0.1, c, cap=100)
        for Delta in (dstar, dstar + 3):
            law = removal_law(tp, 0.1, Delta, c)
            nu = surrogate_distribution(law)
            assert np.all(nu.pmf >= 0)
            rep2 = functional_bound_report(3, 0.1, c, Delta)
            assert rep2.transfer_ok and rep2.bound_ok and rep2.logconc_ok

    def test_alpha0_delta_far_reduces_to_rho(self):
        c = 4.0
        lam = solve_lambda(3, c)
        tp = TruncPoisson(3, lam)
        law = removal_law(tp, 0.0, 400, c)
        nu = surrogate_distribution(law)
        size = tp._pmf.size
        assert np.allclose(nu.pmf[:size], tp._pmf[:size], atol=1e-10)

    def test_logconcavity_sweep_spec_point(self):
        # (k=3, alpha=0.1, Delta=40, c=4) passes on [0, (1-gamma)lam]
        c = 4.0
        tp = TruncPoisson(3, solve_lambda(3, c))
        law = removal_law(tp, 0.1, 40, c)
        _, vals = surrogate_pgf2_samples(law)
        ok, _ = log_concavity_check(vals)
        assert ok


class TestLogConcavity:
    def test_exponential_boundary(self):
        xs = np.linspace(0, 1, 200)
        ok, _ = log_concavity_check(np.exp(xs))
        assert ok

    def test_violation_reported(self):
        xs = np.linspace(0, 1, 200)
        ok, idx = log_concavity_check(1 + xs ** 2)
        assert not ok and idx is not None

    def test_nonpositive_rejected(self):
        with pytest.raises(ValueError):
            log_concavity_check([1.0, 0.0, 1.0])


class TestSizeBiased:
    def test_point_mass_shift(self):
        pm = np.zeros(6)
        pm[5] = 1.0
        out = size_biased(DegreeDist(pm))
        assert out.pmf[4] == 1.0

    def test_sums_to_one(self):
        tp = TruncPoisson(3, solve_lambda(3, 4.0))
        out = size_biased(tp.as_distribution())
        assert abs(out.pmf.sum() - 1.0) < 1e-12

    def test_poisson_closure(self):
        lam = 2.3
        t = np.arange(40)
        pois = np.exp(-lam) * lam ** t / np.array([math.factorial(i) for i in t])
        out = size_biased(DegreeDist(pois / pois.sum()))
        assert np.allclose(out.pmf[:39], pois[:39] / pois.sum(), atol=1e-12)

    def test_zero_mean_rejected(self):
        with pytest.raises(ValueError):
            size_biased(DegreeDist(np.array([1.0])))


class TestLocalTv:
    def test_r1_always_zero(self):
        G = Graph(5, [(0, 1), (1, 2)])
        mu = DegreeDist(np.array([0.0, 0.0, 1.0]))
        tv, _, _ = local_tv_distance(G, mu, 1, 200, RngStream(1))
        assert tv == 0.0

    def test_cycle_matches_two_regular_tree(self):
        n = 30
        C = Graph(n, [(i, (i + 1) % n) for i in range(n)])
        mu = DegreeDist(np.array([0.0, 0.0, 1.0]))
        for r in (2, 3):
            tv, lo, hi = local_tv_distance(C, mu, r, 3000, RngStream(2, r))
            assert tv == 0.0 and lo == 0.0

    def test_k4_all_balls_cyclic(self):
        K4 = Graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        mu = DegreeDist(np.array([0.0, 0.0, 0.0, 1.0]))
        tv, _, _ = local_tv_distance(K4, mu, 2, 500, RngStream(3))
        assert tv == 1.0

    def test_radius_cap(self):
        G = Graph(3, [(0, 1)])
        with pytest.raises(ValueError):
            local_tv_distance(G, DegreeDist(np.array([1.0])), 4, 10, RngStream(1))

    def test_core_ball_law_close_to_truncated_poisson(self):
        # sampled min-degree-3 core versus its limit law, radius-1 balls
        from corelab.samplers import sample_core
        core, _, m = sample_core(100_000, 10.0, 3, RngStream(5, 7))
        c = 2 * m / core.n
        tp = TruncPoisson(3, solve_lambda(3, c))
        tv, _, _ = local_tv_distance(core, tp.as_distribution(), 2, 60_000, RngStream(5, 8))
        assert tv < 0.05


class TestTvCounts:
    def test_exact_match(self):
        pmf = np.array([0.25, 0.75])
        assert tv_distance_counts(np.array([25, 75]), pmf) < 1e-12

    def test_disjoint(self):
        assert tv_distance_counts(np.array([0, 10]), np.array([1.0])) == 1.0
