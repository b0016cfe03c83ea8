"""Closed-form and numeric oracles for core degree laws and corank bounds.

Houses the k-truncated Poisson family, the quantities describing the degree
law after extracting high-degree vertices, the generating-function corank
functional with its maximizer, log-concavity sweeps, size-biasing, and local
tree-distance estimation against branching-process balls.

All series are truncated once the running tail bound (geometric domination by
lambda/t per term) drops below 1e-14; 64-bit floats throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from collections import Counter
import math

import numpy as np

TAIL_TOL = 1e-14
_XCHECK_TOL = 1e-10


def _poisson_terms(lam: float, t0: int) -> "list[float]":
    """Terms lambda^t/t! for t >= t0, truncated by the running tail bound."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if lam == 0:
        return [1.0] if t0 == 0 else [0.0]
    term = math.exp(t0 * math.log(lam) - math.lgamma(t0 + 1))
    out = [term]
    peak = term
    t = t0
    while True:
        t += 1
        term *= lam / t
        out.append(term)
        peak = max(peak, term)
        # once past the mode the tail is dominated by a geometric series;
        # truncate relative to the peak so tiny tails keep full precision
        if t > lam and term / (1.0 - lam / (t + 1)) < TAIL_TOL * peak:
            break
    return out


class TruncPoisson:
    """Poisson(lambda) conditioned on being >= k: the limiting core degree law."""

    __slots__ = ("k", "lam", "Z", "_pmf")

    def __init__(self, k: int, lam: float):
        if k < 0:
            raise ValueError("k must be nonnegative")
        self.k = int(k)
        self.lam = float(lam)
        terms = _poisson_terms(self.lam, self.k)
        self.Z = math.fsum(terms)
        if self.Z <= 0:
            raise ValueError("degenerate truncated Poisson")
        pmf = np.zeros(self.k + len(terms))
        pmf[self.k:] = np.asarray(terms) / self.Z
        self._pmf = pmf

    def pmf(self, t: int) -> float:
        """rho_t = (lambda^t/t!)/Z_k(lambda) for t >= k, else 0."""
        if t < self.k:
            return 0.0
        if t < self._pmf.size:
            return float(self._pmf[t])
        return math.exp(t * math.log(self.lam) - math.lgamma(t + 1)) / self.Z

    def tail(self, t0: int) -> float:
        """Sum of rho_t for t >= t0."""
        if t0 <= self.k:
            return 1.0
        return float(self._pmf[min(t0, self._pmf.size):].sum())

    @property
    def mean(self) -> float:
        t = np.arange(self._pmf.size)
        return float((t * self._pmf).sum())

    def support(self):
        """(values, pmf) arrays covering all but < 1e-14 of the mass."""
        vals = np.arange(self.k, self._pmf.size)
        pm = self._pmf[self.k:].copy()
        return vals, pm / pm.sum()

    def as_distribution(self) -> "DegreeDist":
        return DegreeDist(self._pmf.copy())


def solve_lambda(k: int, c: float) -> float:
    """The unique lambda with lambda * Z_{k-1}(lambda) / Z_k(lambda) = c.

    The left side increases strictly from its infimum k (as lambda -> 0+), so
    bisection converges; requires c > k. Residual <= 1e-10 * c.
    """
    if c <= k:
        raise ValueError(f"mean degree must exceed k={k}")

    def f(lam: float) -> float:
        upper = math.fsum(_poisson_terms(lam, k - 1))
        lower = math.fsum(_poisson_terms(lam, k))
        return lam * upper / lower

    lo, hi = 1e-12, max(1.0, c)
    while f(hi) < c:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < c:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * hi and abs(f(hi) - c) <= 1e-10 * c:
            break
    lam = 0.5 * (lo + hi)
    if abs(f(lam) - c) > 1e-10 * c:
        raise ArithmeticError("bisection failed to reach target residual")
    return lam


@dataclass(frozen=True)
class RemovalLaw:
    """Limit quantities for removing the high-degree part of a sampled fraction.

    For a retention fraction alpha of sampled vertices and a degree threshold
    Delta: beta is the removed fraction, gamma the removed share of edge
    endpoints, delta[t]/delta_prime[t] the densities of unsampled/sampled-kept
    vertices with t retained neighbors, and zeta(j, t) the binomial thinning
    kernel.
    """

    k: int
    lam: float
    alpha: float
    Delta: int
    c: float
    beta: float
    gamma: float
    delta: np.ndarray
    delta_prime: np.ndarray

    def zeta(self, j: int, t: int) -> float:
        """P(Binomial(j, 1 - gamma) = t)."""
        if t < 0 or t > j:
            return 0.0
        return math.comb(j, t) * self.gamma ** (j - t) * (1.0 - self.gamma) ** t


def removal_law(tp: TruncPoisson, alpha: float, Delta: int, c: float) -> RemovalLaw:
    """Compute the removal-law quantities for threshold Delta and fraction alpha.

    gamma is evaluated by two independent series (the degree-weighted tail over
    c and the shifted-tail over Z_{k-1}); they must agree to 1e-10.
    """
    if not 0.0 <= alpha < 1.0:
        raise ValueError("alpha must lie in [0, 1)")
    if Delta < tp.k:
        raise ValueError("Delta must be at least k")
    k, lam = tp.k, tp.lam
    # tails from the raw series, not the truncated pmf array, so that tiny
    # values survive down to the floating-point floor
    if lam > 0:
        beta = alpha * math.fsum(_poisson_terms(lam, Delta)) / tp.Z if Delta > k else alpha
        # route 1: degree-weighted tail sum(t rho_t) / c, term recurrence on
        # t lambda^t/t! = lambda^t/(t-1)!
        terms = []
        u = math.exp(Delta * math.log(lam) - math.lgamma(Delta))
        t = Delta
        while True:
            terms.append(u)
            u *= lam / t
            t += 1
            if t > lam + 1 and u / (1.0 - lam / (t + 1)) < TAIL_TOL * max(terms[0], 1e-300):
                break
        gamma1 = (alpha / c) * math.fsum(terms) / tp.Z
        # route 2: shifted tail over Z_{k-1}
        zk1 = math.fsum(_poisson_terms(lam, k - 1))
        gamma2 = alpha * math.fsum(_poisson_terms(lam, Delta - 1)) / zk1
    else:
        beta = alpha if Delta <= k else 0.0
        gamma1 = gamma2 = 0.0
    if abs(gamma1 - gamma2) > _XCHECK_TOL * max(1.0, gamma1):
        raise ArithmeticError(f"gamma cross-check failed: {gamma1} vs {gamma2}")
    gamma = gamma1
    jmax = tp._pmf.size - 1
    delta = np.zeros(jmax + 1)
    delta_prime = np.zeros(jmax + 1)
    for j in range(k, jmax + 1):
        rho_j = tp._pmf[j]
        if rho_j == 0.0:
            continue
        zj = np.array([math.comb(j, s) * gamma ** (j - s) * (1.0 - gamma) ** s
                       for s in range(j + 1)])
        delta[:j + 1] += (1.0 - alpha) * rho_j * zj
        if j < Delta:
            delta_prime[:j + 1] += alpha * rho_j * zj
    law = RemovalLaw(k, lam, alpha, int(Delta), c, beta, gamma, delta, delta_prime)
    total = float(delta.sum() + delta_prime.sum())
    if abs(total - (1.0 - beta)) > 1e-10:
        raise ArithmeticError(f"mass balance failed: {total} vs {1 - beta}")
    return law


@dataclass
class DegreeDist:
    """Degree law on nonnegative integers, stored as a truncated pmf array.

    pmf[t] is the mass at t; `normalized` records whether the function is a
    probability distribution or an unnormalized surrogate.
    """

    pmf: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        self.pmf = np.asarray(self.pmf, dtype=np.float64)
        if np.any(self.pmf < -1e-15):
            raise ValueError("masses must be nonnegative")
        if self.normalized and abs(self.pmf.sum() - 1.0) > 1e-10:
            raise ValueError("masses must sum to 1")

    @property
    def truncation(self) -> int:
        return self.pmf.size

    def mean(self) -> float:
        return float((np.arange(self.pmf.size) * self.pmf).sum())

    def pgf(self, x: float, order: int = 0) -> float:
        """phi_f(x) = sum f(i) x^i, or its first or second derivative.

        The stored truncation keeps the neglected tail below 1e-12 on [0, 1].
        """
        if order not in (0, 1, 2):
            raise ValueError("order must be 0, 1 or 2")
        c = self.pmf
        i = np.arange(c.size, dtype=np.float64)
        if order >= 1:
            c = (c * i)[1:]
            i = i[1:] - 1
        if order == 2:
            c = (c * (i + 1))[1:]
        return float(np.polynomial.polynomial.polyval(x, c))

    def support(self):
        vals = np.nonzero(self.pmf > 0)[0]
        pm = self.pmf[vals]
        return vals, pm / pm.sum()


def corank_functional(f: DegreeDist, x: float) -> float:
    """The generating-function expression whose maximum over [0, 1] bounds the
    asymptotic corank fraction:
        M_f(x) = x phi'(1-x) + phi(1-x) + phi(1 - phi'(1-x)/phi'(1)) - 1.
    """
    d1 = f.pgf(1.0, 1)
    if d1 <= 0:
        raise ValueError("distribution must have positive mean")
    y = 1.0 - x
    inner = 1.0 - f.pgf(y, 1) / d1
    return x * f.pgf(y, 1) + f.pgf(y) + f.pgf(inner) - 1.0


def max_corank_functional(f: DegreeDist, grid_points: int = 10_001) -> tuple[float, float]:
    """Global maximum of the corank functional over [0, 1].

    Dense grid scan plus golden-section refinement around the best cell; the
    functional can have several local extrema, so the grid does the global
    work and the refinement only polishes. Value accurate to ~1e-8.
    """
    xs = np.linspace(0.0, 1.0, grid_points)
    vals = np.array([corank_functional(f, float(x)) for x in xs])
    i = int(np.argmax(vals))
    a = xs[max(0, i - 1)]
    b = xs[min(grid_points - 1, i + 1)]
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - invphi * (b - a)
    x2 = a + invphi * (b - a)
    f1 = corank_functional(f, x1)
    f2 = corank_functional(f, x2)
    while b - a > 1e-12:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + invphi * (b - a)
            f2 = corank_functional(f, x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - invphi * (b - a)
            f1 = corank_functional(f, x1)
    xbest, vbest = (x1, f1) if f1 >= f2 else (x2, f2)
    if vals[i] > vbest:
        xbest, vbest = float(xs[i]), float(vals[i])
    return float(xbest), float(vbest)


def bulk_distribution(law: RemovalLaw) -> DegreeDist:
    """Degree law of retained neighbors for a uniformly random retained vertex:
    mu(t) = (delta_t + delta_t') / (1 - beta)."""
    if law.beta >= 1.0:
        raise ValueError("removed fraction must be below 1")
    return DegreeDist((law.delta + law.delta_prime) / (1.0 - law.beta))


def surrogate_distribution(law: RemovalLaw) -> DegreeDist:
    """Analytically tractable surrogate of the bulk law (unnormalized):
    nu(t) = (1-g)^t lam^t / ((1-b) Z_k t!) * ((1[t>=k] - a 1[t>=D])
             + g lam (1[t+1>=k] - a 1[t+1>=D])).
    """
    k, lam, alpha, Delta = law.k, law.lam, law.alpha, law.Delta
    g, b = law.gamma, law.beta
    z = math.fsum(_poisson_terms(lam, k))
    tmax = max(law.delta.size, Delta + 2)
    nu = np.zeros(tmax)
    logl = math.log(lam) if lam > 0 else -math.inf
    for t in range(tmax):
        ind = (1.0 if t >= k else 0.0) - alpha * (1.0 if t >= Delta else 0.0)
        ind2 = (1.0 if t + 1 >= k else 0.0) - alpha * (1.0 if t + 1 >= Delta else 0.0)
        w = ind + g * lam * ind2
        if w == 0.0:
            continue
        base = math.exp(t * (math.log1p(-g) + logl) - math.lgamma(t + 1))
        nu[t] = base * w / ((1.0 - b) * z)
    return DegreeDist(nu, normalized=False)


def surrogate_pgf2_samples(law: RemovalLaw, grid_points: int = 1001) -> tuple[np.ndarray, np.ndarray]:
    """Samples of the surrogate's second-derivative series on [0, (1-gamma)*lam].

    Works on the rescaled series sum_t (y^t/t!) w_t, whose log-concavity on
    [0, (1-gamma)*lam] is equivalent to that of the surrogate pgf's second
    derivative on [0, 1].
    """
    k, lam, alpha, Delta, g = law.k, law.lam, law.alpha, law.Delta, law.gamma
    tmax = max(law.delta.size, Delta + 5) + 5
    coef = np.zeros(tmax)
    for t in range(tmax):
        ind = (1.0 if t >= k else 0.0) - alpha * (1.0 if t >= Delta else 0.0)
        ind2 = (1.0 if t + 1 >= k else 0.0) - alpha * (1.0 if t + 1 >= Delta else 0.0)
        coef[t] = (ind + g * lam * ind2) * math.exp(-math.lgamma(t + 1))
    i = np.arange(tmax, dtype=np.float64)
    c2 = coef[2:] * i[2:] * (i[2:] - 1.0)
    ys = np.linspace(0.0, (1.0 - g) * lam, grid_points)
    vals = np.array([np.polynomial.polynomial.polyval(y, c2) for y in ys])
    return ys, vals


def log_concavity_check(samples, tol: float = 1e-9) -> tuple[bool, int | None]:
    """Discrete log-concavity of positive samples on a uniform grid.

    Checks log g[i-1] + log g[i+1] <= 2 log g[i] + tol; returns (ok, index of
    first violation or None). Raises on nonpositive samples.
    """
    g = np.asarray(samples, dtype=np.float64)
    if np.any(g <= 0.0):
        raise ValueError("samples must be positive")
    lg = np.log(g)
    viol = np.nonzero(lg[:-2] + lg[2:] > 2.0 * lg[1:-1] + tol)[0]
    if viol.size:
        return False, int(viol[0]) + 1
    return True, None


def size_biased(mu: DegreeDist) -> DegreeDist:
    """Size-biased offspring law: mu~(t) = (t+1) mu(t+1) / mean(mu)."""
    mean = mu.mean()
    if mean <= 0:
        raise ValueError("distribution must have positive mean")
    t = np.arange(1, mu.pmf.size)
    out = np.zeros(mu.pmf.size - 1 if mu.pmf.size > 1 else 1)
    if mu.pmf.size > 1:
        out[:] = t * mu.pmf[1:] / mean
    return DegreeDist(out / out.sum() if out.sum() > 0 else out)


@dataclass(frozen=True)
class FunctionalBoundReport:
    """Numeric verdicts for the corank-functional bounds at one parameter point."""

    k: int
    alpha: float
    c: float
    Delta: int
    lam: float
    beta: float
    gamma: float
    sup_m_bulk: float
    argmax_m_bulk: float
    sup_m_diff: float
    logconc_ok: bool
    bound_ok: bool      # sup M_mu <= beta/16
    transfer_ok: bool   # sup |M_mu - M_nu| <= beta/32


def functional_bound_report(k: int, alpha: float, c: float, Delta: int,
                            grid_points: int = 2001) -> FunctionalBoundReport:
    """Evaluate the beta/16 and beta/32 bounds and the log-concavity sweep."""
    lam = solve_lambda(k, c)
    tp = TruncPoisson(k, lam)
    law = removal_law(tp, alpha, Delta, c)
    mu = bulk_distribution(law)
    nu = surrogate_distribution(law)
    xstar, sup_mu = max_corank_functional(mu)
    xs = np.linspace(0.0, 1.0, grid_points)
    diffs = np.abs([corank_functional(mu, float(x)) - corank_functional(nu, float(x))
                    for x in xs])
    sup_diff = float(diffs.max())
    _, phi2 = surrogate_pgf2_samples(law)
    if np.any(phi2 <= 0.0):
        logconc = False
    else:
        logconc, _ = log_concavity_check(phi2)
    return FunctionalBoundReport(
        k=k, alpha=alpha, c=c, Delta=int(Delta), lam=lam, beta=law.beta,
        gamma=law.gamma, sup_m_bulk=sup_mu, argmax_m_bulk=xstar,
        sup_m_diff=sup_diff, logconc_ok=bool(logconc),
        bound_ok=bool(sup_mu <= law.beta / 16.0),
        transfer_ok=bool(sup_diff <= law.beta / 32.0),
    )


def find_degree_threshold(k: int, alpha: float, c: float, cap: int = 100) -> tuple[int, FunctionalBoundReport]:
    """Smallest Delta <= cap at which all three functional verdicts hold.

    No closed-form threshold is available, so this reports the empirically
    found one. Raises if none exists below the cap.
    """
    for Delta in range(max(k, 3), cap + 1):
        rep = functional_bound_report(k, alpha, c, Delta)
        if rep.bound_ok and rep.transfer_ok and rep.logconc_ok:
            return Delta, rep
    raise RuntimeError(f"no passing degree threshold found up to {cap}")


# ---------------------------------------------------------------------------
# local ball statistics against the branching-process limit
# ---------------------------------------------------------------------------

_NONTREE = ("<nontree>",)


def ball_shape(G, v: int, radius: int):
    """Canonical shape of the rooted ball of the given radius around v.

    Tree balls canonicalize by recursively sorting child signatures; any ball
    containing a cycle maps to the pooled non-tree bucket.
    """
    dist = {v: 0}
    order = [v]
    head = 0
    while head < len(order):
        u = order[head]
        head += 1
        du = dist[u]
        if du == radius:
            continue
        for w in G.neighbors(u):
            w = int(w)
            if w not in dist:
                dist[w] = du + 1
                order.append(w)
    edges = 0
    for u in order:
        for w in G.neighbors(u):
            w = int(w)
            if w > u and w in dist:
                edges += 1
    if edges != len(order) - 1:
        return _NONTREE

    def canon(u: int, parent: int, du: int):
        if du == radius:
            return ()
        kids = []
        for w in G.neighbors(u):
            w = int(w)
            if w != parent and w in dist and dist[w] == du + 1:
                kids.append(canon(w, u, du + 1))
        return tuple(sorted(kids))

    return canon(v, -1, 0)


def _sample_gw_shape(root_vals, root_pmf, child_vals, child_pmf, radius: int, gen) -> tuple:
    def grow(depth: int) -> tuple:
        if depth == radius:
            return ()
        if depth == 0:
            off = int(gen.choice(root_vals, p=root_pmf))
        else:
            off = int(gen.choice(child_vals, p=child_pmf))
        return tuple(sorted(grow(depth + 1) for _ in range(off)))
    return grow(0)


def local_tv_distance(G, mu: DegreeDist, r: int, samples: int, rng,
                      bootstrap: int = 200):
    """Empirical TV distance between the law of the rooted r-ball at a uniform
    vertex of G and the first r generations of the branching-process tree.

    The graph side is exact (all n roots enumerated, radius r-1 balls); the
    tree side is Monte Carlo with `samples` draws. Non-tree balls are pooled
    into one bucket, which the tree law never hits. Returns (estimate, lo, hi)
    with a bootstrap 99% interval over the tree-side sampling.
    """
    if r > 3:
        raise ValueError("ball radius capped at r = 3")
    if r < 1:
        raise ValueError("r must be positive")
    radius = r - 1
    gen = rng.generator if hasattr(rng, "generator") else rng
    g_counts = Counter(ball_shape(G, v, radius) for v in range(G.n))
    root_vals, root_pmf = mu.support()
    child_vals, child_pmf = size_biased(mu).support()
    draws = [_sample_gw_shape(root_vals, root_pmf, child_vals, child_pmf, radius, gen)
             for _ in range(samples)]
    t_counts = Counter(draws)
    shapes = sorted(set(g_counts) | set(t_counts), key=repr)
    gp = np.array([g_counts.get(s, 0) for s in shapes], dtype=np.float64) / G.n
    tp_ = np.array([t_counts.get(s, 0) for s in shapes], dtype=np.float64) / samples
    tv = 0.5 * float(np.abs(gp - tp_).sum())
    if bootstrap <= 0:
        return tv, tv, tv
    idx = {s: i for i, s in enumerate(shapes)}
    draw_idx = np.array([idx[s] for s in draws])
    tvs = np.empty(bootstrap)
    for b in range(bootstrap):
        res = gen.integers(0, samples, samples)
        cnt = np.bincount(draw_idx[res], minlength=len(shapes)).astype(np.float64)
        tvs[b] = 0.5 * float(np.abs(gp - cnt / samples).sum())
    lo, hi = np.quantile(tvs, [0.005, 0.995])
    return tv, float(lo), float(hi)


def tv_distance_counts(counts, pmf: np.ndarray) -> float:
    """TV distance between an empirical histogram and a reference pmf."""
    counts = np.asarray(counts, dtype=np.float64)
    n = counts.sum()
    if n == 0:
        return 1.0
    width = max(counts.size, pmf.size)
    a = np.zeros(width)
    b = np.zeros(width)
    a[:counts.size] = counts / n
    b[:pmf.size] = pmf
    extra = max(0.0, 1.0 - pmf.sum())  # truncated reference tail
    return 0.5 * (float(np.abs(a - b).sum()) + extra)
