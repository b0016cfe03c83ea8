"""The executable pipeline: high-degree extraction, corank boosting, the
biased-walk simulator, exhaustive-enumeration uniformity checks, and the
degree-law / corank / singularity experiments.

Every experiment trial is a pure function of (params, stream), so campaigns
replay bit-for-bit from (config, seed) regardless of scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
import math

import numpy as np

from .graphs import Graph, induced_subgraph, within_distance, deg_into
from .linalg import (BitMatrix, GfpAppendState, RankCertificate, fraction_free_rank,
                     random_prime, rational_rank)
from .rng import RngStream
from .samplers import sample_core
from .structure import build_Q, check_ukp_f2, goodness, joined_pairs
from .theory import (TruncPoisson, bulk_distribution, max_corank_functional,
                     removal_law, solve_lambda, tv_distance_counts)


# ---------------------------------------------------------------------------
# extraction
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExtractionResult:
    """The vertex sets produced by the extraction pass, in host-core ids.

    pool is the sampled set; high its members of degree >= degree_threshold;
    biased the low-retained-degree vertices and their distance-2 balls in the
    high-removed graph; entangled the high vertices linked by short paths
    through the biased region; exposed the untouched vertex pool; low the high
    vertices with few exposed neighbors; kept the high vertices that survive.
    """

    pool: np.ndarray
    high: np.ndarray
    biased: np.ndarray
    entangled: np.ndarray
    exposed: np.ndarray
    low: np.ndarray
    kept: np.ndarray
    degree_threshold: int
    k: int


def extract(core: Graph, pool, degree_threshold: int, k: int) -> ExtractionResult:
    """Extraction pass over a minimum-degree-k core.

    Computes, in order: high = {v in pool : deg(v) >= degree_threshold};
    biased = vertices of the high-removed graph with retained degree < k, plus
    everything within distance 2 of one there; entangled = high vertices in a
    pair 6-joined inside the high-plus-biased region; exposed = everything
    outside pool and biased; low = high vertices with fewer than
    sqrt(degree_threshold) exposed neighbors; kept = high minus entangled
    minus low.

    Two guarantees hold deterministically (not just typically): every kept
    vertex has >= sqrt(degree_threshold) exposed neighbors, and for every
    superset U of V minus kept, G[U] has minimum degree >= 2 with no two
    degree-2 vertices within distance 4.
    """
    n = core.n
    pool = np.unique(np.asarray(list(pool), dtype=np.int64)) if not isinstance(pool, np.ndarray) \
        else np.unique(pool.astype(np.int64))
    if pool.size and (pool[0] < 0 or pool[-1] >= n):
        raise ValueError("pool contains out-of-range vertices")
    deg = core.degrees()
    if n and deg.min() < k:
        raise ValueError("host graph must have minimum degree >= k")
    high = pool[deg[pool] >= degree_threshold]
    rest = np.setdiff1d(np.arange(n), high)
    Hrest, rest_ids = induced_subgraph(core, rest)
    lows_local = np.nonzero(Hrest.degrees() < k)[0]
    biased = rest_ids[within_distance(Hrest, lows_local, 2)] if lows_local.size \
        else np.empty(0, dtype=np.int64)
    tb = np.union1d(high, biased)
    Htb, tb_ids = induced_subgraph(core, tb)
    pos = {int(v): i for i, v in enumerate(tb_ids)}
    high_local = [pos[int(v)] for v in high]
    entangled_local = set()
    for u, v in joined_pairs(Htb, high_local, 6):
        entangled_local.add(u)
        entangled_local.add(v)
    entangled = tb_ids[sorted(entangled_local)] if entangled_local else np.empty(0, dtype=np.int64)
    exposed = np.setdiff1d(np.arange(n), np.union1d(biased, pool))
    thresh = math.sqrt(degree_threshold)
    low = np.array([v for v in high if deg_into(core, int(v), exposed) < thresh],
                   dtype=np.int64)
    kept = np.setdiff1d(high, np.union1d(entangled, low))
    return ExtractionResult(pool, high, biased, entangled, exposed, low, kept,
                            int(degree_threshold), int(k))


def check_extraction_guarantees(core: Graph, ex: ExtractionResult,
                                extra_supersets: int = 0, rng: RngStream | None = None) -> bool:
    """Audit the two deterministic extraction guarantees.

    Checks minimum degree >= 2 and the degree-2 pair separation on
    G[V - kept] and on `extra_supersets` random supersets of it, plus the
    exposed-degree floor for every kept vertex. Violations raise.
    """
    thresh = math.sqrt(ex.degree_threshold)
    for v in ex.kept:
        if deg_into(core, int(v), ex.exposed) < thresh:
            raise AssertionError(f"kept vertex {v} below exposed-degree floor")
    base = np.setdiff1d(np.arange(core.n), ex.kept)
    subsets = [base]
    if extra_supersets and ex.kept.size:
        gen = (rng or RngStream(0)).generator
        for _ in range(extra_supersets):
            take = gen.random(ex.kept.size) < 0.5
            subsets.append(np.union1d(base, ex.kept[take]))
    for U in subsets:
        H, _ = induced_subgraph(core, U)
        if H.n == 0:
            continue
        hdeg = H.degrees()
        if hdeg.min() < 2:
            raise AssertionError("superset induced graph has a vertex of degree < 2")
        deg2 = np.nonzero(hdeg == 2)[0]
        for i, a in enumerate(deg2):
            dist = _bounded_dists(H, int(a), 4)
            for b in deg2[i + 1:]:
                if dist.get(int(b), 99) <= 4:
                    raise AssertionError("two degree-2 vertices within distance 4")
    return True


def _bounded_dists(G: Graph, src: int, cutoff: int) -> dict[int, int]:
    dist = {src: 0}
    frontier = [src]
    for _ in range(cutoff):
        nxt = []
        for v in frontier:
            for u in G.neighbors(v):
                u = int(u)
                if u not in dist:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        frontier = nxt
    return dist


# ---------------------------------------------------------------------------
# boosting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoostStep:
    vertex: int
    exposed_degree: int
    corank: int
    good: bool
    spread_ok: bool


@dataclass(frozen=True)
class BoostTrace:
    initial_corank: int
    steps: tuple[BoostStep, ...]
    final_corank: int
    certainty: str
    primes: tuple[int, ...]


@dataclass(frozen=True)
class BoostParams:
    theta: float = 0.05
    eta: float = 0.05
    num_primes: int = 3
    prime_bits: int = 30
    check_structure: bool = True
    append_state_limit: int = 600


def boost(core: Graph, ex: ExtractionResult, params: BoostParams,
          rng: RngStream) -> BoostTrace:
    """Add the kept vertices back one at a time, in fixed ascending-id order,
    recording corank, goodness and the kernel-spread verdict at each step.

    The fixed enumeration order matters: conditioning correctness depends on
    not adapting the order to observed ranks. Coranks carry the multi-prime
    verdict (exact whenever a step is nonsingular mod one prime). Small bases
    update rank incrementally through the symmetric-extension state; large
    bases recompute per step.
    """
    gen = rng.generator
    primes: list[int] = []
    while len(primes) < params.num_primes:
        p = random_prime(params.prime_bits, gen)
        if p not in primes:
            primes.append(p)
    base = np.setdiff1d(np.arange(core.n), ex.kept)
    order = [int(v) for v in np.sort(ex.kept)]
    use_state = core.n <= params.append_state_limit

    Hbase, base_ids = induced_subgraph(core, base)
    states: list[GfpAppendState] = []
    if use_state:
        adj = Hbase.adjacency_dense()
        states = [GfpAppendState(adj, p) for p in primes]
        ranks = [st.rank for st in states]
        cur_rank = max(ranks)
        cur_n = Hbase.n
    else:
        cur_n = Hbase.n
        cur_rank = _max_rank(Hbase, primes)
    coranks = [cur_n - cur_rank]

    current = [int(v) for v in base_ids]
    cur_index = {v: i for i, v in enumerate(current)}
    steps: list[BoostStep] = []
    prev_corank = coranks[0]
    for v in order:
        nbrs = set(int(u) for u in core.neighbors(v))
        if use_state:
            x = np.zeros(len(current), dtype=np.int64)
            for u in nbrs:
                i = cur_index.get(u)
                if i is not None:
                    x[i] = 1
            ranks = [st.append(x) for st in states]
            cur_rank = max(ranks)
            cur_n += 1
        current.append(v)
        cur_index[v] = len(current) - 1
        if not use_state:
            Hc, _ = induced_subgraph(core, np.sort(current))
            cur_n = Hc.n
            cur_rank = _max_rank(Hc, primes)
        corank = cur_n - cur_rank
        if corank > prev_corank + 1:
            raise AssertionError("corank rose by more than 1 in a single step")
        good = True
        spread = True
        if params.check_structure:
            U = np.sort(current)
            rep = goodness(core, U, params.theta, params.eta)
            good = rep.good
            H, ids = induced_subgraph(core, U)
            qhost = build_Q(core, U)
            posmap = {int(w): i for i, w in enumerate(ids)}
            qloc = [posmap[int(w)] for w in qhost]
            spread = check_ukp_f2(BitMatrix.from_graph(H), 2, qloc, params.eta).passed
        steps.append(BoostStep(v, deg_into(core, v, ex.exposed), corank, good, spread))
        prev_corank = corank
    final = coranks[0] if not steps else steps[-1].corank
    certainty = "exact" if final == 0 else "lower-bound"
    return BoostTrace(coranks[0], tuple(steps), final, certainty, tuple(primes))


def _max_rank(H: Graph, primes: list[int]) -> int:
    from .linalg import ModMatrix, rank_mod_p
    if H.n == 0:
        return 0
    adj = H.adjacency_dense()
    best = 0
    for p in primes:
        best = max(best, rank_mod_p(ModMatrix(adj, p)))
        if best == H.n:
            break
    return best


# ---------------------------------------------------------------------------
# biased random walk
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RandomWalkReport:
    p: float
    n_steps: int
    x0: int
    trials: int
    nonzero_end: int
    prob_nonzero: float
    ci: tuple[float, float]
    bound: float          # the 1000p guarantee (may exceed 1)
    audit_ok: bool
    audited_states: int


def random_walk_sim(p: float, n_steps: int, x0: int, trials: int, rng: RngStream,
                    process: str = "adversarial") -> RandomWalkReport:
    """Simulate a nonnegative walk satisfying the drift hypotheses and check
    the end-at-zero guarantee plus the exponential-drift inequality.

    The adversarial process takes the +1 step with probability exactly p
    whenever allowed, else steps down (or holds at zero); "double_down" falls
    by 2 instead. The drift inequality E[Y_{t+1} | X_t = x] <= 2 sqrt(p) Y_t +
    2 sqrt(p), with Y = (1/sqrt p)^X - 1, is audited exactly per visited state
    from the process's known transition law (an empirical conditional mean at
    the large-deviation states would be noise-dominated).
    """
    if not 0.0 <= p < 1.0:
        raise ValueError("p must lie in [0, 1)")
    if x0 > n_steps / 2:
        raise ValueError("starting value must be at most half the horizon")
    if process not in ("adversarial", "double_down"):
        raise ValueError("unknown process")
    drop = 1 if process == "adversarial" else 2
    gen = rng.generator
    x = np.full(trials, x0, dtype=np.int64)
    visited = np.zeros(x0 + n_steps + 2, dtype=bool)
    for _ in range(n_steps):
        for s in np.unique(x):
            visited[s] = True
        up = gen.random(trials) < p
        x = np.where(up, x + 1, np.maximum(x - drop, 0))
    nonzero = int((x != 0).sum())
    from .anticonc import wilson_interval
    ci = wilson_interval(nonzero, trials)
    audit_ok = True
    audited = 0
    if p > 0:
        sq = 1.0 / math.sqrt(p)
        for s in np.nonzero(visited)[0]:
            s = int(s)
            y_up = sq ** (s + 1) - 1.0
            y_dn = sq ** max(s - drop, 0) - 1.0 if s > 0 else 0.0
            mean = p * y_up + (1 - p) * y_dn
            ys = sq ** s - 1.0
            audited += 1
            if mean > 2.0 * math.sqrt(p) * ys + 2.0 * math.sqrt(p) + 1e-12:
                audit_ok = False
    return RandomWalkReport(p, n_steps, x0, trials, nonzero, nonzero / trials,
                            ci, 1000.0 * p, audit_ok, audited)


# ---------------------------------------------------------------------------
# exhaustive-enumeration checks (exact, small n)
# ---------------------------------------------------------------------------

def _mask_graphs(n: int):
    """Edge indexing for graphs on n vertices as 2^C(n,2) bitmasks."""
    pairs = list(combinations(range(n), 2))
    inc = [0] * n
    for e, (u, v) in enumerate(pairs):
        inc[u] |= 1 << e
        inc[v] |= 1 << e
    return pairs, inc


def _mask_adjacency(mask: int, n: int, pairs) -> list[int]:
    adj = [0] * n
    for e, (u, v) in enumerate(pairs):
        if (mask >> e) & 1:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
    return adj


def _mask_core(adj: list[int], n: int, k: int) -> int:
    alive = (1 << n) - 1
    changed = True
    while changed:
        changed = False
        for v in range(n):
            if (alive >> v) & 1 and (adj[v] & alive).bit_count() < k:
                alive &= ~(1 << v)
                changed = True
    return alive


@dataclass(frozen=True)
class RotateCoreReport:
    n: int
    k: int
    host_graphs: int
    conditional_classes: int
    passed: bool
    failure: str | None


def rotate_core_enumeration_check(n: int, k: int) -> RotateCoreReport:
    """Exhaustively verify that, over all 2^C(n,2) host graphs (p = 1/2 makes
    them equiprobable), the conditional law of the k-core given its vertex set
    and edge count is exactly uniform over minimum-degree-k graphs with those
    parameters. Zero tolerance: exact counting.
    """
    pairs, inc = _mask_graphs(n)
    total_edges = len(pairs)
    buckets: dict[tuple[int, int], dict[int, int]] = {}
    for mask in range(1 << total_edges):
        adj = _mask_adjacency(mask, n, pairs)
        alive = _mask_core(adj, n, k)
        emask = 0
        m_core = 0
        for e, (u, v) in enumerate(pairs):
            if (mask >> e) & 1 and (alive >> u) & 1 and (alive >> v) & 1:
                emask |= 1 << e
                m_core += 1
        key = (alive, m_core)
        buckets.setdefault(key, {})
        buckets[key][emask] = buckets[key].get(emask, 0) + 1
    # reference family per vertex set: all min-degree-k graphs with m edges
    families: dict[int, dict[int, set[int]]] = {}
    for alive in set(a for a, _ in buckets):
        verts = [v for v in range(n) if (alive >> v) & 1]
        elist = [e for e, (u, v) in enumerate(pairs)
                 if (alive >> u) & 1 and (alive >> v) & 1]
        fam: dict[int, set[int]] = {}
        for sub in range(1 << len(elist)):
            emask = 0
            for i, e in enumerate(elist):
                if (sub >> i) & 1:
                    emask |= 1 << e
            adj = _mask_adjacency(emask, n, pairs)
            if all((adj[v]).bit_count() >= k for v in verts):
                fam.setdefault(emask.bit_count(), set()).add(emask)
        families[alive] = fam
    for (alive, m_core), counts in buckets.items():
        ref = families[alive].get(m_core, set())
        if alive == 0:
            ref = {0}
        if set(counts) != ref:
            return RotateCoreReport(n, k, 1 << total_edges, len(buckets), False,
                                    f"support mismatch at V={alive:b}, m={m_core}")
        if len(set(counts.values())) != 1:
            return RotateCoreReport(n, k, 1 << total_edges, len(buckets), False,
                                    f"nonuniform counts at V={alive:b}, m={m_core}")
    return RotateCoreReport(n, k, 1 << total_edges, len(buckets), True, None)


def _mask_extract(adj: list[int], n: int, k: int, pool_mask: int, Delta: int):
    """Bitmask mirror of extract() for the exhaustive regime; returns
    (kept_mask, exposed_mask)."""
    full = (1 << n) - 1
    high = 0
    for v in range(n):
        if (pool_mask >> v) & 1 and adj[v].bit_count() >= Delta:
            high |= 1 << v
    rest = full & ~high
    lows = 0
    for v in range(n):
        if (rest >> v) & 1 and (adj[v] & rest).bit_count() < k:
            lows |= 1 << v
    ball = lows
    for _ in range(2):
        grow = ball
        for v in range(n):
            if (ball >> v) & 1:
                grow |= adj[v] & rest
        ball = grow
    biased = ball
    tb = high | biased
    # 6-joined pairs within G[tb]
    entangled = 0
    hv = [v for v in range(n) if (high >> v) & 1]
    for u in hv:
        reach = 1 << u
        frontier = 1 << u
        dist = {u: 0}
        for d in range(1, 7):
            nxt = 0
            fv = frontier
            while fv:
                b = fv & -fv
                x = b.bit_length() - 1
                fv ^= b
                nxt |= adj[x] & tb & ~reach
            if not nxt:
                break
            reach |= nxt
            w = nxt
            while w:
                b = w & -w
                dist[b.bit_length() - 1] = d
                w ^= b
            frontier = nxt
        for v in hv:
            if v != u and v in dist:
                entangled |= (1 << u) | (1 << v)
        # cycle of length <= 6 through u inside G[tb]
        nb = [x for x in range(n) if (adj[u] >> x) & 1 and (tb >> x) & 1]
        cyc = False
        for i, a in enumerate(nb):
            if cyc:
                break
            da = {a: 0}
            frontier = [a]
            for _ in range(4):
                nxt = []
                for x in frontier:
                    t = adj[x] & tb & ~(1 << u)
                    while t:
                        b = t & -t
                        y = b.bit_length() - 1
                        t ^= b
                        if y not in da:
                            da[y] = da[x] + 1
                            nxt.append(y)
                frontier = nxt
            for b2 in nb:
                if b2 != a and b2 in da:
                    cyc = True
                    break
        if cyc:
            entangled |= 1 << u
    exposed = full & ~(biased | pool_mask)
    thresh = math.sqrt(Delta)
    lowm = 0
    for v in hv:
        if (adj[v] & exposed).bit_count() < thresh:
            lowm |= 1 << v
    kept = high & ~(entangled | lowm)
    return kept, exposed


@dataclass(frozen=True)
class UniformityReport:
    n: int
    k: int
    pool: tuple[int, ...]
    degree_threshold: int
    graphs: int
    groups: int
    nontrivial_groups: int
    max_kept: int
    passed: bool
    failure: str | None


def uniformity_test_extraction(n: int, k: int, pool, Delta: int) -> UniformityReport:
    """Exact conditional-uniformity check of the extraction pass.

    Enumerates every minimum-degree-k graph on n vertices (grouped by edge
    count, within which all graphs are equally likely as a conditioned core),
    runs the extraction, conditions on everything except the kept-to-exposed
    bipartite edges plus the exposed degree sequence, and verifies that each
    conditioning class contains every admissible combination of neighborhoods
    exactly once: uniform marginals and joint independence, by exact counting.
    """
    pairs, inc = _mask_graphs(n)
    pool_mask = 0
    for v in pool:
        pool_mask |= 1 << int(v)
    groups: dict[tuple, dict] = {}
    n_graphs = 0
    for mask in range(1 << len(pairs)):
        adj = _mask_adjacency(mask, n, pairs)
        if any(adj[v].bit_count() < k for v in range(n)):
            continue
        n_graphs += 1
        kept, exposed = _mask_extract(adj, n, k, pool_mask, Delta)
        kverts = [v for v in range(n) if (kept >> v) & 1]
        bip = 0
        for e, (u, v) in enumerate(pairs):
            if ((kept >> u) & 1 and (exposed >> v) & 1) or \
               ((kept >> v) & 1 and (exposed >> u) & 1):
                bip |= 1 << e
        frozen = mask & ~bip
        degs = tuple((adj[v] & exposed).bit_count() for v in kverts)
        key = (mask.bit_count(), kept, exposed, frozen, degs)
        nbhds = tuple(adj[v] & exposed for v in kverts)
        g = groups.setdefault(key, {"count": 0, "tuples": set()})
        g["count"] += 1
        g["tuples"].add(nbhds)
    max_kept = 0
    nontrivial = 0
    for (mcount, kept, exposed, frozen, degs), g in groups.items():
        esize = exposed.bit_count()
        expected = 1
        for d in degs:
            expected *= math.comb(esize, d)
        max_kept = max(max_kept, len(degs))
        if len(degs) and expected > 1:
            nontrivial += 1
        if g["count"] != expected or len(g["tuples"]) != expected:
            return UniformityReport(n, k, tuple(sorted(int(v) for v in pool)), Delta,
                                    n_graphs, len(groups), nontrivial, max_kept, False,
                                    f"class with degs={degs}: count {g['count']}, "
                                    f"distinct {len(g['tuples'])}, expected {expected}")
    return UniformityReport(n, k, tuple(sorted(int(v) for v in pool)), Delta,
                            n_graphs, len(groups), nontrivial, max_kept, True, None)


# ---------------------------------------------------------------------------
# experiment trials (pure functions of params + stream)
# ---------------------------------------------------------------------------

def _relabeled_pool(core: Graph, alpha: float, stream: RngStream) -> np.ndarray:
    """First floor(alpha n) vertices after a seeded random relabelling."""
    s = int(alpha * core.n)
    perm = stream.generator.permutation(core.n)
    return np.sort(perm[:s]).astype(np.int64)


def _retained_degrees(core: Graph, high: np.ndarray) -> np.ndarray:
    """deg_{V \\ high}(v) for every v, vectorized over the edge list."""
    deg = core.degrees().copy()
    if high.size == 0:
        return deg
    inT = np.zeros(core.n, dtype=bool)
    inT[high] = True
    e = core.edge_array()
    into = np.zeros(core.n, dtype=np.int64)
    np.add.at(into, e[:, 0], inT[e[:, 1]])
    np.add.at(into, e[:, 1], inT[e[:, 0]])
    return deg - into


def degree_law_trial(params: dict, stream: RngStream) -> dict:
    """One degree-law trial: sample a core, extract the high set, and compare
    the realized histograms to the limit quantities at the realized (n, m)."""
    n, lam_edge = int(params["n"]), float(params["lambda"])
    k, alpha, Delta = int(params["k"]), float(params["alpha"]), int(params["Delta"])
    core, V, m = sample_core(n, lam_edge, k, stream.substream(0))
    if core.n == 0 or 2 * m / core.n <= k:
        return {"empty_core": 1.0}
    c = 2.0 * m / core.n
    lam = solve_lambda(k, c)
    tp = TruncPoisson(k, lam)
    pool = _relabeled_pool(core, alpha, stream.substream(1))
    alpha_eff = pool.size / core.n
    deg = core.degrees()
    high = pool[deg[pool] >= Delta]
    law = removal_law(tp, alpha_eff, Delta, c)
    mu = bulk_distribution(law)
    tv_core = tv_distance_counts(np.bincount(deg), tp._pmf)
    retained = _retained_degrees(core, high)
    keep_mask = np.ones(core.n, dtype=bool)
    keep_mask[high] = False
    tv_bulk = tv_distance_counts(np.bincount(retained[keep_mask]), mu.pmf)
    in_pool = np.zeros(core.n, dtype=bool)
    in_pool[pool] = True
    out_hist = np.bincount(retained[keep_mask & ~in_pool]).astype(np.float64) / core.n
    pool_kept_hist = np.bincount(retained[keep_mask & in_pool]).astype(np.float64) / core.n
    w = max(out_hist.size, law.delta.size)
    dev_delta = 0.5 * float(np.abs(np.pad(out_hist, (0, w - out_hist.size))
                                   - np.pad(law.delta, (0, w - law.delta.size))).sum())
    w2 = max(pool_kept_hist.size, law.delta_prime.size)
    dev_delta_prime = 0.5 * float(np.abs(np.pad(pool_kept_hist, (0, w2 - pool_kept_hist.size))
                                         - np.pad(law.delta_prime, (0, w2 - law.delta_prime.size))).sum())
    return {
        "empty_core": 0.0,
        "core_n": float(core.n),
        "core_m": float(m),
        "high_count": float(high.size),
        "high_frac_dev": abs(high.size / core.n - law.beta),
        "tv_core_rho": tv_core,
        "tv_bulk_mu": tv_bulk,
        "dev_delta": dev_delta,
        "dev_delta_prime": dev_delta_prime,
    }


def corank_trial(params: dict, stream: RngStream) -> dict:
    """One corank trial: corank of the high-removed core against |high|/8, and
    the corank fractions against the functional maxima."""
    n, lam_edge = int(params["n"]), float(params["lambda"])
    k, alpha, Delta = int(params["k"]), float(params["alpha"]), int(params["Delta"])
    num_primes = int(params.get("primes", 3))
    prime_bits = int(params.get("prime_bits", 30))
    core, V, m = sample_core(n, lam_edge, k, stream.substream(0))
    if core.n == 0 or 2 * m / core.n <= k:
        return {"empty_core": 1.0}
    c = 2.0 * m / core.n
    lam = solve_lambda(k, c)
    tp = TruncPoisson(k, lam)
    pool = _relabeled_pool(core, alpha, stream.substream(1))
    deg = core.degrees()
    high = pool[deg[pool] >= Delta]
    gen = stream.substream(2).generator
    rest = np.setdiff1d(np.arange(core.n), high)
    Hrest, _ = induced_subgraph(core, rest)
    cert_rest = rational_rank(Hrest.adjacency_dense(), num_primes, gen, prime_bits) \
        if Hrest.n else RankCertificate(0, "mod-p set", (), "exact", 0.0, (0, 0))
    cert_core = rational_rank(core.adjacency_dense(), num_primes, gen, prime_bits)
    law = removal_law(tp, pool.size / core.n, Delta, c)
    mu = bulk_distribution(law)
    _, max_m_rho = max_corank_functional(tp.as_distribution())
    _, max_m_mu = max_corank_functional(mu)
    return {
        "empty_core": 0.0,
        "core_n": float(core.n),
        "high_count": float(high.size),
        "corank_rest": float(cert_rest.corank),
        "corank_core": float(cert_core.corank),
        "rest_within_eighth": float(cert_rest.corank <= high.size / 8.0),
        "core_within_functional": float(
            cert_core.corank / core.n <= max_m_rho + 0.01),
        "rest_within_functional": float(
            Hrest.n == 0 or cert_rest.corank / Hrest.n <= max_m_mu + 0.01),
        "exact_rest": float(cert_rest.certainty == "exact"),
        "exact_core": float(cert_core.certainty == "exact"),
    }


def singularity_trial(params: dict, stream: RngStream) -> dict:
    """One singularity trial: k-core singularity verdict (multi-prime, with a
    fraction-free recheck at tiny sizes) plus the whole-graph companion at the
    isolated-vertex-dominated density."""
    n, lam_edge = int(params["n"]), float(params["lambda"])
    k = int(params["k"])
    lam_companion = float(params.get("lambda_companion", 2.0))
    num_primes = int(params.get("primes", 3))
    prime_bits = int(params.get("prime_bits", 30))
    core, V, m = sample_core(n, lam_edge, k, stream.substream(0))
    gen = stream.substream(1).generator
    if core.n == 0:
        singular = 0.0  # the empty matrix is nonsingular
        certainty = "exact"
    else:
        cert = rational_rank(core.adjacency_dense(), num_primes, gen, prime_bits)
        singular = float(cert.corank > 0)
        certainty = cert.certainty
        if core.n <= 64:
            ff = fraction_free_rank(core.adjacency_dense())
            if ff != cert.rank:
                raise AssertionError("fraction-free recheck disagrees with multi-prime rank")
            certainty = "exact"
    from .samplers import gnp
    G2 = gnp(n, min(1.0, lam_companion / n), stream.substream(2))
    cert2 = rational_rank(G2.adjacency_dense(), num_primes, gen, prime_bits)
    return {
        "core_n": float(core.n),
        "singular_core": singular,
        "exact_core": float(certainty == "exact"),
        "singular_whole": float(cert2.corank > 0),
    }


def boost_trial(params: dict, stream: RngStream) -> dict:
    """One boosting trial: extraction, initial corank against |kept|/2, then
    the add-back walk down to the final corank."""
    n, lam_edge = int(params["n"]), float(params["lambda"])
    k, alpha, Delta = int(params["k"]), float(params["alpha"]), int(params["Delta"])
    theta, eta = float(params.get("theta", 0.05)), float(params.get("eta", 0.05))
    check_structure = bool(int(params.get("check_structure", 1)))
    core, V, m = sample_core(n, lam_edge, k, stream.substream(0))
    if core.n == 0:
        return {"empty_core": 1.0}
    pool = _relabeled_pool(core, alpha, stream.substream(1))
    ex = extract(core, pool, Delta, k)
    check_extraction_guarantees(core, ex)
    bp = BoostParams(theta=theta, eta=eta,
                     num_primes=int(params.get("primes", 3)),
                     prime_bits=int(params.get("prime_bits", 30)),
                     check_structure=check_structure)
    trace = boost(core, ex, bp, stream.substream(2))
    increments = [trace.steps[0].corank - trace.initial_corank] if trace.steps else []
    for a, b in zip(trace.steps, trace.steps[1:]):
        increments.append(b.corank - a.corank)
    inc_ok = all(i in (-2, -1, 0, 1) for i in increments)
    return {
        "empty_core": 0.0,
        "core_n": float(core.n),
        "kept": float(ex.kept.size),
        "high_count": float(ex.high.size),
        "initial_corank": float(trace.initial_corank),
        "final_corank": float(trace.final_corank),
        "initial_within_half": float(trace.initial_corank <= ex.kept.size / 2.0),
        "final_zero": float(trace.final_corank == 0),
        "increments_ok": float(inc_ok),
        "good_all": float(all(s.good for s in trace.steps)) if trace.steps else 1.0,
        "spread_all": float(all(s.spread_ok for s in trace.steps)) if trace.steps else 1.0,
    }


def random_walk_trial(params: dict, stream: RngStream) -> dict:
    """One batch of synthetic walks with the per-state drift audit."""
    rep = random_walk_sim(float(params["p"]), int(params["steps"]), int(params["x0"]),
                          int(params.get("batch", 10_000)), stream,
                          process=str(params.get("process", "adversarial")))
    return {
        "batch": float(rep.trials),
        "nonzero_end": float(rep.nonzero_end),
        "audit_ok": float(rep.audit_ok),
        "audited_states": float(rep.audited_states),
    }


def ukp_trial(params: dict, stream: RngStream) -> dict:
    """One kernel-spread trial on a sampled core."""
    n, lam_edge = int(params["n"]), float(params["lambda"])
    k = int(params["k"])
    eta = float(params.get("eta", 0.05))
    ell = int(params.get("ell", 2))
    core, V, m = sample_core(n, lam_edge, k, stream.substream(0))
    if core.n == 0:
        return {"empty_core": 1.0}
    qhost = build_Q(core, np.arange(core.n))
    rep = check_ukp_f2(BitMatrix.from_graph(core), ell, [int(q) for q in qhost], eta)
    return {
        "empty_core": 0.0,
        "core_n": float(core.n),
        "passed": float(rep.passed),
        "corank_gf2": float(rep.corank),
        "q_size": float(len(rep.Q)),
    }
