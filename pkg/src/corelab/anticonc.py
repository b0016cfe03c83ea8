"""Atom probabilities of linear and quadratic forms on the Boolean slice.

Exact mode enumerates d-subsets with exact integer/rational arithmetic (atom
probabilities are about exact equality, where floats lie, so float inputs are
rejected there); Monte Carlo mode samples subsets in vectorized batches and
reports Wilson intervals. The coupled sampler realizes the slice through a
random injection plus Rademacher signs, which is the correctness hinge for
the quadratic bound's proof machinery.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from collections import Counter
import math

import numpy as np


@dataclass(frozen=True)
class SliceSpec:
    """The slice {x in {0,1}^n : sum x = d}."""

    n: int
    d: int

    def __post_init__(self):
        if not 0 <= self.d <= self.n:
            raise ValueError("need 0 <= d <= n")

    @property
    def count(self) -> int:
        return math.comb(self.n, self.d)


def wilson_interval(successes: int, trials: int, z: float = 2.576) -> tuple[float, float]:
    """Wilson score interval (default z for 99%); well-behaved near 0 and 1."""
    if trials == 0:
        return 0.0, 1.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def _exact_values(v) -> list:
    out = []
    for x in v:
        if isinstance(x, Fraction):
            out.append(x)
        elif isinstance(x, (int, np.integer)):
            out.append(int(x))
        else:
            raise TypeError("exact mode requires integer or Fraction entries")
    return out


def _iter_subset_sums(vals: list, n: int, d: int):
    """Running sums over all d-subsets (one add/remove per step)."""
    idx = list(range(d))
    if d == 0:
        yield 0
        return
    s = sum(vals[i] for i in idx)
    while True:
        yield s
        # advance to next combination in lexicographic order
        j = d - 1
        while j >= 0 and idx[j] == n - d + j:
            j -= 1
        if j < 0:
            return
        s -= vals[idx[j]]
        idx[j] += 1
        s += vals[idx[j]]
        for k in range(j + 1, d):
            s -= vals[idx[k]]
            idx[k] = idx[k - 1] + 1
            s += vals[idx[k]]


ENUM_CAP = 10_000_000


def slice_atom_exact(v, spec: SliceSpec, target) -> Fraction:
    """Exact P(v . x = target) for x uniform on the slice, by enumeration."""
    if spec.count > ENUM_CAP:
        raise ValueError(f"C({spec.n},{spec.d}) exceeds the enumeration cap")
    vals = _exact_values(v)
    if len(vals) != spec.n:
        raise ValueError("vector length mismatch")
    target = Fraction(target) if isinstance(target, Fraction) else target
    if not isinstance(target, (int, Fraction)):
        raise TypeError("exact mode requires an integer or Fraction target")
    hits = sum(1 for s in _iter_subset_sums(vals, spec.n, spec.d) if s == target)
    return Fraction(hits, spec.count)


def slice_atom_spectrum(v, spec: SliceSpec) -> Counter:
    """All atom counts {value: number of d-subsets}; max gives the max atom."""
    if spec.count > ENUM_CAP:
        raise ValueError(f"C({spec.n},{spec.d}) exceeds the enumeration cap")
    vals = _exact_values(v)
    return Counter(_iter_subset_sums(vals, spec.n, spec.d))


def _sample_slices(spec: SliceSpec, count: int, gen: np.random.Generator) -> np.ndarray:
    """(count, d) index arrays of uniform d-subsets (via random-key selection)."""
    keys = gen.random((count, spec.n))
    return np.argpartition(keys, spec.d - 1, axis=1)[:, :spec.d] if spec.d else \
        np.empty((count, 0), dtype=np.int64)


def slice_atom_mc(v, spec: SliceSpec, target, trials: int, rng,
                  z: float = 2.576) -> tuple[float, float, float]:
    """Monte Carlo estimate of P(v . x = target) with a Wilson interval.

    Integer inputs keep sums exact; returns (estimate, lo, hi).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    gen = rng.generator if hasattr(rng, "generator") else rng
    varr = np.asarray(v)
    hits = 0
    chunk = max(1, min(trials, 200_000))
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        idx = _sample_slices(spec, c, gen)
        sums = varr[idx].sum(axis=1) if spec.d else np.zeros(c, dtype=varr.dtype)
        hits += int((sums == target).sum())
        done += c
    lo, hi = wilson_interval(hits, trials, z)
    return hits / trials, lo, hi


def quad_slice_atom(M, v, spec: SliceSpec, target, mode: str = "exact",
                    trials: int = 100_000, rng=None, z: float = 2.576):
    """P(x^T M x + v^T x = target) on the slice.

    Exact mode enumerates subsets (M, v integer/Fraction); mc mode returns
    (estimate, lo, hi). For 0/1 x, x^T M x sums M over the index pairs of x's
    support, diagonal included once, symmetric pairs twice.
    """
    n = spec.n
    Marr = np.asarray(M)
    if Marr.shape != (n, n):
        raise ValueError("matrix shape mismatch")
    if mode == "exact":
        if spec.count > ENUM_CAP:
            raise ValueError("enumeration cap exceeded")
        vals = _exact_values(v)
        Mint = [_exact_values(row) for row in Marr]
        hits = 0
        for combo in _iter_subsets(n, spec.d):
            s = sum(vals[i] for i in combo)
            q = 0
            for a in range(len(combo)):
                ia = combo[a]
                q += Mint[ia][ia]
                for b in range(a + 1, len(combo)):
                    q += 2 * Mint[ia][combo[b]]
            if q + s == target:
                hits += 1
        return Fraction(hits, spec.count)
    if mode != "mc":
        raise ValueError("mode must be 'exact' or 'mc'")
    if spec.d > spec.n // 2:
        raise ValueError("mc mode requires d <= n/2")
    gen = rng.generator if hasattr(rng, "generator") else rng
    varr = np.asarray(v, dtype=np.float64)
    Mf = Marr.astype(np.float64)
    hits = 0
    chunk = max(1, min(trials, 50_000))
    done = 0
    while done < trials:
        c = min(chunk, trials - done)
        idx = _sample_slices(spec, c, gen)
        X = np.zeros((c, n))
        np.put_along_axis(X, idx, 1.0, axis=1)
        quad = ((X @ Mf) * X).sum(axis=1) + X @ varr
        hits += int((quad == target).sum())
        done += c
    lo, hi = wilson_interval(hits, trials, z)
    return hits / trials, lo, hi


def _iter_subsets(n: int, d: int):
    from itertools import combinations
    return combinations(range(n), d)


def coupled_slice_sampler(spec: SliceSpec, rng) -> np.ndarray:
    """One slice vector via the injection-plus-signs coupling.

    Draws a uniformly random injection pi: {1..2d} -> {1..n} and d Rademacher
    signs; position pi(i) gets the 1 when the sign is +, else pi(i+d) does.
    The marginal is uniform on the slice.
    """
    n, d = spec.n, spec.d
    if 2 * d > n:
        raise ValueError("coupling requires 2d <= n")
    gen = rng.generator if hasattr(rng, "generator") else rng
    pi = gen.permutation(n)[:2 * d]
    xi = gen.integers(0, 2, d)
    x = np.zeros(n, dtype=np.int64)
    x[np.where(xi == 1, pi[:d], pi[d:])] = 1
    return x


def coupled_slice_batch(spec: SliceSpec, count: int, rng) -> np.ndarray:
    """(count, n) matrix of coupled-sampler draws (same coupling, batched)."""
    n, d = spec.n, spec.d
    if 2 * d > n:
        raise ValueError("coupling requires 2d <= n")
    gen = rng.generator if hasattr(rng, "generator") else rng
    out = np.zeros((count, n), dtype=np.int64)
    done = 0
    while done < count:
        c = min(200_000, count - done)
        keys = gen.random((c, n))
        order = np.argsort(keys, axis=1)[:, :2 * d]
        xi = gen.integers(0, 2, (c, d))
        pos = np.where(xi == 1, order[:, :d], order[:, d:2 * d])
        np.put_along_axis(out[done:done + c], pos, 1, axis=1)
        done += c
    return out


def chi_square_uniform(counts, alpha: float = 0.001) -> tuple[bool, float, float]:
    """Chi-square goodness-of-fit against the uniform law over the observed cells.

    Returns (accept, statistic, critical value at the given level).
    """
    from scipy.stats import chi2

    counts = np.asarray(counts, dtype=np.float64)
    total = counts.sum()
    k = counts.size
    if k < 2 or total == 0:
        raise ValueError("need at least two cells with observations")
    expected = total / k
    stat = float(((counts - expected) ** 2 / expected).sum())
    crit = float(chi2.ppf(1.0 - alpha, k - 1))
    return stat < crit, stat, crit


def azuma_injection_bound(c, t: float) -> float:
    """Concentration bound 2 exp(-t^2 / (8 sum c_i^2)) for functions of a
    uniformly random injection with per-coordinate influences c_i.

    Returned as the raw formula value (can exceed 1; callers clamp)."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    c = np.asarray(c, dtype=np.float64)
    if np.any(c < 0):
        raise ValueError("influences must be nonnegative")
    s = float((c * c).sum())
    if s == 0:
        return 0.0 if t > 0 else 2.0
    return 2.0 * math.exp(-t * t / (8.0 * s))
