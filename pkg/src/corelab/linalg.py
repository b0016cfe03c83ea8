"""Exact rank, nullspace and certificates over GF(2), GF(p) and the rationals.

GF(2) matrices are bit-packed into Python ints (word-parallel XOR), GF(p)
matrices are dense int64 arrays with p < 2^31. Large GF(p) eliminations run
blocked, with trailing updates done as float64 matrix products split into
15-bit limbs: every partial sum stays below 2^53, so the float arithmetic is
exact and bit-reproducible regardless of BLAS threading.
"""

from __future__ import annotations

from dataclasses import dataclass
import json
import math

import numpy as np

GFP_LIMIT = 1 << 31


# ---------------------------------------------------------------------------
# primes
# ---------------------------------------------------------------------------

def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 3_215_031_751 (covers 2^31)."""
    if n < 2:
        return False
    for q in (2, 3, 5, 7):
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, gen: np.random.Generator) -> int:
    """Uniform-ish random prime with exactly `bits` bits."""
    if not 3 <= bits <= 30:
        raise ValueError("prime size out of supported range")
    lo, hi = 1 << (bits - 1), 1 << bits
    while True:
        c = int(gen.integers(lo, hi)) | 1
        if is_prime(c):
            return c


# ---------------------------------------------------------------------------
# GF(2): bit-packed rows
# ---------------------------------------------------------------------------

class BitMatrix:
    """Dense GF(2) matrix; row i is a Python int with bit j = entry (i, j)."""

    __slots__ = ("n_rows", "n_cols", "rows")

    def __init__(self, n_rows: int, n_cols: int, rows: list[int] | None = None):
        self.n_rows = n_rows
        self.n_cols = n_cols
        mask = (1 << n_cols) - 1
        if rows is None:
            self.rows = [0] * n_rows
        else:
            if len(rows) != n_rows:
                raise ValueError("row count mismatch")
            self.rows = [r & mask for r in rows]

    @classmethod
    def from_dense(cls, a) -> "BitMatrix":
        a = np.asarray(a)
        rows = []
        for i in range(a.shape[0]):
            bits = np.packbits(a[i].astype(np.uint8) & 1, bitorder="little")
            rows.append(int.from_bytes(bits.tobytes(), "little"))
        return cls(a.shape[0], a.shape[1] if a.ndim == 2 else 0, rows)

    @classmethod
    def from_graph(cls, G) -> "BitMatrix":
        rows = [0] * G.n
        for u, v in G.edge_array():
            rows[u] |= 1 << int(v)
            rows[v] |= 1 << int(u)
        return cls(G.n, G.n, rows)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.int64)
        for i, r in enumerate(self.rows):
            while r:
                lsb = r & -r
                out[i, lsb.bit_length() - 1] = 1
                r ^= lsb
        return out

    def matvec(self, v: int) -> int:
        """A v over GF(2), with v and the result packed as ints."""
        out = 0
        for i, r in enumerate(self.rows):
            if (r & v).bit_count() & 1:
                out |= 1 << i
        return out

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.n_rows, self.n_cols, list(self.rows))


def rank_gf2(A: BitMatrix) -> int:
    """Rank over GF(2) by elimination with cached pivot rows."""
    piv: dict[int, int] = {}
    for r in A.rows:
        while r:
            c = r.bit_length() - 1
            q = piv.get(c)
            if q is None:
                piv[c] = r
                break
            r ^= q
    return len(piv)


def nullspace_basis_gf2(A: BitMatrix) -> list[int]:
    """Basis of {v : Av = 0} over GF(2), as packed ints of length n_cols."""
    # Row-reduce to RREF, then read the basis off the free columns.
    piv: dict[int, int] = {}
    pivmask = 0
    for r in A.rows:
        hit = r & pivmask
        while hit:
            r ^= piv[hit.bit_length() - 1]
            hit = r & pivmask
        if r:
            c = r.bit_length() - 1
            for c2, q2 in piv.items():
                if (q2 >> c) & 1:
                    piv[c2] = q2 ^ r
            piv[c] = r
            pivmask |= 1 << c
    basis = []
    for f in range(A.n_cols):
        if f in piv:
            continue
        v = 1 << f
        for c, q in piv.items():
            if (q >> f) & 1:
                v |= 1 << c
        basis.append(v)
    return basis


class Gf2Solver:
    """Prepared GF(2) solver for symmetric A: many right-hand sides e_i, e_i+e_j.

    Precomputes an RREF with its row transform, the kernel, and per-column
    signatures, after which each solve costs O(weight of the solution).
    """

    def __init__(self, A: BitMatrix):
        n = A.n_cols
        if A.n_rows != n:
            raise ValueError("solver requires a square matrix")
        self.n = n
        piv: dict[int, tuple[int, int]] = {}
        pivmask = 0
        zero_tr: list[int] = []
        for i in range(n):
            r, t = A.rows[i], 1 << i
            hit = r & pivmask
            while hit:
                r2, t2 = piv[hit.bit_length() - 1]
                r ^= r2
                t ^= t2
                hit = r & pivmask
            if r == 0:
                zero_tr.append(t)
                continue
            c = r.bit_length() - 1
            # full reduction keeps each pivot column unit
            for c2, (r2, t2) in piv.items():
                if (r2 >> c) & 1:
                    piv[c2] = (r2 ^ r, t2 ^ t)
            piv[c] = (r, t)
            pivmask |= 1 << c
        self.rank = len(piv)
        self.pivcols = sorted(piv)
        ptr = [piv[c][1] for c in self.pivcols]
        # kernel = transforms of zero rows (left kernel; equals the kernel for
        # symmetric A)
        self.kernel = list(zero_tr)
        self._scatter = [1 << c for c in self.pivcols]
        self._pcol = _transpose_bits(ptr, n)
        self._ksig = _transpose_bits(self.kernel, n)

    def signature(self, i: int) -> int:
        """Kernel signature of column i; e_i is consistent iff it is zero."""
        return self._ksig[i]

    def _scatter_bits(self, mask: int) -> int:
        x = 0
        while mask:
            lsb = mask & -mask
            x |= self._scatter[lsb.bit_length() - 1]
            mask ^= lsb
        return x

    def solve_unit(self, i: int) -> int | None:
        """Particular solution of A x = e_i, or None if inconsistent."""
        if self._ksig[i]:
            return None
        return self._scatter_bits(self._pcol[i])

    def solve_pair(self, i: int, j: int) -> int | None:
        """Particular solution of A x = e_i + e_j, or None if inconsistent."""
        if self._ksig[i] != self._ksig[j]:
            return None
        return self._scatter_bits(self._pcol[i] ^ self._pcol[j])


def _transpose_bits(rows: list[int], n_cols: int) -> list[int]:
    """Column ints of a bit matrix given as row ints."""
    k = len(rows)
    if k == 0:
        return [0] * n_cols
    nbytes = (n_cols + 7) // 8
    buf = np.empty((k, nbytes), dtype=np.uint8)
    for t, r in enumerate(rows):
        buf[t] = np.frombuffer(r.to_bytes(nbytes, "little"), dtype=np.uint8)
    bits = np.unpackbits(buf, axis=1, bitorder="little")[:, :n_cols]
    packed = np.packbits(bits.T, axis=1, bitorder="little")
    return [int.from_bytes(packed[i].tobytes(), "little") for i in range(n_cols)]


# ---------------------------------------------------------------------------
# GF(p): dense int64
# ---------------------------------------------------------------------------

class ModMatrix:
    """Dense matrix over GF(p), p a prime below 2^31; entries stored in [0, p)."""

    __slots__ = ("a", "p")

    def __init__(self, a, p: int):
        p = int(p)
        if p >= GFP_LIMIT:
            raise ValueError("modulus must be below 2^31")
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.a = np.asarray(a, dtype=np.int64) % p
        self.p = p
        if self.a.ndim != 2:
            raise ValueError("matrix must be 2-dimensional")

    @property
    def shape(self):
        return self.a.shape


def matmul_mod(F: np.ndarray, U: np.ndarray, p: int) -> np.ndarray:
    """Exact (F @ U) % p for int64 inputs in [0, p), p < 2^31.

    F is split into 15-bit limbs so all float64 partial sums stay below 2^53;
    the inner dimension is chunked to 64 for the same reason.
    """
    k = F.shape[1]
    out = np.zeros((F.shape[0], U.shape[1]), dtype=np.int64)
    for s in range(0, k, 64):
        Fb = F[:, s:s + 64]
        Ub = U[s:s + 64].astype(np.float64)
        hi = np.rint((Fb >> 15).astype(np.float64) @ Ub).astype(np.int64) % p
        lo = np.rint((Fb & 0x7FFF).astype(np.float64) @ Ub).astype(np.int64)
        out += ((hi << 15) + lo) % p
        out %= p
    return out


def _rank_modp_simple(a: np.ndarray, p: int) -> int:
    """Plain row elimination; oracle path and small-matrix path."""
    a = a % p
    n_r, n_c = a.shape
    rank = 0
    for col in range(n_c):
        sub = a[rank:, col]
        nz = np.nonzero(sub)[0]
        if nz.size == 0:
            continue
        pr = rank + int(nz[0])
        if pr != rank:
            a[[rank, pr]] = a[[pr, rank]]
        inv = pow(int(a[rank, col]), p - 2, p)
        a[rank, col:] = a[rank, col:] * inv % p
        f = a[rank + 1:, col]
        if f.any():
            a[rank + 1:, col:] = (a[rank + 1:, col:] - f[:, None] * a[rank, col:][None, :]) % p
        rank += 1
        if rank == n_r:
            break
    return rank


def _rank_modp_blocked(a: np.ndarray, p: int, block: int = 64) -> int:
    """Blocked elimination; float64 BLAS trailing updates via matmul_mod."""
    a = a % p
    n_r, n_c = a.shape
    rank = 0
    col = 0
    while rank < n_r and col < n_c:
        cb = min(block, n_c - col)
        r0 = rank
        f_cols: list[np.ndarray] = []  # multipliers per panel pivot, rows r0..n_r-1
        rp = 0
        for j in range(col, col + cb):
            rstart = r0 + rp
            if rstart >= n_r:
                break
            nz = np.nonzero(a[rstart:, j])[0]
            if nz.size == 0:
                continue
            pr = rstart + int(nz[0])
            if pr != rstart:
                a[[rstart, pr]] = a[[pr, rstart]]
                for fc in f_cols:
                    fc[[rstart - r0, pr - r0]] = fc[[pr - r0, rstart - r0]]
            if rp and col + cb < n_c:
                # catch this row's trailing part up with the earlier panel pivots
                facs = np.array([fc[rstart - r0] for fc in f_cols], dtype=np.int64)
                if facs.any():
                    acc = matmul_mod(facs[None, :], a[r0:rstart, col + cb:], p)
                    a[rstart, col + cb:] = (a[rstart, col + cb:] - acc[0]) % p
            inv = pow(int(a[rstart, j]), p - 2, p)
            a[rstart, col:] = a[rstart, col:] * inv % p
            f = a[rstart + 1:, j].copy()
            fc = np.zeros(n_r - r0, dtype=np.int64)
            fc[rstart + 1 - r0:] = f
            if f.any():
                a[rstart + 1:, col:col + cb] = (
                    a[rstart + 1:, col:col + cb] - f[:, None] * a[rstart, col:col + cb][None, :]
                ) % p
            f_cols.append(fc)
            rp += 1
        if rp and col + cb < n_c and r0 + rp < n_r:
            F = np.stack(f_cols, axis=1)[rp:, :]
            if F.any():
                acc = matmul_mod(F, a[r0:r0 + rp, col + cb:], p)
                a[r0 + rp:, col + cb:] = (a[r0 + rp:, col + cb:] - acc) % p
        rank += rp
        col += cb
    return rank


def rank_mod_p(A: ModMatrix) -> int:
    """Rank over GF(p)."""
    n_r, n_c = A.shape
    if n_r == 0 or n_c == 0:
        return 0
    a = A.a.copy()
    if max(n_r, n_c) <= 128:
        return _rank_modp_simple(a, A.p)
    return _rank_modp_blocked(a, A.p)


# ---------------------------------------------------------------------------
# rational rank
# ---------------------------------------------------------------------------

def fraction_free_rank(A, cap: int = 64) -> int:
    """Exact rational rank by fraction-free (Bareiss) elimination.

    Arbitrary-precision intermediates; the dimension cap bounds their growth.
    """
    a = np.asarray(A)
    n_r, n_c = (a.shape + (0,))[:2] if a.ndim == 2 else (a.shape[0], 0)
    if a.ndim != 2:
        raise ValueError("matrix must be 2-dimensional")
    if max(n_r, n_c, 0) > cap:
        raise ValueError(f"dimension exceeds fraction-free cap {cap}")
    M = [[int(x) for x in row] for row in a]
    prev = 1
    rank = 0
    while rank < min(n_r, n_c):
        pr = pc = -1
        for i in range(rank, n_r):
            for j in range(rank, n_c):
                if M[i][j]:
                    pr, pc = i, j
                    break
            if pr >= 0:
                break
        if pr < 0:
            break
        if pr != rank:
            M[rank], M[pr] = M[pr], M[rank]
        if pc != rank:
            for row in M:
                row[rank], row[pc] = row[pc], row[rank]
        piv = M[rank][rank]
        for i in range(rank + 1, n_r):
            fi = M[i][rank]
            row_i, row_p = M[i], M[rank]
            for j in range(rank + 1, n_c):
                row_i[j] = (row_i[j] * piv - fi * row_p[j]) // prev
            row_i[rank] = 0
        prev = piv
        rank += 1
    return rank


@dataclass(frozen=True)
class RankCertificate:
    """Outcome of a rank computation with its exactness status.

    Any mod-p rank is a lower bound on the rational rank; full rank mod any
    single prime certifies rational nonsingularity, so `certainty` is "exact"
    in that case and "lower-bound" otherwise, with `failure_bound` an upper
    bound on the probability that the true rank is larger.
    """

    rank: int
    method: str
    primes: tuple[int, ...]
    certainty: str
    failure_bound: float
    shape: tuple[int, int]

    @property
    def corank(self) -> int:
        return min(self.shape) - self.rank

    def to_json(self) -> str:
        return json.dumps(
            {
                "rank": self.rank,
                "corank": self.corank,
                "method": self.method,
                "primes": list(self.primes),
                "certainty": self.certainty,
                "failure_bound": self.failure_bound,
                "shape": list(self.shape),
            },
            sort_keys=True,
        )


def _modp_failure_bound(n: int, num_primes: int, prime_bits: int) -> float:
    """P(all sampled primes divide a fixed nonzero n x n 0/1 minor), bounded above.

    A nonzero minor has |det| <= n^(n/2) (Hadamard), hence at most
    log2(n^(n/2))/(prime_bits-1) prime divisors of prime_bits bits. The number
    of prime_bits-bit primes is lower-bounded by x/ln x - 1.26 y/ln y.
    """
    if n <= 1:
        return 0.0
    bad = (n / 2) * math.log2(n) / (prime_bits - 1)
    x, y = 2.0 ** prime_bits, 2.0 ** (prime_bits - 1)
    count = x / math.log(x) - 1.26 * y / math.log(y)
    if count <= 0:
        return 1.0
    return min(1.0, (bad / count) ** num_primes)


def rational_rank(A, num_primes: int = 3, rng=None, prime_bits: int = 30) -> RankCertificate:
    """Rational rank via random-prime modular ranks.

    Returns max rank over `num_primes` random primes. Escalates lazily: a
    full-rank verdict from the first prime is already exact, so later primes
    are only computed when the matrix looks singular.
    """
    a = np.asarray(A, dtype=np.int64)
    gen = _as_generator(rng)
    n_r, n_c = a.shape
    full = min(n_r, n_c)
    primes: list[int] = []
    best = 0
    for _ in range(num_primes):
        p = random_prime(prime_bits, gen)
        while p in primes:
            p = random_prime(prime_bits, gen)
        primes.append(p)
        best = max(best, rank_mod_p(ModMatrix(a, p)))
        if best == full:
            break
    if best == full:
        return RankCertificate(best, "mod-p set", tuple(primes), "exact", 0.0, (n_r, n_c))
    bound = _modp_failure_bound(full, len(primes), prime_bits)
    return RankCertificate(best, "mod-p set", tuple(primes), "lower-bound", bound, (n_r, n_c))


def _as_generator(rng) -> np.random.Generator:
    if rng is None:
        return np.random.default_rng(0)
    if isinstance(rng, np.random.Generator):
        return rng
    return rng.generator  # RngStream


# ---------------------------------------------------------------------------
# incremental symmetric extension
# ---------------------------------------------------------------------------

class GfpAppendState:
    """RREF-with-transform state supporting symmetric row+column appends.

    Holds an n x n symmetric zero-diagonal matrix over GF(p); `append` extends
    it by one vertex (new row and column x with zero diagonal) and returns the
    new rank. The rank increment is always 0, 1 or 2.
    """

    def __init__(self, A, p: int, capacity: int | None = None):
        a = np.asarray(A, dtype=np.int64) % p
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix must be square")
        if np.any(a != a.T) or np.any(np.diag(a)):
            raise ValueError("matrix must be symmetric with zero diagonal")
        if not is_prime(p) or p >= GFP_LIMIT:
            raise ValueError("p must be a prime below 2^31")
        self.p = p
        self.ncur = n
        cap = max(capacity or 0, n + 16)
        self._cap = cap
        # W holds [A-part | transform-part], each with `cap` column slots
        self.W = np.zeros((cap, 2 * cap), dtype=np.int64)
        self.W[:n, :n] = a
        self.W[:n, cap:cap + n] = np.eye(n, dtype=np.int64)
        self.pivots: list[tuple[int, int]] = []  # (col, row)
        self._pivrows: set[int] = set()
        self._reduce_all()

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def _grow(self):
        cap2 = self._cap * 2
        W2 = np.zeros((cap2, 2 * cap2), dtype=np.int64)
        W2[:self.ncur, :self.ncur] = self.W[:self.ncur, :self.ncur]
        W2[:self.ncur, cap2:cap2 + self.ncur] = self.W[:self.ncur, self._cap:self._cap + self.ncur]
        self.W = W2
        self._cap = cap2

    def _rowlen(self) -> int:
        return self._cap + self.ncur

    def _eliminate_col(self, col: int, prow: int):
        """Clear `col` from every other row using the (normalized) pivot row."""
        p, L = self.p, self._rowlen()
        f = self.W[:self.ncur, col].copy()
        f[prow] = 0
        nz = np.nonzero(f)[0]
        if nz.size:
            self.W[nz, :L] = (self.W[nz, :L] - f[nz, None] * self.W[prow, :L][None, :]) % p

    def _make_pivot(self, row: int, col: int):
        p, L = self.p, self._rowlen()
        inv = pow(int(self.W[row, col]), p - 2, p)
        self.W[row, :L] = self.W[row, :L] * inv % p
        self._eliminate_col(col, row)
        self.pivots.append((col, row))
        self._pivrows.add(row)

    def _reduce_all(self):
        for col in range(self.ncur):
            cand = [r for r in range(self.ncur)
                    if r not in self._pivrows and self.W[r, col]]
            if cand:
                self._make_pivot(cand[0], col)

    def append(self, x) -> int:
        """Extend by a new vertex with adjacency column x; returns the new rank."""
        p = self.p
        x = np.asarray(x, dtype=np.int64) % p
        if x.shape != (self.ncur,):
            raise ValueError("appended column has wrong length")
        if self.ncur + 1 > self._cap:
            self._grow()
        n, cap = self.ncur, self._cap
        before = self.rank
        # transformed new column t = E @ x
        E = self.W[:n, cap:cap + n]
        t = matmul_mod(E, x[:, None], p)[:, 0]
        self.W[:n, n] = t
        # new row [x, 0 | e_n]
        self.W[n, :n] = x
        self.W[n, n] = 0
        self.W[n, cap + n] = 1
        self.ncur = n + 1
        # a zero row with a nonzero entry in the new column becomes a pivot
        for r in range(n):
            if r not in self._pivrows and self.W[r, n]:
                self._make_pivot(r, n)
                break
        # reduce the new row against all pivots (rows are mutually reduced, so
        # one pass in any order suffices)
        L = self._rowlen()
        for col, prow in self.pivots:
            f = int(self.W[n, col])
            if f:
                self.W[n, :L] = (self.W[n, :L] - f * self.W[prow, :L]) % p
        lead = np.nonzero(self.W[n, :self.ncur])[0]
        if lead.size:
            self._make_pivot(n, int(lead[0]))
        inc = self.rank - before
        assert inc in (0, 1, 2)
        return self.rank


def append_vertex_rank(state: GfpAppendState, x) -> int:
    """Rank of the symmetric extension of `state` by the 0/1 column x."""
    return state.append(x)
