"""The enumeration order of nonzero subspaces and its rank/unrank maps.

Order: ambient bound ascending, then dimension ascending, then the tuple of
RREF row serials lexicographically.  Blocks grow like the Galois numbers, and
the subspaces met by the construction live in ambient spaces of dimension
60 and more, so ranks are computed by counting rather than by listing blocks.

Counting.  Fix the ambient bound n and dimension d.  After choosing the first
rows of an RREF basis we know the last pivot ``c``, the set ``F`` of columns
where some chosen row is nonzero, and whether column n-1 is already hit.
The remaining k rows pick pivots from ``A = (c, n-1] minus F``; a row with
pivot a has a free digit at every later column that is not a pivot, so the
number of completions is

    p^(-C(k,2)) * e_k(p^(n-1-a) : a in A)

with e_k the elementary symmetric polynomial, minus the completions that
never touch column n-1 when it is not yet hit.  Summing this over all rows
smaller than a given one is a digit DP over columns from the top down.
"""
from __future__ import annotations

import threading
from bisect import bisect_right
from functools import lru_cache

from .field import FieldPrime
from .subspace import Subspace

__all__ = [
    "gaussian_binomial",
    "galois_number",
    "block_sizes",
    "block_offset",
    "completions",
    "rank",
    "unrank",
    "count_upto",
]


@lru_cache(maxsize=None)
def gaussian_binomial(n: int, k: int, p: int) -> int:
    """Number of k-dimensional subspaces of GF(p)^n."""
    if k < 0 or k > n:
        return 0
    if k == 0 or k == n:
        return 1
    return gaussian_binomial(n - 1, k - 1, p) + p ** k * gaussian_binomial(n - 1, k, p)


@lru_cache(maxsize=None)
def galois_number(n: int, p: int) -> int:
    """Total number of subspaces of GF(p)^n, zero space included."""
    return sum(gaussian_binomial(n, k, p) for k in range(n + 1))


def block_sizes(up_to_n: int, field: FieldPrime = FieldPrime(2)) -> list[int]:
    """Sizes of the blocks New(1), ..., New(up_to_n)."""
    p = field.p
    return [galois_number(m, p) - galois_number(m - 1, p) for m in range(1, up_to_n + 1)]


def count_upto(n: int, p: int) -> int:
    """Number of nonzero subspaces with ambient bound at most n."""
    return galois_number(n, p) - 1


def _dim_block(n: int, d: int, p: int) -> int:
    """Number of d-dimensional subspaces with ambient bound exactly n."""
    return gaussian_binomial(n, d, p) - gaussian_binomial(n - 1, d, p)


@lru_cache(maxsize=4096)
def block_offset(n: int, d: int, p: int) -> int:
    """Id of the first subspace with ambient bound n and dimension d."""
    return count_upto(n - 1, p) + sum(_dim_block(n, e, p) for e in range(1, d))


def _esym(xs: list[int], k: int) -> int:
    e = [1] + [0] * k
    for x in xs:
        for j in range(k, 0, -1):
            e[j] += x * e[j - 1]
    return e[k]


def completions(field: FieldPrime, n: int, c_last: int, fmask: int, k: int) -> int:
    """Number of ways to append k RREF rows after a prefix.

    The prefix has last pivot ``c_last`` and support mask ``fmask``; the
    result counts completions whose span has ambient bound exactly n.
    """
    if k < 0:
        return 0
    p = field.p
    avail = [a for a in range(c_last + 1, n) if not fmask >> a & 1]
    q = p ** (k * (k - 1) // 2)
    total = _esym([p ** (n - 1 - a) for a in avail], k)
    if not fmask >> (n - 1) & 1:
        low = _esym([p ** (n - 1 - a) for a in avail if a != n - 1], k)
        assert low % p ** k == 0
        return (total - low // p ** k) // q
    return total // q


def _count_below(field: FieldPrime, n: int, c_last: int, fmask: int, k: int, R: int) -> int:
    """Sum of completions(prefix + r) over admissible next rows r < R.

    k counts the rows still to place including r.
    """
    p = field.p
    kk = k - 1
    if kk < 0:
        return 0
    digit = field.digit
    cov = fmask >> (n - 1) & 1
    size = kk + 1
    eq = [0] * size
    eq[0] = 1
    lt = [0] * size
    # second DP: rows r that leave column n-1 untouched, with that column
    # removed from the pivot pool (only needed while n-1 is not yet hit)
    equ = [0] * size
    equ[0] = 1
    ltu = [0] * size
    main = 0
    sub = 0
    below_R = [0] * (n + 1)  # below_R[a]: R has a nonzero digit under a
    acc = 0
    for a in range(n):
        below_R[a] = acc
        if digit(R, a):
            acc = 1
    # number of pool columns strictly below each position, for truncation
    pool_below = 0
    for a in range(c_last + 1, n):
        if not fmask >> a & 1:
            pool_below += 1
    for a in range(n - 1, c_last, -1):
        in_pool = not fmask >> a & 1
        if in_pool:
            pool_below -= 1
        Ra = digit(R, a)
        if in_pool:
            # row r has its pivot here
            take_eq = Ra > 1 or (Ra == 1 and below_R[a])
            main += lt[kk] + (eq[kk] if take_eq else 0)
            if not cov and a != n - 1:
                sub += ltu[kk] + (equ[kk] if take_eq else 0)
        if a == c_last + 1:
            break
        lo = kk - pool_below
        if lo < 0:
            lo = 0
        if in_pool:
            x = p ** (n - 1 - a)
            # lt: all digits -> p + t*x ; eq->lt: digits < Ra -> Ra + t*x (if Ra>0)
            # eq->eq: digit Ra -> (1 + t*x) if Ra == 0 else 1
            nlt = [0] * size
            neq = [0] * size
            for j in range(lo, size):
                v = p * lt[j]
                if j:
                    v += x * lt[j - 1]
                if Ra:
                    v += Ra * eq[j]
                    if j:
                        v += x * eq[j - 1]
                    neq[j] = eq[j]
                else:
                    w = eq[j]
                    if j:
                        w += x * eq[j - 1]
                    neq[j] = w
                nlt[j] = v
            lt, eq = nlt, neq
            if not cov:
                if a == n - 1:
                    # column n-1 forced to zero and removed from the pool
                    if Ra:
                        ltu = equ
                        equ = [0] * size
                else:
                    nlt = [0] * size
                    neq = [0] * size
                    for j in range(lo, size):
                        v = p * ltu[j]
                        if j:
                            v += x * ltu[j - 1]
                        if Ra:
                            v += Ra * equ[j]
                            if j:
                                v += x * equ[j - 1]
                            neq[j] = equ[j]
                        else:
                            w = equ[j]
                            if j:
                                w += x * equ[j - 1]
                            neq[j] = w
                        nlt[j] = v
                    ltu, equ = nlt, neq
        else:
            # column already used by an earlier row: every digit is free
            for j in range(lo, size):
                lt[j] = p * lt[j] + Ra * eq[j]
            if not cov:
                for j in range(lo, size):
                    ltu[j] = p * ltu[j] + Ra * equ[j]
    q = p ** (kk * (kk - 1) // 2)
    out = main // q
    if sub:
        out -= sub // (q * p ** kk)
    return out


def _prefix_walk(field: FieldPrime, rows):
    """Yield (c_last, fmask) before each row."""
    c_last, fmask = -1, 0
    for r in rows:
        yield c_last, fmask
        c_last = field.lead(r)
        fmask |= field.support(r)


class _RankMemo:
    """Remembers the partial sums of the last ranked subspace.

    Successive subspaces produced by the construction share long row
    prefixes, so most of the work of ranking can be reused.
    """

    def __init__(self):
        self.lock = threading.Lock()
        self.key = None
        self.rows = ()
        self.partial = [0]

    def rank(self, U: Subspace) -> int:
        F = U.field
        p = F.p
        rows = U.rows
        n = U.ambient
        d = len(rows)
        key = (p, n, d)
        with self.lock:
            if key == self.key:
                j = 0
                old = self.rows
                while j < d and rows[j] == old[j]:
                    j += 1
                partial = self.partial[: j + 1]
            else:
                j = 0
                partial = [0]
        c_last, fmask = -1, 0
        for r in rows[:j]:
            c_last = F.lead(r)
            fmask |= F.support(r)
        for i in range(j, d):
            r = rows[i]
            partial.append(partial[-1] + _count_below(F, n, c_last, fmask, d - i, r))
            c_last = F.lead(r)
            fmask |= F.support(r)
        with self.lock:
            self.key, self.rows, self.partial = key, rows, partial
        return block_offset(n, d, p) + partial[-1]


_memo = _RankMemo()


def rank(U: Subspace) -> int:
    """Position of a nonzero subspace in the enumeration."""
    if not U.rows:
        raise ValueError("the zero subspace has no rank")
    return _memo.rank(U)


def unrank(id: int, field: FieldPrime = FieldPrime(2)) -> Subspace:
    """The subspace with the given position."""
    if id < 0:
        raise ValueError("ids are non-negative")
    p = field.p
    n = 1
    while count_upto(n, p) <= id:
        n += 1
    rem = id - count_upto(n - 1, p)
    d = 1
    while rem >= _dim_block(n, d, p):
        rem -= _dim_block(n, d, p)
        d += 1
    rows = []
    c_last, fmask = -1, 0
    hi_all = p ** n
    for i in range(d):
        k = d - i
        # largest r with count_below(r) <= rem
        lo, hi = 0, hi_all  # invariant: cb(lo) <= rem < cb(hi)
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _count_below(field, n, c_last, fmask, k, mid) <= rem:
                lo = mid
            else:
                hi = mid
        r = lo
        rem -= _count_below(field, n, c_last, fmask, k, r)
        rows.append(r)
        c_last = field.lead(r)
        fmask |= field.support(r)
    U = Subspace(tuple(rows), field)
    U._id = id
    return U
