"""Least superspace of a given subspace that comes after a given bound.

``least_superspace_after(W, M)`` returns the first subspace U in the
enumeration order with ``U > M`` and ``W <= U``.  Scanning ids one by one is
hopeless once the ambient dimension reaches a few dozen, so the search walks
RREF bases row by row instead.

A partial basis (the rows fixed so far) is summarised by

* ``c_last``: pivot of the last fixed row,
* ``fmask``: columns where some fixed row is nonzero,
* ``cov``: whether some fixed row touches column n-1,
* ``w``: the part of W still to be produced, i.e. W reduced by the fixed
  rows, kept in RREF as a list sorted by pivot,
* ``k``: number of rows still to place.

Every pivot of ``w`` must become a pivot of a later row, so those columns
are off limits for the fixed rows; ``feasible`` checks that enough unused
columns remain.  The next row either has its pivot before the first pivot L
of ``w`` (leaving ``w`` untouched) or exactly at L, in which case it equals
``w_L`` minus some vector Z whose leading column q becomes a new pivot of
``w``.  For each shape the least admissible row above a bound is a small
digit problem, solved by ``_solve``.
"""
from __future__ import annotations

from .field import FieldPrime
from .subspace import Subspace

__all__ = ["least_superspace_after", "block_least"]


def _popcount(x: int) -> int:
    return bin(x).count("1")


class _State:
    __slots__ = ("rows", "c_last", "fmask", "w", "pmask", "cov", "k")

    def __init__(self, rows, c_last, fmask, w, pmask, cov, k):
        self.rows = rows
        self.c_last = c_last
        self.fmask = fmask
        self.w = w
        self.pmask = pmask
        self.cov = cov
        self.k = k


class _Search:
    """Search context for a fixed field and ambient bound n."""

    def __init__(self, field: FieldPrime, n: int):
        self.F = field
        self.n = n
        self.full = (1 << n) - 1
        self.top = 1 << (n - 1)
        self.binary = field.p == 2

    # -- states ---------------------------------------------------------
    def reaches_top(self, w) -> bool:
        if self.binary:
            top = self.top
            for x in w:
                if x & top:
                    return True
            return False
        F, n = self.F, self.n
        return any(F.digit(x, n - 1) for x in w)

    def feasible(self, st: _State) -> bool:
        dw = len(st.w)
        k = st.k
        if dw > k:
            return False
        if st.pmask & st.fmask:
            return False
        pool = self.full & ~((1 << (st.c_last + 1)) - 1) & ~st.fmask
        if _popcount(pool & ~st.pmask) < k - dw:
            return False
        if not (st.cov or k > dw or self.reaches_top(st.w)):
            return False
        return True

    def start(self, W: Subspace, d: int) -> _State | None:
        F = self.F
        w = list(W.rows)
        pmask = 0
        for x in w:
            pmask |= 1 << F.lead(x)
        st = _State((), -1, 0, w, pmask, False, d)
        return st if self.feasible(st) else None

    def advance(self, st: _State, r: int) -> _State | None:
        F = self.F
        c = F.lead(r)
        if c <= st.c_last or st.fmask >> c & 1 or st.k == 0:
            return None
        w = st.w
        L = F.lead(w[0]) if w else self.n
        if c > L:
            return None
        pmask = st.pmask
        if c == L:
            # w_L - r must be produced by later rows
            z = F.axpy(-1, r, w[0])
            rest = w[1:]
            pmask &= ~(1 << L)
            if z:
                for x in rest:
                    z = F.reduce_at(z, x, F.lead(x))
                if z:
                    z = F.normalize_lead(z)
                    q = F.lead(z)
                    if pmask >> q & 1:
                        return None
                    rest = [F.reduce_at(x, z, q) for x in rest]
                    # insert z keeping pivot order
                    i = 0
                    while i < len(rest) and F.lead(rest[i]) < q:
                        i += 1
                    rest.insert(i, z)
                    pmask |= 1 << q
            w = rest
        if self.binary:
            cov = st.cov or bool(r & self.top)
            fmask = st.fmask | r
        else:
            cov = st.cov or bool(F.digit(r, self.n - 1))
            fmask = st.fmask | F.support(r)
        nst = _State(st.rows + (r,), c, fmask, w, pmask, cov, st.k - 1)
        return nst if self.feasible(nst) else None

    # -- least next row ---------------------------------------------------
    def _solve(self, fmask, fval, costly, budget, need_top, bound):
        """Least X with the forced digits, cost <= budget and X > bound.

        ``fmask``/``fval`` give forced positions and their digits; a nonzero
        digit on a ``costly`` position costs 1; ``need_top`` asks for a
        nonzero digit at n-1.  ``bound`` of None means no lower bound.
        """
        if budget < 0:
            return None
        n = self.n
        if self.binary:
            one = fval
            zero = fmask & ~fval
            if need_top:
                if zero & self.top:
                    return None
                one |= self.top
            if bound is None:
                if _popcount(one & costly) <= budget:
                    return one
                return None
            if bound >> n:
                return None
            bad = (bound & zero) | (one & ~bound)
            t = bad.bit_length() - 1
            cand = ~bound & ~zero & self.full
            if t > 0:
                cand &= ~((1 << t) - 1)
            while cand:
                low = cand & -cand
                i = low.bit_length() - 1
                x = (bound >> (i + 1) << (i + 1)) | low | (one & (low - 1))
                if _popcount(x & costly) <= budget:
                    return x
                cand ^= low
            return None
        return self._solve_digits(fmask, fval, costly, budget, need_top, bound)

    def _solve_digits(self, fmask, fval, costly, budget, need_top, bound):
        F, n, p = self.F, self.n, self.F.p
        forced = {i: F.digit(fval, i) for i in range(n) if fmask >> i & 1}

        def lo_digit(i):
            if i in forced:
                d = forced[i]
                if i == n - 1 and need_top and d == 0:
                    return None
                return d
            return 1 if (i == n - 1 and need_top) else 0

        def digit_above(i, b):
            """Least allowed digit at i strictly above b."""
            if i in forced:
                d = forced[i]
                ok = d > b and not (i == n - 1 and need_top and d == 0)
                return d if ok else None
            return b + 1 if b + 1 < p else None

        def allowed(i, d):
            if i == n - 1 and need_top and d == 0:
                return False
            if i in forced:
                return forced[i] == d
            return True

        def cost(i, d):
            return 1 if d and costly >> i & 1 else 0

        fill = []
        fill_cost = [0]
        for i in range(n):
            d = lo_digit(i)
            fill.append(d)
            fill_cost.append(None if d is None or fill_cost[-1] is None else fill_cost[-1] + cost(i, d))
        if bound is None:
            if fill_cost[n] is None or fill_cost[n] > budget:
                return None
            return F.from_digits(fill)
        if bound >= p ** n:
            return None
        bd = F.digits(bound)
        bd += [0] * (n - len(bd))
        # ok_above[i]: digits of bound at positions >= i are all allowed
        ok_above = [True] * (n + 1)
        cost_above = [0] * (n + 1)
        for i in range(n - 1, -1, -1):
            ok_above[i] = ok_above[i + 1] and allowed(i, bd[i])
            cost_above[i] = cost_above[i + 1] + cost(i, bd[i])
        for i in range(n):
            if not ok_above[i + 1] or fill_cost[i] is None:
                continue
            d = digit_above(i, bd[i])
            if d is None:
                continue
            total = cost_above[i + 1] + cost(i, d) + fill_cost[i]
            if total <= budget:
                return F.from_digits(fill[:i] + [d] + bd[i + 1:])
        return None

    def min_row(self, st: _State, bound) -> int | None:
        """Least row r > bound such that advancing by r stays feasible."""
        if st.k == 0:
            return None
        F, n, full = self.F, self.n, self.full
        w = st.w
        dw = len(w)
        L = F.lead(w[0]) if w else n
        pmask = st.pmask
        pool = full & ~((1 << (st.c_last + 1)) - 1) & ~st.fmask
        best = None

        # pivot c before L: w is left alone
        if dw <= st.k - 1:
            need_top = not (st.cov or st.k - 1 > dw or self.reaches_top(w))
            spare = st.k - 1 - dw
            cs = [c for c in range(st.c_last + 1, min(L, n)) if pool >> c & 1]
            if cs:
                if bound is None:
                    for c in cs:
                        costly = pool & ~((1 << (c + 1)) - 1) & ~pmask
                        budget = _popcount(costly) - spare
                        if budget < 0:
                            break
                        x = F.from_coeffs({c: 1})
                        cost = 0
                        if need_top and c != n - 1:
                            x = F.from_coeffs({c: 1, n - 1: 1})
                            cost = costly >> (n - 1) & 1
                        if cost <= budget and (best is None or x < best):
                            best = x
                else:
                    c0 = cs[0]
                    costly = pool & ~((1 << (c0 + 1)) - 1) & ~pmask
                    budget = _popcount(costly) - spare
                    lowmask = (1 << (c0 + 1)) - 1
                    x = self._solve(lowmask | pmask, F.from_coeffs({c0: 1}), costly, budget, need_top, bound)
                    if x is not None:
                        best = x
                    # the row e_c + (bound above c), for the first c that works
                    bsupp = F.support(bound)
                    for c in cs:
                        if F.digit(bound, c):
                            continue
                        costly = pool & ~((1 << (c + 1)) - 1) & ~pmask
                        budget = _popcount(costly) - spare
                        if budget < 0:
                            break
                        hi = bsupp >> (c + 1) << (c + 1)
                        if hi & pmask or hi >> n:
                            continue
                        if need_top and c != n - 1 and not hi >> (n - 1) & 1:
                            continue
                        if _popcount(hi & costly) > budget:
                            continue
                        x = F.above(bound, c) + F.from_coeffs({c: 1})
                        if best is None or x < best:
                            best = x
                        break

        # pivot exactly at L
        if L < n:
            wL = w[0]
            rest = w[1:]
            # r = w_L
            if bound is None or wL > bound:
                if best is None or wL < best:
                    if self.advance(st, wL) is not None:
                        best = wL
            y = F.axpy(-1, F.from_coeffs({L: 1}), wL)
            prest = pmask & ~(1 << L)
            ysupp = F.support(y)
            qs = ysupp & ~st.fmask & ~prest
            if qs and dw <= st.k - 1:
                rest_top = self.reaches_top(rest)
                y_top = bool(ysupp >> (n - 1) & 1)
                spare = st.k - 1 - dw  # rows beyond the ones producing w
                lowmask = (1 << L) - 1
                while qs:
                    qbit = qs & -qs
                    qs ^= qbit
                    q = qbit.bit_length() - 1
                    between = ((1 << q) - 1) & ~((1 << (L + 1)) - 1)
                    fmask_ = lowmask | (1 << L) | between | qbit | prest
                    fval = F.from_coeffs({L: 1}) + F.below(F.above(y, L), q)
                    costly = pool & ~((1 << (L + 1)) - 1) & ~prest & ~qbit
                    budget = _popcount(costly) - spare
                    need_top = not (st.cov or rest_top or st.k - 1 > dw or q == n - 1 or y_top)
                    x = self._solve(fmask_, fval, costly, budget, need_top, bound)
                    if x is not None and (best is None or x < best):
                        best = x
        return best

    def complete(self, st: _State) -> _State | None:
        while st.k > 0:
            r = self.min_row(st, None)
            if r is None:
                return None
            st = self.advance(st, r)
            if st is None:
                raise AssertionError("internal error: completion row not admissible")
        return st


def block_least(W: Subspace, n: int, d: int, bound: Subspace | None = None) -> Subspace | None:
    """Least U with ambient bound n and dimension d, W <= U and U > bound.

    ``bound`` must lie in the same block or be None.
    """
    if W.ambient > n or W.dim > d:
        return None
    S = _Search(W.field, n)
    st0 = S.start(W, d)
    if st0 is None:
        return None
    if bound is None:
        st = S.complete(st0)
        return None if st is None else Subspace(st.rows, W.field, check=False)
    rows = bound.rows
    states = [st0]
    for R in rows[:-1]:
        s = S.advance(states[-1], R)
        if s is None:
            break
        states.append(s)
    for j in range(len(states) - 1, -1, -1):
        r = S.min_row(states[j], rows[j])
        if r is not None:
            st = S.advance(states[j], r)
            if st is None:
                raise AssertionError("internal error: chosen row not admissible")
            st = S.complete(st)
            if st is None:
                raise AssertionError("internal error: completion failed")
            return Subspace(st.rows, W.field, check=False)
    return None


def least_superspace_after(W: Subspace, M: Subspace | None) -> Subspace:
    """Least nonzero U in the enumeration with W <= U and U > M.

    ``M`` of None means no lower bound.
    """
    nW = W.ambient
    if M is None or not M.rows:
        n0, d0 = max(nW, 1), 1
        M = None
    else:
        n0, d0 = M.ambient, M.dim
    n = max(n0, nW)
    while True:
        for d in range(max(1, W.dim), n + 1):
            if M is not None and (n, d) < (n0, d0):
                continue
            b = M if (M is not None and (n, d) == (n0, d0)) else None
            U = block_least(W, n, d, b)
            if U is not None:
                return U
        n += 1
