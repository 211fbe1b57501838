"""Slow, independent reference implementations used as test oracles.

Nothing here imports the package: vectors are digit tuples, subspaces are
frozensets of vectors, and orders are spelled out directly.
"""
import itertools


def vec_add(u, v, p):
    return tuple((a + b) % p for a, b in zip(u, v))


def vec_scale(c, v, p):
    return tuple((c * a) % p for a in v)


def span_set(gens, n, p):
    """All vectors of GF(p)^n in the span of gens, by closure."""
    S = {tuple([0] * n)}
    for g in gens:
        S = {vec_add(s, vec_scale(c, g, p), p) for s in S for c in range(p)}
    return frozenset(S)


def all_subspaces(n, p):
    """Every subspace of GF(p)^n, grown one vector at a time from {0}."""
    zero = span_set([], n, p)
    found = {zero}
    frontier = [zero]
    vectors = list(itertools.product(range(p), repeat=n))
    while frontier:
        nxt = []
        for S in frontier:
            for v in vectors:
                if v in S:
                    continue
                T = frozenset(vec_add(s, vec_scale(c, v, p), p) for s in S for c in range(p))
                if T not in found:
                    found.add(T)
                    nxt.append(T)
        frontier = nxt
    return found


def rref(vectors, p):
    """Reduced row echelon rows (digit lists indexed by coordinate).

    The pivot of a row is its lowest nonzero coordinate.
    """
    rows = [list(v) for v in vectors if any(v)]
    n = len(rows[0]) if rows else 0
    out = []
    col = 0
    while rows and col < n:
        piv = next((r for r in rows if r[col]), None)
        if piv is None:
            col += 1
            continue
        rows.remove(piv)
        inv = pow(piv[col], p - 2, p)
        piv = [(inv * a) % p for a in piv]
        rows = [[(a - r[col] * b) % p for a, b in zip(r, piv)] for r in rows]
        out = [[(a - r[col] * b) % p for a, b in zip(r, piv)] for r in out]
        out.append(piv)
        rows = [r for r in rows if any(r)]
        col += 1
    return out


def serial(digits, p):
    return sum(d * p ** i for i, d in enumerate(digits))


def basis_of(S, p):
    """RREF rows of a subspace given as a set of vectors."""
    return rref(sorted(S), p)


def theta_key(S, p):
    """(ambient, dim, row serials) for a nonzero subspace given as a vector set."""
    rows = basis_of(S, p)
    amb = max(max(i for i, d in enumerate(r) if d) + 1 for r in rows)
    return (amb, len(rows), tuple(serial(r, p) for r in rows))


def theta_order(n, p):
    """All nonzero subspaces of GF(p)^n in enumeration order, as serial-row tuples."""
    subs = [S for S in all_subspaces(n, p) if len(S) > 1]
    keys = sorted(theta_key(S, p) for S in subs)
    return [k[2] for k in keys], keys


def partitions_with_ids(grade):
    """Multisets (dicts id -> mult) with sum of (id + 1) * mult == grade."""
    out = []

    def rec(rest, max_part, acc):
        if rest == 0:
            out.append(dict(acc))
            return
        for part in range(min(rest, max_part), 0, -1):
            acc[part - 1] = acc.get(part - 1, 0) + 1
            rec(rest - part, part, acc)
            acc[part - 1] -= 1
            if not acc[part - 1]:
                del acc[part - 1]

    rec(grade, grade, {})
    return out


def colex_key(A, width):
    """Multiplicity vector from the highest id down; lexicographic == colex."""
    return tuple(A.get(i, 0) for i in range(width - 1, -1, -1))


def schedule(max_grade):
    """Multisets of size >= 2 ordered by (grade, colex), as dicts."""
    out = []
    for g in range(2, max_grade + 1):
        level = [A for A in partitions_with_ids(g) if sum(A.values()) >= 2]
        level.sort(key=lambda A: colex_key(A, g))
        out.extend(level)
    return out


def sub_multisets(A):
    """All B strictly inside A with |B| >= 2."""
    ids = sorted(A)
    out = []
    for ms in itertools.product(*(range(A[i] + 1) for i in ids)):
        B = {i: m for i, m in zip(ids, ms) if m}
        if B != A and sum(B.values()) >= 2:
            out.append(B)
    return out


def freeze(A):
    return tuple(sorted(A.items()))


def straight_line(n=6, max_grade=12):
    """Run the construction on explicit vector sets of GF(2)^n.

    Returns the list of chosen ids per schedule step (None for a skipped
    step), stopping when a choice would leave GF(2)^n, and the enumeration.
    """
    order, _ = theta_order(n, 2)
    sets = [span_set([[int(b) for b in format(r, f"0{n}b")[::-1]] for r in rows], n, 2) for rows in order]
    g = {}
    image = set()
    watermark = -1
    chosen = []
    for A in schedule(max_grade):
        if any(i in image for i in A):
            chosen.append(None)
            continue
        watermark = max(watermark, max(A))
        gens = []
        for i in A:
            gens.extend(sets[i])
        for B in sub_multisets(A):
            gens.extend(sets[g[freeze(B)]])
        lower = span_set(gens, n, 2)
        w = next((j for j in range(watermark + 1, len(sets)) if lower <= sets[j]), None)
        if w is None:
            break
        g[freeze(A)] = w
        image.add(w)
        watermark = w
        chosen.append(w)
    return chosen, order
