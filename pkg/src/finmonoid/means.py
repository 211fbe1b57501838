"""Box averages on Z^k and N^k, and exact checks of the mean-transfer identities.

An invariant mean on an abelian group cannot be written down, but averages
over the boxes ``[-n, n]^k`` are invariant up to a boundary term.  This
module measures those defects and checks exactly the finite identities that
the transfer arguments rely on (decompositions of lifted functions,
translate matchings, disjoint supports, sublattice and quotient transfers,
and the mean ``Mf = f(0)`` on a semigroup with absorbing zero).

Functions are vectorised: an evaluator takes an integer array of shape
``(N, k)`` and returns a float array of shape ``(N, d)``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "LatticeGroup",
    "BoundedFn",
    "MeanReport",
    "Check",
    "PreconditionError",
    "box",
    "folner_mean",
    "translate",
    "invariance_defect",
    "defect_bound",
    "lift_abs",
    "restrict_predicate",
    "check_groth_decomposition",
    "disjoint_support_translates",
    "kernel_mean_bound",
    "coset_extension",
    "quotient_pullback",
    "iso_transfer",
    "zero_semigroup_mean",
    "semigroup_tables",
    "adjoin_zero",
    "mean_report",
    "constant",
    "point_indicator",
    "slab_indicator",
    "random_fn",
    "parse_fn",
    "parse_group",
]

TOL = 1e-12


class PreconditionError(ValueError):
    """Input violates a documented precondition; ``witness`` says where."""

    def __init__(self, msg, witness=None):
        super().__init__(msg if witness is None else f"{msg} (witness {witness})")
        self.witness = witness


@dataclass(frozen=True)
class LatticeGroup:
    kind: str  # "Zk" or "Nk"
    k: int

    def __post_init__(self):
        if self.kind not in ("Zk", "Nk"):
            raise ValueError("kind must be 'Zk' or 'Nk'")
        if self.k < 1:
            raise ValueError("k must be at least 1")

    def __str__(self):
        return f"{self.kind[0]}{self.k}"


@dataclass(frozen=True)
class BoundedFn:
    domain: LatticeGroup
    value_dim: int
    evaluator: Callable[[np.ndarray], np.ndarray]
    sup_bound: float

    def __call__(self, pts) -> np.ndarray:
        pts = np.asarray(pts, dtype=np.int64)
        if pts.ndim == 1:
            pts = pts.reshape(1, -1)
        if pts.shape[1] != self.domain.k:
            raise ValueError("point dimension mismatch")
        if self.domain.kind == "Nk" and (pts < 0).any():
            raise ValueError("negative coordinates outside N^k")
        vals = np.asarray(self.evaluator(pts), dtype=float).reshape(len(pts), self.value_dim)
        norms = np.sqrt((vals * vals).sum(axis=1)) if len(vals) else vals
        if len(vals) and norms.max() > self.sup_bound * (1 + TOL) + TOL:
            i = int(norms.argmax())
            raise ValueError(f"value {vals[i]} at {pts[i]} exceeds sup_bound {self.sup_bound}")
        return vals

    def at(self, t) -> np.ndarray:
        return self(np.asarray([t]))[0]


@dataclass
class MeanReport:
    n: int
    value: list
    defects: list = field(default_factory=list)  # dicts {shift, defect, bound}

    def as_dict(self) -> dict:
        return {"n": self.n, "value": self.value, "defects": self.defects}


@dataclass
class Check:
    """Outcome of an exact check; false results carry a witness."""

    ok: bool
    witness: object = None
    detail: str = ""

    def __bool__(self):
        return self.ok


# ---------------------------------------------------------------------------
# boxes and means

def box(n: int, k: int) -> np.ndarray:
    """All points of [-n, n]^k, lexicographic, shape ((2n+1)^k, k)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    axis = np.arange(-n, n + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * k), indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def _sum_rows(vals: np.ndarray) -> np.ndarray:
    # contiguous last axis -> numpy's pairwise summation, fixed order
    return np.ascontiguousarray(vals.T).sum(axis=1)


def folner_mean(f: BoundedFn, n: int) -> np.ndarray:
    if f.domain.kind != "Zk":
        raise ValueError("box averages are taken over Z^k")
    pts = box(n, f.domain.k)
    return _sum_rows(f(pts)) / len(pts)


def _unit(k: int, i: int) -> np.ndarray:
    e = np.zeros(k, dtype=np.int64)
    e[i - 1] = 1
    return e


def translate(f: BoundedFn, s, side: str = "right") -> BoundedFn:
    """``f_s(t) = f(t + s)`` (right) or ``sf(t) = f(s + t)`` (left)."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    s = np.asarray(s, dtype=np.int64).reshape(-1)
    if len(s) != f.domain.k:
        raise ValueError("shift dimension mismatch")
    if f.domain.kind == "Nk" and (s < 0).any():
        raise ValueError("shift must lie in N^k")
    ev = f.evaluator
    return BoundedFn(f.domain, f.value_dim, lambda pts: ev(pts + s), f.sup_bound)


def invariance_defect(f: BoundedFn, s, n: int) -> float:
    diff = folner_mean(translate(f, s), n) - folner_mean(f, n)
    return float(np.sqrt((diff * diff).sum()))


def defect_bound(f: BoundedFn, s, n: int) -> float:
    """sup_bound times |B - (B - s)| + |(B - s) - B| over |B| for B = [-n, n]^k."""
    m = 2 * n + 1
    s = np.abs(np.asarray(s, dtype=np.int64).reshape(-1))
    overlap = 1.0
    for si in s:
        overlap *= max(m - int(si), 0) / m
    return f.sup_bound * 2.0 * (1.0 - overlap)


def mean_report(f: BoundedFn, n: int, shifts: Sequence) -> MeanReport:
    value = folner_mean(f, n)
    rep = MeanReport(n, [float(x) for x in value])
    for s in shifts:
        s = [int(x) for x in s]
        rep.defects.append(
            {"shift": s, "defect": invariance_defect(f, s, n), "bound": defect_bound(f, s, n)}
        )
    return rep


# ---------------------------------------------------------------------------
# constructions

def lift_abs(f: BoundedFn) -> BoundedFn:
    """``f'(t) = f(|t|)``, from N^k to Z^k."""
    if f.domain.kind != "Nk":
        raise ValueError("lift_abs takes a function on N^k")
    ev = f.evaluator
    return BoundedFn(LatticeGroup("Zk", f.domain.k), f.value_dim, lambda pts: ev(np.abs(pts)), f.sup_bound)


def restrict_predicate(h: BoundedFn, i: int, pred: Callable) -> BoundedFn:
    """Keep h where ``pred(t_i)`` holds (i is 1-based), zero elsewhere.

    ``pred`` receives an integer array and returns a boolean array.
    """
    if not 1 <= i <= h.domain.k:
        raise ValueError("coordinate out of range")
    ev = h.evaluator

    def g(pts):
        vals = np.asarray(ev(pts), dtype=float).reshape(len(pts), h.value_dim)
        mask = np.broadcast_to(np.asarray(pred(pts[:, i - 1]), dtype=bool), (len(pts),))
        return np.where(mask[:, None], vals, 0.0)

    return BoundedFn(h.domain, h.value_dim, g, h.sup_bound)


def _first_mismatch(a: np.ndarray, b: np.ndarray, pts: np.ndarray):
    bad = np.nonzero((a != b).any(axis=1))[0]
    return None if len(bad) == 0 else tuple(int(x) for x in pts[bad[0]])


def check_groth_decomposition(f: BoundedFn, i: int, n: int, restrict: Callable = restrict_predicate) -> Check:
    """Exact check of the lifted four-term and two-term decompositions.

    With ``g = f_{e_i}`` (translate inside N^k) and primes for lifts:
    ``f' = f'[t_i<=-2] + f'[t_i=-1] + f'[t_i=0] + f'[t_i>=1]``,
    ``g' = g'[t_i<=-1] + g'[t_i>=0]``, and the matchings
    ``f'[t_i<=-2](t) = g'[t_i<=-1](t + e_i)``,
    ``f'[t_i>=1](t) = g'[t_i>=0](t - e_i)``, all on the box [-n, n]^k.
    ``restrict`` can be replaced to test the checker itself.
    """
    if f.domain.kind != "Nk":
        raise ValueError("check_groth_decomposition takes a function on N^k")
    k = f.domain.k
    e = _unit(k, i)
    fp = lift_abs(f)
    gp = lift_abs(translate(f, e))
    pts = box(n, k)

    parts_f = [
        restrict(fp, i, lambda x: x <= -2),
        restrict(fp, i, lambda x: x == -1),
        restrict(fp, i, lambda x: x == 0),
        restrict(fp, i, lambda x: x >= 1),
    ]
    lhs = fp(pts)
    rhs = sum(p(pts) for p in parts_f)
    w = _first_mismatch(lhs, rhs, pts)
    if w is not None:
        return Check(False, w, "four-term decomposition of the lift")

    parts_g = [restrict(gp, i, lambda x: x <= -1), restrict(gp, i, lambda x: x >= 0)]
    lhs = gp(pts)
    rhs = parts_g[0](pts) + parts_g[1](pts)
    w = _first_mismatch(lhs, rhs, pts)
    if w is not None:
        return Check(False, w, "two-term decomposition of the shifted lift")

    w = _first_mismatch(parts_f[0](pts), parts_g[0](pts + e), pts)
    if w is not None:
        return Check(False, w, "left translate matching")
    w = _first_mismatch(parts_f[3](pts), parts_g[1](pts - e), pts)
    if w is not None:
        return Check(False, w, "right translate matching")
    return Check(True)


def _support_check(f: BoundedFn, i: int, c: int, n: int) -> np.ndarray:
    pts = box(n, f.domain.k)
    vals = f(pts)
    nz = (vals != 0).any(axis=1)
    off = nz & (pts[:, i - 1] != c)
    if off.any():
        w = tuple(int(x) for x in pts[np.nonzero(off)[0][0]])
        raise PreconditionError(f"function not supported on t_{i} = {c}", w)
    return pts


def disjoint_support_translates(f: BoundedFn, i: int, m: int, n: int) -> bool:
    """Whether f_{e_i}, ..., f_{m e_i} have pairwise disjoint supports in the box.

    f must vanish off the hyperplane t_i = 0 (checked on the box).
    """
    pts = _support_check(f, i, 0, n)
    e = _unit(f.domain.k, i)
    seen = np.zeros(len(pts), dtype=bool)
    for j in range(1, m + 1):
        supp = (f(pts + j * e) != 0).any(axis=1)
        if (seen & supp).any():
            return False
        seen |= supp
    return True


def kernel_mean_bound(f: BoundedFn, n: int, i: int = 1, c: int = 0) -> tuple[float, float]:
    """Box average of a function living on the slab t_i = c, and its bound.

    The slab meets the box in (2n+1)^(k-1) of (2n+1)^k points, so the
    average is at most sup_bound / (2n+1).
    """
    _support_check(f, i, c, n)
    mean = folner_mean(f, n)
    measured = float(np.sqrt((mean * mean).sum()))
    bound = f.sup_bound / (2 * n + 1)
    if measured > bound * (1 + TOL) + TOL:
        raise AssertionError(f"kernel mean {measured} exceeds {bound}")
    return measured, bound


def coset_extension(f: BoundedFn, moduli: Sequence[int], reps: Optional[Sequence] = None) -> BoundedFn:
    """Extend f from H = m_1 Z x ... x m_k Z to Z^k by copying it to each coset.

    ``iota(f)(t) = f(t - g(t))`` where g(t) is the representative of t + H.
    ``f`` is evaluated on points of H, given in Z^k coordinates.
    """
    k = f.domain.k
    m = np.asarray(moduli, dtype=np.int64)
    if len(m) != k or (m < 1).any():
        raise ValueError("need k moduli, all at least 1")
    if reps is None:
        ev = f.evaluator

        def g(pts):
            return ev(pts - np.mod(pts, m))

        return BoundedFn(LatticeGroup("Zk", k), f.value_dim, g, f.sup_bound)
    reps = np.asarray(reps, dtype=np.int64).reshape(-1, k)
    index = int(np.prod(m))
    res = np.mod(reps, m)
    keys = _residue_key(res, m)
    if len(reps) != index or len(set(keys.tolist())) != index:
        raise PreconditionError("representatives are not a transversal of Z^k / H")
    table = np.empty(index, dtype=np.int64)
    table[keys] = np.arange(index)
    ev = f.evaluator

    def g(pts):
        r = reps[table[_residue_key(np.mod(pts, m), m)]]
        return ev(pts - r)

    return BoundedFn(LatticeGroup("Zk", k), f.value_dim, g, f.sup_bound)


def _residue_key(res: np.ndarray, m: np.ndarray) -> np.ndarray:
    key = np.zeros(len(res), dtype=np.int64)
    for j in range(len(m)):
        key = key * m[j] + res[:, j]
    return key


def _det(M: list[list[int]]) -> int:
    """Exact integer determinant (fraction-free elimination)."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for c in range(n - 1):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            sign = -sign
        for r in range(c + 1, n):
            for j in range(c + 1, n):
                A[r][j] = (A[r][j] * A[c][c] - A[r][c] * A[c][j]) // prev
        prev = A[c][c]
    return sign * A[n - 1][n - 1]


def quotient_pullback(f: BoundedFn, proj) -> BoundedFn:
    """``t -> f(proj . t)`` for an integer j x k matrix mapping Z^k onto Z^j.

    Surjectivity onto Z^j holds exactly when the j x j minors have gcd 1.
    """
    P = np.asarray(proj, dtype=np.int64)
    if P.ndim != 2:
        raise ValueError("proj must be a matrix")
    j, k = P.shape
    if j != f.domain.k:
        raise ValueError("proj rows must match the dimension of f's domain")
    if j > k:
        raise PreconditionError("proj cannot be surjective with more rows than columns")
    g = 0
    for cols in itertools.combinations(range(k), j):
        g = math.gcd(g, _det(P[:, cols].tolist()))
        if g == 1:
            break
    if g != 1:
        raise PreconditionError("proj is not surjective onto Z^j", g)
    ev = f.evaluator
    return BoundedFn(LatticeGroup("Zk", k), f.value_dim, lambda pts: ev(pts @ P.T), f.sup_bound)


def iso_transfer(f: BoundedFn, U) -> BoundedFn:
    """``t -> f(U t)`` for a unimodular integer matrix U."""
    U = np.asarray(U, dtype=np.int64)
    k = f.domain.k
    if U.shape != (k, k):
        raise ValueError("U must be k x k")
    if abs(_det(U.tolist())) != 1:
        raise PreconditionError("U is not unimodular")
    ev = f.evaluator
    return BoundedFn(f.domain, f.value_dim, lambda pts: ev(pts @ U.T), f.sup_bound)


# ---------------------------------------------------------------------------
# semigroups with an absorbing zero

def _is_associative(table) -> Optional[tuple]:
    n = len(table)
    for a in range(n):
        for b in range(n):
            ab = table[a][b]
            for c in range(n):
                if table[ab][c] != table[a][table[b][c]]:
                    return (a, b, c)
    return None


def _absorbing(table) -> Optional[int]:
    n = len(table)
    for z in range(n):
        if all(table[z][s] == z and table[s][z] == z for s in range(n)):
            return z
    return None


def zero_semigroup_mean(table, f) -> tuple[np.ndarray, Check]:
    """The mean ``Mf = f(z)`` on a finite semigroup with absorbing zero z.

    ``f`` maps elements to vectors (sequence or array of shape (N, d)).
    Returns the value and a check that ``M(f_s) = M(sf) = M(f)`` for every s
    and that constants map to themselves.
    """
    bad = _is_associative(table)
    if bad is not None:
        raise PreconditionError("table is not associative", bad)
    z = _absorbing(table)
    if z is None:
        raise PreconditionError("table has no absorbing zero")
    vals = np.asarray(f, dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    n = len(table)

    def M(g):
        return g[z]

    value = M(vals)
    for s in range(n):
        right = np.array([vals[table[t][s]] for t in range(n)])  # f_s(t) = f(t s)
        left = np.array([vals[table[s][t]] for t in range(n)])  # sf(t) = f(s t)
        if not (np.array_equal(M(right), value) and np.array_equal(M(left), value)):
            return value, Check(False, s, "translation changed the mean")
    const = np.ones_like(vals) * vals[0]
    if not np.array_equal(M(const), vals[0]):
        return value, Check(False, "const", "constant not preserved")
    return value, Check(True)


def semigroup_tables(order: int, zero: bool = False) -> list[list[list[int]]]:
    """All associative multiplication tables on {0, ..., order-1}.

    With ``zero=True`` only tables in which 0 is absorbing are produced
    (row and column 0 are fixed, the rest is searched).
    """
    n = order
    if n == 0:
        return []
    T = [[-1] * n for _ in range(n)]
    if zero:
        for a in range(n):
            T[0][a] = T[a][0] = 0
    cells = [(a, b) for a in range(n) for b in range(n) if T[a][b] < 0]
    out = []

    def consistent(a, b):
        # every triple touching the new cell whose products are all known
        for x in range(n):
            for y in range(n):
                xy = T[x][y]
                if xy < 0:
                    continue
                for w in range(n):
                    yw = T[y][w]
                    if yw < 0:
                        continue
                    l = T[xy][w]
                    r = T[x][yw]
                    if l >= 0 and r >= 0 and l != r:
                        return False
        return True

    def rec(j):
        if j == len(cells):
            out.append([row[:] for row in T])
            return
        a, b = cells[j]
        for val in range(n):
            T[a][b] = val
            if consistent(a, b):
                rec(j + 1)
        T[a][b] = -1

    rec(0)
    return out


def adjoin_zero(table) -> list[list[int]]:
    """S with a new absorbing element appended as the last index."""
    n = len(table)
    z = n
    out = [row[:] + [z] for row in table]
    out.append([z] * (n + 1))
    return out


# ---------------------------------------------------------------------------
# function constructors used by the command line

def constant(x, group: LatticeGroup) -> BoundedFn:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    d = len(x)
    return BoundedFn(group, d, lambda pts: np.broadcast_to(x, (len(pts), d)), float(np.sqrt((x * x).sum())))


def point_indicator(t, group: LatticeGroup) -> BoundedFn:
    t = np.asarray(t, dtype=np.int64).reshape(-1)
    if len(t) != group.k:
        raise ValueError("point dimension mismatch")
    return BoundedFn(group, 1, lambda pts: (pts == t).all(axis=1).astype(float)[:, None], 1.0)


def slab_indicator(i: int, c: int, group: LatticeGroup) -> BoundedFn:
    if not 1 <= i <= group.k:
        raise ValueError("coordinate out of range")
    return BoundedFn(group, 1, lambda pts: (pts[:, i - 1] == c).astype(float)[:, None], 1.0)


def random_fn(seed: int, support: int, group: LatticeGroup, low: int = -3, high: int = 3) -> BoundedFn:
    """Integer values drawn uniformly from [low, high] on the support box, zero outside.

    The support box is [-r, r]^k on Z^k and [0, r]^k on N^k.
    """
    rng = np.random.default_rng(seed)
    k = group.k
    lo = -support if group.kind == "Zk" else 0
    side = support - lo + 1
    table = rng.integers(low, high + 1, size=(side,) * k).astype(float)
    bound = float(np.abs(table).max()) if table.size else 0.0

    def ev(pts):
        idx = pts - lo
        inside = ((idx >= 0) & (idx < side)).all(axis=1)
        out = np.zeros(len(pts))
        sel = idx[inside]
        out[inside] = table[tuple(sel.T)]
        return out[:, None]

    return BoundedFn(group, 1, ev, bound)


def parse_group(text: str) -> LatticeGroup:
    text = text.strip()
    if len(text) < 2 or text[0] not in "ZN" or not text[1:].isdigit():
        raise ValueError(f"bad group {text!r}; expected Z<k> or N<k>")
    return LatticeGroup(text[0] + "k", int(text[1:]))


def _kv(body: str) -> dict:
    out = {}
    for part in body.split(","):
        if not part.strip():
            continue
        if "=" not in part:
            raise ValueError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_fn(text: str, group: LatticeGroup) -> BoundedFn:
    """``const:<x>``, ``point:<t>``, ``slab:i=<i>,c=<c>``, ``random:seed=<s>,support=<r>``."""
    kind, _, body = text.partition(":")
    kind = kind.strip()
    if kind == "const":
        return constant([float(x) for x in body.split(",")], group)
    if kind == "point":
        return point_indicator([int(x) for x in body.split(",")], group)
    if kind == "slab":
        kv = _kv(body)
        return slab_indicator(int(kv["i"]), int(kv.get("c", 0)), group)
    if kind == "random":
        kv = _kv(body)
        return random_fn(int(kv["seed"]), int(kv["support"]), group)
    raise ValueError(f"unknown function constructor {kind!r}")
