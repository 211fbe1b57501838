"""The greedy construction of the free commutative monoid on subspaces.

Candidates (multisets of ids with at least two elements) are visited in
schedule order.  A candidate that mentions an id already used as an image
is skipped for good.  Otherwise it is sent to the least subspace W that

* contains every element of the candidate and the images of all its
  proper submultisets with at least two elements, and
* comes after everything mentioned so far (tracked by a single watermark).

Ids used as images are the composites Q, all other nonzero subspaces are the
primes P.  Writing every subspace as the image of its factor multiset gives
a bijection f between multisets of primes and subspaces, and the product is
``F * G = f(f^-1(F) + f^-1(G))``.

Subspaces are kept as :class:`Subspace` values and compared by their
enumeration keys; numeric ids are only computed when a record is
serialised, because they grow very large.
"""
from __future__ import annotations

import hashlib
import json
import threading
import time
from dataclasses import dataclass, field as dc_field
from enum import Enum
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Iterator, Optional

from .exactlin import (
    Echelon,
    FieldPrime,
    Subspace,
    is_subspace_of,
    least_superspace_after,
    subspace_sum,
    unrank,
)
from .ordmset import (
    Multiset,
    disjoint_union,
    format_multiset,
    iter_schedule,
    maximal_proper_submultisets,
    proper_submultisets_v2,
    schedule_candidate,
    schedule_position,
)

__all__ = [
    "Kind",
    "StepRecord",
    "ConstructionState",
    "BudgetExceeded",
    "CompositeError",
    "step",
    "choose_w",
    "classify",
    "f_inverse",
    "f_apply",
    "star",
    "factor",
    "fold_star",
    "product_op",
    "theorem_a_op",
    "AxiomReport",
    "verify_axioms",
    "verify_product_monoid",
    "write_trace",
    "trace_hash",
    "TRACE_FORMAT_VERSION",
]

TRACE_FORMAT_VERSION = 1


class Kind(str, Enum):
    P = "P"
    Q = "Q"
    ZERO = "Zero"


class BudgetExceeded(RuntimeError):
    """Raised when the construction runs past a deadline."""


class CompositeError(ValueError):
    """A multiset handed to f mentions a composite id."""


@lru_cache(maxsize=4096)
def _unrank_cached(i: int, p: int) -> Subspace:
    return unrank(i, FieldPrime(p))


@dataclass(frozen=True)
class StepRecord:
    step_index: int
    candidate: Multiset
    action: str  # "processed" or "skipped"
    chosen_w: Optional[Subspace]
    watermark_after: Optional[Subspace]

    @property
    def w_id(self) -> Optional[int]:
        return None if self.chosen_w is None else self.chosen_w.id

    @property
    def watermark_id(self) -> int:
        return -1 if self.watermark_after is None else self.watermark_after.id

    def to_dict(self) -> dict:
        return {
            "i": self.step_index,
            "candidate": format_multiset(self.candidate),
            "action": self.action,
            "w": self.w_id,
            "watermark": self.watermark_id,
        }


@dataclass(frozen=True)
class Snapshot:
    field: FieldPrime
    cursor: int
    dom: MappingProxyType
    image: MappingProxyType
    watermark: Optional[Subspace]


class ConstructionState:
    """Resumable state of the construction.

    ``dom`` maps processed candidates to their images, ``image`` is the
    inverse map.  The watermark is the largest subspace mentioned so far, as
    a :class:`Subspace` (``None`` before anything was mentioned).  All
    mutating entry points hold ``lock``.
    """

    def __init__(self, field: FieldPrime = FieldPrime(2), keep_log: bool = True):
        self.field = field
        self.cursor = 0
        self.dom: dict[Multiset, Subspace] = {}
        self.image: dict[Subspace, Multiset] = {}
        self.watermark: Optional[Subspace] = None
        self.log: list[StepRecord] = []
        self.keep_log = keep_log
        self.lock = threading.RLock()
        self._schedule: Iterator[Multiset] = iter_schedule()

    # -- helpers -------------------------------------------------------
    def element(self, i: int) -> Subspace:
        return _unrank_cached(i, self.field.p)

    @property
    def watermark_id(self) -> int:
        return -1 if self.watermark is None else self.watermark.id

    def snapshot(self) -> Snapshot:
        with self.lock:
            return Snapshot(
                self.field,
                self.cursor,
                MappingProxyType(dict(self.dom)),
                MappingProxyType(dict(self.image)),
                self.watermark,
            )

    def _raise_watermark(self, U: Subspace) -> None:
        if self.watermark is None or U.key() > self.watermark.key():
            self.watermark = U

    # -- one schedule step -----------------------------------------------
    def step(self) -> StepRecord:
        with self.lock:
            A = next(self._schedule)
            idx = self.cursor
            self.cursor += 1
            elems = [self.element(i) for i in A.distinct()]
            if any(U in self.image for U in elems):
                rec = StepRecord(idx, A, "skipped", None, self.watermark)
            else:
                for U in elems:
                    self._raise_watermark(U)
                lower = self.lower_bound(A, elems)
                W = choose_w(self, lower)
                self.dom[A] = W
                self.image[W] = A
                self.watermark = W
                rec = StepRecord(idx, A, "processed", W, W)
            if self.keep_log:
                self.log.append(rec)
            return rec

    def lower_bound(self, A: Multiset, elems: Optional[list[Subspace]] = None) -> Subspace:
        """Sum of the elements of A and of the images of its proper submultisets.

        Every image of a submultiset contains the images of its own
        submultisets, so the maximal ones (drop one element) are enough.
        """
        if elems is None:
            elems = [self.element(i) for i in A.distinct()]
        E = Echelon(self.field)
        for B in maximal_proper_submultisets(A):
            try:
                WB = self.dom[B]
            except KeyError:
                raise RuntimeError(f"internal error: {B} should have been processed before {A}") from None
            for r in WB.rows:
                E.insert(r)
        for U in elems:
            for r in U.rows:
                E.insert(r)
        return Subspace(E.rows_tuple(), self.field, check=False)

    def run(self, steps: int, deadline: Optional[float] = None) -> None:
        for _ in range(steps):
            self._check(deadline)
            self.step()

    def advance_past(self, position: int, deadline: Optional[float] = None) -> None:
        """Process schedule entries until the cursor is beyond ``position``."""
        with self.lock:
            while self.cursor <= position:
                self._check(deadline)
                self.step()

    def advance_until_key(self, key: tuple, deadline: Optional[float] = None) -> None:
        """Step until the watermark is at or beyond the subspace with this key."""
        with self.lock:
            while self.watermark is None or self.watermark.key() < key:
                self._check(deadline)
                self.step()

    @staticmethod
    def _check(deadline):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExceeded("construction budget exhausted")


def step(state: ConstructionState) -> ConstructionState:
    state.step()
    return state


def choose_w(state: ConstructionState, lower_bound: Subspace) -> Subspace:
    """Least subspace after the watermark containing ``lower_bound``."""
    return least_superspace_after(lower_bound, state.watermark)


def classify(state: ConstructionState, F: Subspace, deadline: Optional[float] = None) -> Kind:
    if not F.rows:
        return Kind.ZERO
    state.advance_until_key(F.key(), deadline)
    return Kind.Q if F in state.image else Kind.P


def f_inverse(state: ConstructionState, F: Subspace, deadline: Optional[float] = None) -> Multiset:
    kind = classify(state, F, deadline)
    if kind is Kind.ZERO:
        return Multiset()
    if kind is Kind.P:
        return Multiset([(F.id, 1)])
    return state.image[F]


def f_apply(state: ConstructionState, A: Multiset, deadline: Optional[float] = None) -> Subspace:
    for i in A.distinct():
        if classify(state, state.element(i), deadline) is not Kind.P:
            raise CompositeError(f"id {i} is composite")
    if A.v == 0:
        return Subspace.zero(state.field)
    if A.v == 1:
        return state.element(A[0][0])
    W = state.dom.get(A)
    if W is None:
        state.advance_past(schedule_position(A), deadline)
        W = state.dom.get(A)
        if W is None:
            raise RuntimeError(f"internal error: {A} was not processed at its schedule position")
    return W


def star(state: ConstructionState, F: Subspace, G: Subspace, deadline: Optional[float] = None) -> Subspace:
    if F.field is not G.field:
        raise ValueError("field mismatch")
    A = disjoint_union(f_inverse(state, F, deadline), f_inverse(state, G, deadline))
    return f_apply(state, A, deadline)


def factor(state: ConstructionState, F: Subspace, deadline: Optional[float] = None) -> Multiset:
    return f_inverse(state, F, deadline)


def fold_star(state: ConstructionState, A: Multiset, deadline: Optional[float] = None) -> Subspace:
    """Multiply the elements of A one at a time, starting from {0}."""
    acc = Subspace.zero(state.field)
    for i in A.ids():
        acc = star(state, acc, state.element(i), deadline)
    return acc


def product_op(state: ConstructionState, x: tuple, y: tuple, deadline: Optional[float] = None) -> tuple:
    """Product on (subspace, exponent) pairs: star on subspaces, exponents add."""
    (F, k), (G, j) = x, y
    return (star(state, F, G, deadline), k + j)


# name used by the public interface
theorem_a_op = product_op


# ---------------------------------------------------------------------------
# axiom checks

ALL_CHECKS = ("comm", "assoc", "identity", "cancel", "contain", "factor", "groth")


@dataclass
class AxiomReport:
    max_id: int
    checks: tuple
    counts: dict = dc_field(default_factory=dict)
    failures: list = dc_field(default_factory=list)
    complete: bool = True
    note: str = ""

    @property
    def ok(self) -> bool:
        return self.complete and not self.failures

    def fail(self, check: str, witness) -> None:
        self.failures.append((check, witness))

    def summary(self) -> str:
        lines = [f"elements: {self.max_id} ids plus {{0}}"]
        for c in self.checks:
            bad = sum(1 for f in self.failures if f[0] == c)
            lines.append(f"{c}: {self.counts.get(c, 0)} checked, {bad} failed")
        for c, w in self.failures[:10]:
            lines.append(f"counterexample {c}: {w}")
        if not self.complete:
            lines.append(f"incomplete: {self.note}")
        lines.append("PASS" if self.ok else "FAIL")
        return "\n".join(lines)


def verify_axioms(
    state: ConstructionState,
    max_id: int,
    checks: Iterable[str] = ALL_CHECKS,
    triple_max_id: Optional[int] = None,
    deadline: Optional[float] = None,
) -> AxiomReport:
    """Check the monoid laws over {0} and the subspaces with id < max_id.

    Associativity runs over triples with id < ``triple_max_id`` (defaults
    to ``max_id``).  Products are evaluated in order of grade so that the
    construction only ever moves forward.  Failures are collected; running
    out of time marks the report incomplete.
    """
    checks = tuple(checks)
    unknown = set(checks) - set(ALL_CHECKS)
    if unknown:
        raise ValueError(f"unknown checks: {sorted(unknown)}")
    rep = AxiomReport(max_id, checks)
    tmax = max_id if triple_max_id is None else triple_max_id
    zero = Subspace.zero(state.field)
    elems = [zero] + [state.element(i) for i in range(max_id)]
    try:
        _verify(state, rep, elems, tmax, deadline)
    except BudgetExceeded as exc:
        rep.complete = False
        rep.note = _progress_note(state, exc)
    return rep


def _progress_note(state: ConstructionState, exc: Exception) -> str:
    grade = schedule_candidate(state.cursor).grade if state.cursor else 0
    return f"{exc}; construction reached schedule position {state.cursor} (grade {grade})"


def _verify(state, rep, elems, tmax, deadline):
    checks = rep.checks
    fac = {}
    for U in elems:
        fac[U] = f_inverse(state, U, deadline)

    if "factor" in checks:
        n = 0
        for U in elems:
            A = fac[U]
            n += 1
            for i in A.distinct():
                if classify(state, state.element(i), deadline) is not Kind.P:
                    rep.fail("factor", (str(U), str(A), f"id {i} composite"))
            if fold_star(state, A, deadline) != U:
                rep.fail("factor", (str(U), str(A)))
        rep.counts["factor"] = n

    if "groth" in checks:
        from .groth import embed

        seen = {}
        n = 0
        for U in elems:
            e = embed(U, state, deadline)
            key = tuple(sorted(e.items()))
            if key in seen and seen[key] != U:
                rep.fail("groth", ("not injective", str(U), str(seen[key])))
            seen[key] = U
            n += 1
        rep.counts["groth"] = n

    if "identity" in checks:
        zero = elems[0]
        for U in elems:
            if star(state, U, zero, deadline) != U or star(state, zero, U, deadline) != U:
                rep.fail("identity", str(U))
        rep.counts["identity"] = len(elems)

    need_pairs = any(c in checks for c in ("comm", "cancel", "contain", "assoc", "groth"))
    table = {}
    if need_pairs:
        # evaluate products in grade order so the construction only advances
        pairs = [(a, b) for a in range(len(elems)) for b in range(len(elems))]
        pairs.sort(key=lambda ab: (disjoint_union(fac[elems[ab[0]]], fac[elems[ab[1]]]).grade, ab))
        try:
            for a, b in pairs:
                table[a, b] = star(state, elems[a], elems[b], deadline)
        finally:
            rep.counts["products"] = len(table)
            rep.counts["products_needed"] = len(pairs)

    if "comm" in checks:
        n = 0
        for a in range(len(elems)):
            for b in range(len(elems)):
                n += 1
                if table[a, b] != table[b, a]:
                    rep.fail("comm", (str(elems[a]), str(elems[b])))
        rep.counts["comm"] = n

    if "contain" in checks:
        n = 0
        for (a, b), P in table.items():
            n += 1
            if not (is_subspace_of(elems[a], P) and is_subspace_of(elems[b], P)):
                rep.fail("contain", (str(elems[a]), str(elems[b])))
            elif P.dim < subspace_sum(elems[a], elems[b]).dim:
                rep.fail("contain", (str(elems[a]), str(elems[b]), "dimension"))
        rep.counts["contain"] = n

    if "cancel" in checks:
        n = 0
        for h in range(len(elems)):
            seen = {}
            for a in range(len(elems)):
                n += 1
                P = table[a, h]
                if P in seen:
                    rep.fail("cancel", (str(elems[seen[P]]), str(elems[a]), str(elems[h])))
                else:
                    seen[P] = a
        rep.counts["cancel"] = n

    if "groth" in checks:
        from .groth import embed, g_add

        n = 0
        for (a, b), P in table.items():
            n += 1
            if embed(P, state, deadline) != g_add(embed(elems[a], state, deadline), embed(elems[b], state, deadline)):
                rep.fail("groth", ("not a homomorphism", str(elems[a]), str(elems[b])))
        rep.counts["groth"] = rep.counts.get("groth", 0) + n

    if "assoc" in checks:
        m = min(len(elems), tmax + 1)
        triples = [(a, b, c) for a in range(m) for b in range(m) for c in range(m)]
        triples.sort(
            key=lambda t: (
                sum(fac[elems[i]].grade for i in t),
                t,
            )
        )
        n = 0
        for a, b, c in triples:
            n += 1
            left = star(state, table[a, b], elems[c], deadline)
            right = star(state, elems[a], table[b, c], deadline)
            if left != right:
                rep.fail("assoc", (str(elems[a]), str(elems[b]), str(elems[c])))
        rep.counts["assoc"] = n


def verify_product_monoid(
    state: ConstructionState,
    max_id: int,
    max_exp: int = 3,
    triple_max_id: Optional[int] = None,
    deadline: Optional[float] = None,
) -> AxiomReport:
    """Check the laws of Fin V (+) {2^-k} on pairs (F, k).

    F ranges over {0} and ids < max_id, k over 0..max_exp.  Checks
    commutativity, identity ((0), 0), containment of both factors with
    exponents adding, and associativity on triples with id < triple_max_id.
    """
    checks = ("comm", "identity", "contain", "assoc")
    rep = AxiomReport(max_id, checks)
    tmax = max_id if triple_max_id is None else triple_max_id
    zero = Subspace.zero(state.field)
    subs = [zero] + [state.element(i) for i in range(max_id)]
    exps = range(max_exp + 1)
    try:
        fac = {U: f_inverse(state, U, deadline) for U in subs}
        order = sorted(
            ((a, b) for a in range(len(subs)) for b in range(len(subs))),
            key=lambda ab: (disjoint_union(fac[subs[ab[0]]], fac[subs[ab[1]]]).grade, ab),
        )
        prod = {}
        try:
            for a, b in order:
                prod[a, b] = star(state, subs[a], subs[b], deadline)
        finally:
            rep.counts["products"] = len(prod)
            rep.counts["products_needed"] = len(order)

        unit = (zero, 0)
        for c in ("comm", "identity", "contain"):
            rep.counts[c] = 0
        for a, F in enumerate(subs):
            for k in exps:
                x = (F, k)
                rep.counts["identity"] += 1
                if product_op(state, x, unit, deadline) != x or product_op(state, unit, x, deadline) != x:
                    rep.fail("identity", (str(F), k))
                for b, G in enumerate(subs):
                    for j in exps:
                        y = (G, j)
                        xy = product_op(state, x, y, deadline)
                        rep.counts["comm"] += 1
                        if xy != product_op(state, y, x, deadline):
                            rep.fail("comm", (str(F), k, str(G), j))
                        rep.counts["contain"] += 1
                        if xy != (prod[a, b], k + j) or not (F <= xy[0] and G <= xy[0]):
                            rep.fail("contain", (str(F), k, str(G), j))

        m = min(len(subs), tmax + 1)
        triples = sorted(
            ((a, b, c) for a in range(m) for b in range(m) for c in range(m)),
            key=lambda t: (sum(fac[subs[i]].grade for i in t), t),
        )
        n = 0
        for a, b, c in triples:
            for k in exps:
                for j in exps:
                    for l in exps:
                        x, y, z = (subs[a], k), (subs[b], j), (subs[c], l)
                        n += 1
                        left = product_op(state, product_op(state, x, y, deadline), z, deadline)
                        right = product_op(state, x, product_op(state, y, z, deadline), deadline)
                        if left != right:
                            rep.fail("assoc", (str(subs[a]), k, str(subs[b]), j, str(subs[c]), l))
        rep.counts["assoc"] = n
    except BudgetExceeded as exc:
        rep.complete = False
        rep.note = _progress_note(state, exc)
    return rep


# ---------------------------------------------------------------------------
# traces

def _record_line(rec: StepRecord) -> str:
    return json.dumps(rec.to_dict(), sort_keys=True, separators=(",", ":"))


def trace_records(state: ConstructionState, steps: int) -> list[StepRecord]:
    """The first ``steps`` records of the construction (running it if needed)."""
    if not state.keep_log:
        raise ValueError("state does not keep a log")
    while len(state.log) < steps:
        state.step()
    return state.log[:steps]


def trace_hash(state: ConstructionState, steps: int) -> str:
    """SHA-256 over the canonical JSON lines of the first ``steps`` records."""
    h = hashlib.sha256()
    for rec in trace_records(state, steps):
        h.update(_record_line(rec).encode())
        h.update(b"\n")
    return h.hexdigest()


def trace_document(state: ConstructionState, steps: int) -> dict:
    return {
        "format_version": TRACE_FORMAT_VERSION,
        "p": state.field.p,
        "enumeration_rule": "amb,dim,rowserial-lex",
        "schedule_rule": "grade,phi",
        "steps": [rec.to_dict() for rec in trace_records(state, steps)],
        "sha256": trace_hash(state, steps),
    }


def write_trace(state: ConstructionState, steps: int, out) -> str:
    """Write the trace document to a path or file object; returns the hash."""
    doc = trace_document(state, steps)
    text = json.dumps(doc, sort_keys=True, indent=1)
    if hasattr(out, "write"):
        out.write(text + "\n")
    else:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    return doc["sha256"]
