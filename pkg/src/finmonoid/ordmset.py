"""Finite multisets of subspace ids, their ordinal keys and the schedule.

A multiset is stored as a tuple of ``(id, multiplicity)`` pairs with ids
strictly decreasing.  Its ordinal key is the Cantor normal form
``w^id1 * m1 + w^id2 * m2 + ...``, which for CNF term lists is just
lexicographic comparison of the ``(exponent, coefficient)`` pairs.

The schedule lists every multiset with at least two elements, first by
grade (sum of ``(id + 1) * multiplicity``) and then by ordinal key.  A
multiset of grade g is an integer partition of g (part ``id + 1``), so the
schedule can be indexed with partition counts.
"""
from __future__ import annotations

import re
from functools import lru_cache
from itertools import product
from typing import Iterable, Iterator, Mapping

__all__ = [
    "Multiset",
    "CnfOrdinal",
    "LESS",
    "EQUAL",
    "GREATER",
    "phi",
    "cnf_compare",
    "v",
    "grade",
    "disjoint_union",
    "proper_submultisets_v2",
    "schedule_candidate",
    "schedule_position",
    "schedule_count",
    "iter_schedule",
    "parse_multiset",
]

LESS, EQUAL, GREATER = -1, 0, 1


class Multiset(tuple):
    """Entries ``(id, multiplicity)`` sorted by id descending."""

    __slots__ = ()

    def __new__(cls, entries: Iterable[tuple[int, int]] = ()):
        entries = tuple((int(i), int(m)) for i, m in entries)
        for i, m in entries:
            if i < 0 or m < 1:
                raise ValueError(f"bad multiset entry ({i}, {m})")
        for a, b in zip(entries, entries[1:]):
            if a[0] <= b[0]:
                raise ValueError("multiset ids must strictly decrease")
        return super().__new__(cls, entries)

    @classmethod
    def from_ids(cls, ids: Iterable[int]) -> "Multiset":
        counts: dict[int, int] = {}
        for i in ids:
            counts[i] = counts.get(i, 0) + 1
        return cls.from_counts(counts)

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "Multiset":
        return cls(sorted(((i, m) for i, m in counts.items() if m), reverse=True))

    def counts(self) -> dict[int, int]:
        return dict(self)

    def ids(self) -> list[int]:
        """Elements with repetition, descending."""
        return [i for i, m in self for _ in range(m)]

    def distinct(self) -> list[int]:
        return [i for i, _ in self]

    @property
    def v(self) -> int:
        return sum(m for _, m in self)

    @property
    def grade(self) -> int:
        return sum((i + 1) * m for i, m in self)

    def __add__(self, other):  # disjoint union, not tuple concatenation
        return disjoint_union(self, other)

    def __repr__(self) -> str:
        return f"Multiset({format_multiset(self)})"

    def __str__(self) -> str:
        return format_multiset(self)


class CnfOrdinal(tuple):
    """Cantor normal form: ``((exponent, coefficient), ...)``, exponents descending."""

    __slots__ = ()

    def __new__(cls, terms: Iterable[tuple[int, int]] = ()):
        terms = tuple((int(e), int(c)) for e, c in terms)
        for e, c in terms:
            if e < 0 or c < 1:
                raise ValueError("bad CNF term")
        for a, b in zip(terms, terms[1:]):
            if a[0] <= b[0]:
                raise ValueError("CNF exponents must strictly decrease")
        return super().__new__(cls, terms)

    def __str__(self) -> str:
        if not self:
            return "0"
        parts = []
        for e, c in self:
            if e == 0:
                parts.append(str(c))
            else:
                base = "w" if e == 1 else f"w^{e}"
                parts.append(base if c == 1 else f"{base}*{c}")
        return " + ".join(parts)


def phi(A: Multiset) -> CnfOrdinal:
    return CnfOrdinal(A)


def cnf_compare(a: CnfOrdinal, b: CnfOrdinal) -> int:
    """LESS, EQUAL or GREATER.

    Term lists compare lexicographically by (exponent, coefficient); a proper
    prefix is smaller.  This is ordinal order for normal forms.
    """
    ta, tb = tuple(a), tuple(b)
    if ta == tb:
        return EQUAL
    return LESS if ta < tb else GREATER


def v(A: Multiset) -> int:
    return A.v


def grade(A: Multiset) -> int:
    return A.grade


def disjoint_union(A: Multiset, B: Multiset) -> Multiset:
    counts = dict(A)
    for i, m in B:
        counts[i] = counts.get(i, 0) + m
    return Multiset.from_counts(counts)


def proper_submultisets_v2(A: Multiset) -> list[Multiset]:
    """All B strictly inside A with at least two elements, by phi ascending."""
    ids = [i for i, _ in A]
    out = []
    for ms in product(*(range(m + 1) for _, m in A)):
        if sum(ms) < 2:
            continue
        B = Multiset((i, m) for i, m in zip(ids, ms) if m)
        if B != A:
            out.append(B)
    out.sort()
    return out


def maximal_proper_submultisets(A: Multiset) -> list[Multiset]:
    """A minus one copy of each distinct element, keeping those with v >= 2."""
    out = []
    for j, (i, m) in enumerate(A):
        entries = list(A)
        if m == 1:
            del entries[j]
        else:
            entries[j] = (i, m - 1)
        B = Multiset(entries)
        if B.v >= 2:
            out.append(B)
    return out


# ---------------------------------------------------------------------------
# schedule

@lru_cache(maxsize=None)
def _parts(g: int, m: int) -> int:
    """Number of multisets of grade g with all ids < m (partitions, parts <= m)."""
    if g == 0:
        return 1
    if m == 0:
        return 0
    if m > g:
        return _parts(g, g)
    return _parts(g, m - 1) + _parts(g - m, m)


def _grade_count(g: int) -> int:
    """Schedule candidates of grade g (partitions with at least two parts)."""
    return _parts(g, g) - 1 if g >= 2 else 0


@lru_cache(maxsize=None)
def _cumulative(g: int) -> int:
    """Number of candidates of grade < g."""
    if g <= 2:
        return 0
    return _cumulative(g - 1) + _grade_count(g - 1)


def schedule_count(max_grade: int) -> int:
    """Number of candidates of grade at most ``max_grade``."""
    return _cumulative(max_grade + 1)


def _with_max(g: int, e: int, c: int) -> int:
    """Multisets of grade g whose largest id is e with multiplicity c."""
    r = g - (e + 1) * c
    if r < 0:
        return 0
    return _parts(r, e)


def _unrank_grade(g: int, k: int, singleton_skip: bool = True) -> list[tuple[int, int]]:
    """k-th multiset of grade g in phi order (the singleton {g-1} excluded)."""
    entries = []
    bound = g  # ids must be < bound
    first = singleton_skip
    while g > 0:
        found = False
        for e in range(bound):
            for c in range(1, g // (e + 1) + 1):
                cnt = _with_max(g, e, c)
                if first and e == g - 1 and c == 1:
                    cnt -= 1  # the singleton is not a candidate
                if k < cnt:
                    entries.append((e, c))
                    g -= (e + 1) * c
                    bound = e
                    found = True
                    break
                k -= cnt
            if found:
                break
        if not found:
            raise IndexError("schedule index out of range")
        first = False
    return entries


def schedule_candidate(k: int) -> Multiset:
    """The k-th multiset with v >= 2 in (grade, phi) order."""
    if k < 0:
        raise IndexError("negative schedule index")
    g = 2
    while _cumulative(g + 1) <= k:
        g += 1
    return Multiset(_unrank_grade(g, k - _cumulative(g)))


def schedule_position(A: Multiset) -> int:
    """Inverse of ``schedule_candidate``."""
    if A.v < 2:
        raise ValueError("only multisets with v >= 2 are scheduled")
    g = A.grade
    pos = _cumulative(g)
    rem = g
    bound = g
    first = True
    for e, c in A:
        for e2 in range(bound):
            for c2 in range(1, rem // (e2 + 1) + 1):
                if (e2, c2) == (e, c):
                    break
                if (e2, c2) > (e, c):
                    break
                cnt = _with_max(rem, e2, c2)
                if first and e2 == rem - 1 and c2 == 1:
                    cnt -= 1
                pos += cnt
            if e2 >= e:
                break
        rem -= (e + 1) * c
        bound = e
        first = False
    return pos


def _grade_members(g: int, bound: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Multisets of grade g with ids < bound, in phi order."""
    if g == 0:
        yield ()
        return
    for e in range(min(bound, g)):
        for c in range(1, g // (e + 1) + 1):
            for rest in _grade_members(g - (e + 1) * c, e):
                yield ((e, c),) + rest


def iter_schedule(start_grade: int = 2) -> Iterator[Multiset]:
    """All candidates in schedule order, forever."""
    g = max(start_grade, 2)
    while True:
        for entries in _grade_members(g, g):
            if len(entries) == 1 and entries[0][1] == 1:
                continue
            yield Multiset(entries)
        g += 1


# ---------------------------------------------------------------------------
# text form

_ENTRY = re.compile(r"\s*(\d+)\s*(?:\^\s*(\d+))?\s*")


def parse_multiset(text: str) -> Multiset:
    """Parse ``{3, 0^2}``."""
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ValueError(f"bad multiset {text!r}")
    body = text[1:-1].strip()
    if not body:
        return Multiset()
    counts: dict[int, int] = {}
    for part in body.split(","):
        m = _ENTRY.fullmatch(part)
        if not m:
            raise ValueError(f"bad multiset entry {part!r}")
        i = int(m.group(1))
        counts[i] = counts.get(i, 0) + (int(m.group(2)) if m.group(2) else 1)
    return Multiset.from_counts(counts)


def format_multiset(A: Multiset) -> str:
    return "{" + ", ".join(str(i) if m == 1 else f"{i}^{m}" for i, m in A) + "}"
