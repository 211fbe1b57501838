"""Canonical (reduced row echelon) subspaces of the finite-support space."""
from __future__ import annotations

from typing import Iterable

from .field import FieldPrime, Vec0, format_vector, parse_vector

__all__ = [
    "Subspace",
    "canonicalize",
    "subspace_sum",
    "is_subspace_of",
    "dim",
    "ambient_bound",
    "parse_subspace",
    "format_subspace",
    "Echelon",
]


class Echelon:
    """Mutable RREF accumulator (pivot -> row), used to build spans and sums."""

    __slots__ = ("F", "rows", "pmask", "binary")

    def __init__(self, field: FieldPrime, rows: Iterable[int] = ()):
        self.F = field
        self.binary = field.p == 2
        self.rows: dict[int, int] = {}
        self.pmask = 0
        for r in rows:
            c = field.lead(r)
            self.rows[c] = r
            self.pmask |= 1 << c

    def reduce(self, v: int) -> int:
        """Remainder of v modulo the rows (zero exactly when v is in the span)."""
        if self.binary:
            rows = self.rows
            t = v & self.pmask
            while t:
                low = t & -t
                v ^= rows[low.bit_length() - 1]
                t ^= low
            return v
        F = self.F
        for c in sorted(self.rows):
            v = F.reduce_at(v, self.rows[c], c)
        return v

    def insert(self, v: int) -> int:
        """Add v to the span; returns the new pivot or -1 if v was dependent."""
        v = self.reduce(v)
        if not v:
            return -1
        F = self.F
        v = F.normalize_lead(v)
        c = F.lead(v)
        rows = self.rows
        if self.binary:
            for k, r in rows.items():
                if r >> c & 1:
                    rows[k] = r ^ v
        else:
            for k in rows:
                rows[k] = F.reduce_at(rows[k], v, c)
        rows[c] = v
        self.pmask |= 1 << c
        return c

    def rows_tuple(self) -> tuple[int, ...]:
        rows = self.rows
        return tuple(rows[c] for c in sorted(rows))


def rref_rows(F: FieldPrime, gens: Iterable[int]) -> tuple[int, ...]:
    E = Echelon(F)
    for g in gens:
        if g:
            E.insert(g)
    return E.rows_tuple()


def reduce_vector(F: FieldPrime, rows: Iterable[int], v: int) -> int:
    """Remainder of v after elimination against RREF rows."""
    return Echelon(F, rows).reduce(v)


class Subspace:
    """A finite-dimensional subspace given by its RREF rows (as serials).

    Rows are sorted by pivot ascending; each pivot digit is 1 and every other
    row vanishes in that column.  Equality is equality of row tuples.
    """

    __slots__ = ("rows", "field", "_hash", "_id")

    def __init__(self, rows: tuple[int, ...] = (), field: FieldPrime = FieldPrime(2), *, check: bool = True):
        rows = tuple(rows)
        if check:
            _check_rref(field, rows)
        self.rows = rows
        self.field = field
        self._hash = None
        self._id = None

    @classmethod
    def span(cls, gens: Iterable, field: FieldPrime = FieldPrime(2)) -> "Subspace":
        ints = []
        for g in gens:
            if isinstance(g, Vec0):
                if g.field is not field:
                    raise ValueError("field mismatch")
                ints.append(g.serial)
            elif isinstance(g, dict):
                ints.append(field.from_coeffs(g))
            else:
                ints.append(int(g))
        return cls(rref_rows(field, ints), field, check=False)

    @classmethod
    def zero(cls, field: FieldPrime = FieldPrime(2)) -> "Subspace":
        return cls((), field, check=False)

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple(self.field.lead(r) for r in self.rows)

    @property
    def ambient(self) -> int:
        """Least n with the subspace inside GF(p)^n (0 for the zero space)."""
        F = self.field
        return max((F.length(r) for r in self.rows), default=0)

    def key(self) -> tuple:
        """Sort key realizing the enumeration order of nonzero subspaces."""
        return (self.ambient, len(self.rows), self.rows)

    @property
    def id(self) -> int:
        """Position in the enumeration (cached)."""
        if self._id is None:
            from .enumeration import rank

            self._id = rank(self)
        return self._id

    def vectors(self) -> list[Vec0]:
        return [Vec0(r, self.field) for r in self.rows]

    def contains(self, v: int) -> bool:
        return reduce_vector(self.field, self.rows, v) == 0

    def __le__(self, other: "Subspace") -> bool:
        return is_subspace_of(self, other)

    def __add__(self, other: "Subspace") -> "Subspace":
        return subspace_sum(self, other)

    def __eq__(self, other) -> bool:
        return isinstance(other, Subspace) and self.field is other.field and self.rows == other.rows

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.field.p, self.rows))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.rows)

    def __repr__(self) -> str:
        return f"Subspace({format_subspace(self)!r}, p={self.field.p})"

    def __str__(self) -> str:
        return format_subspace(self)

    def __getstate__(self):
        return (self.rows, self.field.p)

    def __setstate__(self, state):
        self.rows, p = state
        self.field = FieldPrime(p)
        self._hash = None
        self._id = None


def _check_rref(F: FieldPrime, rows: tuple[int, ...]) -> None:
    last = -1
    pivots = []
    for r in rows:
        c = F.lead(r)
        if c <= last:
            raise ValueError("rows not in RREF: pivots must strictly increase")
        if F.digit(r, c) != 1:
            raise ValueError("rows not in RREF: pivot entry must be 1")
        pivots.append(c)
        last = c
    for r in rows:
        for c in pivots:
            if c != F.lead(r) and F.digit(r, c):
                raise ValueError("rows not in RREF: nonzero entry in a pivot column")


def canonicalize(generators: Iterable, field: FieldPrime = FieldPrime(2)) -> Subspace:
    """RREF canonical form of the span of ``generators``."""
    return Subspace.span(generators, field)


def subspace_sum(U: Subspace, W: Subspace) -> Subspace:
    if U.field is not W.field:
        raise ValueError("field mismatch")
    if not W.rows:
        return U
    if not U.rows:
        return W
    E = Echelon(U.field, U.rows)
    for r in W.rows:
        E.insert(r)
    return Subspace(E.rows_tuple(), U.field, check=False)


def is_subspace_of(U: Subspace, W: Subspace) -> bool:
    if U.field is not W.field:
        raise ValueError("field mismatch")
    if len(U.rows) > len(W.rows):
        return False
    E = Echelon(W.field, W.rows)
    return all(E.reduce(r) == 0 for r in U.rows)


def dim(U: Subspace) -> int:
    return len(U.rows)


def ambient_bound(U: Subspace) -> int:
    if not U.rows:
        raise ValueError("ambient_bound of the zero subspace")
    return U.ambient


def parse_subspace(text: str, field: FieldPrime = FieldPrime(2)) -> Subspace:
    """Parse ``e0+e1;e2``; an empty string or ``0`` is the zero subspace."""
    text = text.strip()
    if text in ("", "0", "<0>", "<>"):
        return Subspace.zero(field)
    if text.startswith("<") and text.endswith(">"):
        text = text[1:-1].replace(",", ";")
    gens = [parse_vector(g, field) for g in text.split(";")]
    return Subspace.span(gens, field)


def format_subspace(U: Subspace) -> str:
    if not U.rows:
        return "<0>"
    return "<" + ",".join(format_vector(r, U.field) for r in U.rows) + ">"
