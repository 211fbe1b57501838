"""Prime fields GF(p) and finitely supported vectors over them.

A vector is stored as its *serial* ``sum(c_i * p**i)``, a non-negative int.
For p = 2 the serial is simply the bitmask of the support, which makes the
hot paths of the enumeration code plain integer bit operations.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping

__all__ = ["FieldPrime", "GF2", "Vec0", "parse_vector", "format_vector"]


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class FieldPrime:
    """The prime field GF(p) together with digit-level vector arithmetic.

    ``FieldPrime(2)`` returns the shared :class:`GF2` instance, every other
    prime gets a shared generic instance.
    """

    _instances: dict[int, "FieldPrime"] = {}

    def __new__(cls, p: int = 2):
        inst = cls._instances.get(p)
        if inst is not None:
            return inst
        if not isinstance(p, int) or not _is_prime(p):
            raise ValueError(f"{p!r} is not a prime")
        inst = object.__new__(GF2 if p == 2 else cls)
        inst.p = p
        cls._instances[p] = inst
        return inst

    def __init__(self, p: int = 2):
        pass

    def __reduce__(self):
        return (FieldPrime, (self.p,))

    def __repr__(self) -> str:
        return f"FieldPrime({self.p})"

    # -- scalars -------------------------------------------------------
    def inv(self, a: int) -> int:
        a %= self.p
        if a == 0:
            raise ZeroDivisionError("inverse of 0")
        return pow(a, self.p - 2, self.p)

    # -- vectors as serials ---------------------------------------------
    def digit(self, v: int, i: int) -> int:
        return (v // self.p ** i) % self.p

    def digits(self, v: int) -> list[int]:
        """Little-endian digit list (no trailing zeros)."""
        p = self.p
        out = []
        while v:
            v, r = divmod(v, p)
            out.append(r)
        return out

    def from_digits(self, ds: Iterable[int]) -> int:
        p = self.p
        v = 0
        for d in reversed(list(ds)):
            v = v * p + d % p
        return v

    def from_coeffs(self, coeffs: Mapping[int, int]) -> int:
        p = self.p
        return sum((c % p) * p ** i for i, c in coeffs.items())

    def coeffs(self, v: int) -> dict[int, int]:
        return {i: d for i, d in enumerate(self.digits(v)) if d}

    def length(self, v: int) -> int:
        """1 + highest index with a nonzero digit (0 for the zero vector)."""
        n = 0
        p = self.p
        while v:
            v //= p
            n += 1
        return n

    def lead(self, v: int) -> int:
        """Lowest index with a nonzero digit, -1 for the zero vector."""
        if not v:
            return -1
        p = self.p
        i = 0
        while v % p == 0:
            v //= p
            i += 1
        return i

    def support(self, v: int) -> int:
        """Support as a bitmask of positions."""
        m = 0
        i = 0
        p = self.p
        while v:
            v, r = divmod(v, p)
            if r:
                m |= 1 << i
            i += 1
        return m

    def add(self, u: int, v: int) -> int:
        return self.from_digits(_zip_digits(self, u, v, 1))

    def axpy(self, a: int, x: int, y: int) -> int:
        """y + a*x."""
        a %= self.p
        if a == 0:
            return y
        return self.from_digits(_zip_digits(self, x, y, a))

    def scale(self, a: int, v: int) -> int:
        return self.axpy(a, v, 0)

    def normalize_lead(self, v: int) -> int:
        """Scale v so that its leading digit is 1."""
        c = self.lead(v)
        if c < 0:
            return 0
        return self.scale(self.inv(self.digit(v, c)), v)

    def reduce_at(self, v: int, row: int, pos: int) -> int:
        """Eliminate digit ``pos`` of v using ``row`` (whose digit at pos is 1)."""
        d = self.digit(v, pos)
        return self.axpy(-d, row, v) if d else v

    def below(self, v: int, i: int) -> int:
        """Digits strictly below position i."""
        return v % self.p ** i

    def above(self, v: int, i: int) -> int:
        """Digits strictly above position i, kept in place."""
        q = self.p ** (i + 1)
        return v - v % q


def _zip_digits(F: FieldPrime, x: int, y: int, a: int) -> list[int]:
    dx, dy = F.digits(x), F.digits(y)
    n = max(len(dx), len(dy))
    dx += [0] * (n - len(dx))
    dy += [0] * (n - len(dy))
    p = F.p
    return [(b + a * c) % p for c, b in zip(dx, dy)]


class GF2(FieldPrime):
    """GF(2) with serials as bitmasks."""

    def inv(self, a):
        if a % 2 == 0:
            raise ZeroDivisionError("inverse of 0")
        return 1

    def digit(self, v, i):
        return v >> i & 1

    def digits(self, v):
        return [v >> i & 1 for i in range(v.bit_length())]

    def from_digits(self, ds):
        v = 0
        for i, d in enumerate(ds):
            if d & 1:
                v |= 1 << i
        return v

    def from_coeffs(self, coeffs):
        v = 0
        for i, c in coeffs.items():
            if c & 1:
                v ^= 1 << i
        return v

    def coeffs(self, v):
        return {i: 1 for i in range(v.bit_length()) if v >> i & 1}

    def length(self, v):
        return v.bit_length()

    def lead(self, v):
        return (v & -v).bit_length() - 1

    def support(self, v):
        return v

    def add(self, u, v):
        return u ^ v

    def axpy(self, a, x, y):
        return y ^ x if a & 1 else y

    def scale(self, a, v):
        return v if a & 1 else 0

    def normalize_lead(self, v):
        return v

    def reduce_at(self, v, row, pos):
        return v ^ row if v >> pos & 1 else v

    def below(self, v, i):
        return v & ((1 << i) - 1)

    def above(self, v, i):
        return v >> (i + 1) << (i + 1)


@dataclass(frozen=True)
class Vec0:
    """A finitely supported vector, stored by serial."""

    serial: int
    field: FieldPrime = FieldPrime(2)

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, int], field: FieldPrime = FieldPrime(2)) -> "Vec0":
        return cls(field.from_coeffs(coeffs), field)

    @property
    def coeffs(self) -> dict[int, int]:
        return self.field.coeffs(self.serial)

    def __bool__(self) -> bool:
        return self.serial != 0

    def __str__(self) -> str:
        return format_vector(self.serial, self.field)


_TERM = re.compile(r"\s*(?:(\d+)\s*\*\s*)?e(\d+)\s*")


def parse_vector(text: str, field: FieldPrime) -> int:
    """Parse ``2*e3+e0`` style text into a serial. ``0`` is the zero vector."""
    text = text.strip()
    if text == "0":
        return 0
    if not text:
        raise ValueError("empty vector")
    coeffs: dict[int, int] = {}
    for term in text.split("+"):
        m = _TERM.fullmatch(term)
        if not m:
            raise ValueError(f"bad vector term {term!r}")
        c = int(m.group(1)) if m.group(1) else 1
        i = int(m.group(2))
        coeffs[i] = (coeffs.get(i, 0) + c) % field.p
    return field.from_coeffs(coeffs)


def format_vector(v: int, field: FieldPrime) -> str:
    if v == 0:
        return "0"
    parts = []
    for i, c in sorted(field.coeffs(v).items()):
        parts.append(f"e{i}" if c == 1 else f"{c}*e{i}")
    return "+".join(parts)
