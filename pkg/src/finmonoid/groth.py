"""Group completion of the free commutative monoid.

Two representations of the same group:

* ``MonoidPair(s, t)``: a formal difference ``s - t`` of factored elements,
  compared with ``s1 + t2 == t1 + s2``;
* ``GrothElem``: integer exponents over prime ids, the normal form.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

from .ordmset import Multiset, disjoint_union

__all__ = [
    "MonoidPair",
    "GrothElem",
    "pair_equiv",
    "normalize",
    "g_add",
    "g_neg",
    "embed",
    "format_groth",
]


@dataclass(frozen=True)
class MonoidPair:
    s: Multiset
    t: Multiset


class GrothElem(dict):
    """Map prime id -> nonzero integer exponent."""

    def __init__(self, items: Mapping[int, int] | None = None):
        super().__init__()
        if items:
            for k, e in dict(items).items():
                if e:
                    self[int(k)] = int(e)

    def __hash__(self):
        return hash(tuple(sorted(self.items())))

    def __str__(self) -> str:
        return format_groth(self)


def pair_equiv(a: MonoidPair, b: MonoidPair) -> bool:
    return disjoint_union(a.s, b.t) == disjoint_union(a.t, b.s)


def normalize(a: MonoidPair, state=None) -> GrothElem:
    """Exponent vector of ``s - t``.

    With a construction ``state`` the ids are checked to be prime.
    """
    if state is not None:
        from .monoid import CompositeError, Kind, classify

        for A in (a.s, a.t):
            for i in A.distinct():
                if classify(state, state.element(i)) is not Kind.P:
                    raise CompositeError(f"id {i} is composite; factor it first")
    out: dict[int, int] = {}
    for i, m in a.s:
        out[i] = out.get(i, 0) + m
    for i, m in a.t:
        out[i] = out.get(i, 0) - m
    return GrothElem(out)


def g_add(x: Mapping[int, int], y: Mapping[int, int]) -> GrothElem:
    out = dict(x)
    for k, e in y.items():
        out[k] = out.get(k, 0) + e
    return GrothElem(out)


def g_neg(x: Mapping[int, int]) -> GrothElem:
    return GrothElem({k: -e for k, e in x.items()})


def embed(F, state, deadline: Optional[float] = None) -> GrothElem:
    """Image of a subspace in the group: its factor multiset as exponents."""
    from .monoid import factor

    return normalize(MonoidPair(factor(state, F, deadline), Multiset()))


def format_groth(x: Mapping[int, int]) -> str:
    """``+2·[id0] −1·[id7]`` with ids in descending order; ``0`` when empty."""
    if not x:
        return "0"
    parts = []
    for k in sorted(x, reverse=True):
        e = x[k]
        sign = "+" if e > 0 else "−"
        parts.append(f"{sign}{abs(e)}·[id{k}]")
    return " ".join(parts)
