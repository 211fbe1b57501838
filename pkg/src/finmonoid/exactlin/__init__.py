"""Exact linear algebra over GF(p) and the enumeration of subspaces."""
from .field import FieldPrime, GF2, Vec0, format_vector, parse_vector
from .subspace import (
    Echelon,
    Subspace,
    ambient_bound,
    canonicalize,
    dim,
    format_subspace,
    is_subspace_of,
    parse_subspace,
    subspace_sum,
)
from .enumeration import (
    block_offset,
    block_sizes,
    completions,
    count_upto,
    galois_number,
    gaussian_binomial,
    rank,
    unrank,
)
from .search import block_least, least_superspace_after

# the operation is called "sum" in the interface description
sum = subspace_sum

__all__ = [
    "FieldPrime",
    "GF2",
    "Vec0",
    "Subspace",
    "Echelon",
    "canonicalize",
    "subspace_sum",
    "sum",
    "is_subspace_of",
    "dim",
    "ambient_bound",
    "rank",
    "unrank",
    "block_sizes",
    "block_offset",
    "completions",
    "count_upto",
    "galois_number",
    "gaussian_binomial",
    "least_superspace_after",
    "block_least",
    "parse_vector",
    "format_vector",
    "parse_subspace",
    "format_subspace",
]
