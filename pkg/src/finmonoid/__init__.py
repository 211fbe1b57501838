"""A free commutative monoid structure on the finite-dimensional subspaces
of the finite-support space over GF(p), built by a greedy construction,
with its group completion and finite checks of invariant-mean transfers."""
from .exactlin import FieldPrime, Subspace, canonicalize, parse_subspace, rank, unrank
from .ordmset import Multiset, parse_multiset, schedule_candidate
from .monoid import ConstructionState, classify, f_apply, f_inverse, factor, star, verify_axioms

__version__ = "0.1.0"
