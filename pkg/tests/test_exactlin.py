import itertools
import pickle
import threading

import pytest
from hypothesis import given, settings, strategies as st

from finmonoid.exactlin import (
    FieldPrime,
    Subspace,
    ambient_bound,
    block_sizes,
    canonicalize,
    dim,
    format_subspace,
    galois_number,
    gaussian_binomial,
    is_subspace_of,
    least_superspace_after,
    parse_subspace,
    parse_vector,
    format_vector,
    rank,
    subspace_sum,
    unrank,
)
from finmonoid.exactlin.enumeration import _RankMemo
from finmonoid.exactlin.search import block_least

import oracle

F2 = FieldPrime(2)
F3 = FieldPrime(3)


def S(text, F=F2):
    return parse_subspace(text, F)


# -- fields and vectors ------------------------------------------------------

def test_field_cache_and_validation():
    assert FieldPrime(2) is F2
    assert FieldPrime(3) is F3
    with pytest.raises(ValueError):
        FieldPrime(4)
    with pytest.raises(ValueError):
        FieldPrime(1)


def test_vector_syntax_roundtrip():
    for F in (F2, F3, FieldPrime(5)):
        for v in range(1, F.p ** 4):
            assert parse_vector(format_vector(v, F), F) == v
    assert parse_vector("e0+e1", F2) == 3
    assert parse_vector("2*e1+e0", F3) == 1 + 2 * 3
    assert format_vector(0, F2) == "0"


@pytest.mark.parametrize("bad", ["e", "x0", "e0+", "3*e0+*e1"])
def test_vector_syntax_errors(bad):
    with pytest.raises(ValueError):
        parse_vector(bad, F2)


# -- canonical form and the basic operations --------------------------------

def test_sum_examples():
    assert subspace_sum(S("e0"), Subspace.zero()) == S("e0")
    assert subspace_sum(S("e0"), S("e1")) == S("e0;e1")
    assert subspace_sum(S("e0"), S("e0+e1")) == S("e0;e1")


def test_containment_examples():
    assert is_subspace_of(Subspace.zero(), S("e3"))
    assert is_subspace_of(S("e0"), S("e0;e1"))
    assert not is_subspace_of(S("e0"), S("e0+e1"))


def test_dim_and_ambient_examples():
    assert dim(Subspace.zero()) == 0
    assert dim(S("e0")) == 1
    assert dim(S("e0;e1")) == 2
    assert ambient_bound(S("e0")) == 1
    assert ambient_bound(S("e1")) == 2
    assert ambient_bound(S("e0+e1;e2")) == 3
    with pytest.raises(ValueError):
        ambient_bound(Subspace.zero())


def test_field_mismatch():
    with pytest.raises(ValueError):
        subspace_sum(S("e0"), S("e0", F3))
    with pytest.raises(ValueError):
        is_subspace_of(S("e0"), S("e0", F3))


def test_rref_validation():
    Subspace((1, 2), F2)
    with pytest.raises(ValueError):
        Subspace((3, 2), F2)  # e0+e1 has a nonzero entry in the pivot column of e1
    with pytest.raises(ValueError):
        Subspace((2, 1), F2)
    with pytest.raises(ValueError):
        Subspace((2,), F3)  # pivot entry 2


def test_subspace_text():
    assert format_subspace(S("e1;e0+e1")) == "<e0,e1>"
    assert format_subspace(Subspace.zero()) == "<0>"
    for text in ("", "0", "<0>", "<>"):
        assert parse_subspace(text) == Subspace.zero()
    assert parse_subspace("<e0,e2>") == S("e0;e2")


def test_pickle_and_hash():
    U = S("e0+e2;e1", F3)
    V = pickle.loads(pickle.dumps(U))
    assert V == U and hash(V) == hash(U) and V.field is F3


@settings(max_examples=200, deadline=None)
@given(st.lists(st.integers(0, 2 ** 12 - 1), max_size=8))
def test_canonicalize_idempotent_gf2(gens):
    U = canonicalize(gens, F2)
    assert canonicalize(U.rows, F2) == U
    for g in gens:
        assert U.contains(g)
    assert U.dim <= len(gens)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.lists(st.integers(0, 2), min_size=5, max_size=5), max_size=6))
def test_canonicalize_matches_oracle_gf3(gen_digits):
    gens = [F3.from_digits(d) for d in gen_digits]
    U = canonicalize(gens, F3)
    assert canonicalize(U.rows, F3) == U
    expected = tuple(oracle.serial(r, 3) for r in oracle.rref(gen_digits, 3)) if gen_digits else ()
    assert U.rows == expected


def test_sum_laws_on_prefix():
    elems = [Subspace.zero()] + [unrank(i) for i in range(40)]
    for U in elems:
        assert subspace_sum(U, Subspace.zero()) == U
        assert subspace_sum(U, U) == U
    for U, W in itertools.product(elems, repeat=2):
        assert subspace_sum(U, W) == subspace_sum(W, U)
        assert subspace_sum(U, W).dim <= U.dim + W.dim
    for U, V, W in itertools.product(elems[::2], repeat=3):
        assert subspace_sum(subspace_sum(U, V), W) == subspace_sum(U, subspace_sum(V, W))


def test_containment_in_sum_on_prefix():
    elems = [unrank(i) for i in range(60)]
    for U, W in itertools.product(elems, repeat=2):
        T = subspace_sum(U, W)
        assert is_subspace_of(U, T) and is_subspace_of(W, T)
        assert (U <= W) == (subspace_sum(U, W) == W)


# -- enumeration ---------------------------------------------------------------

def test_rank_examples():
    assert rank(S("e0")) == 0
    assert rank(S("e1")) == 1
    assert rank(S("e0+e1")) == 2
    assert rank(S("e0;e1")) == 3
    assert rank(S("e0;e1;e2")) == 14
    with pytest.raises(ValueError):
        rank(Subspace.zero())


def test_unrank_examples():
    assert unrank(0) == S("e0")
    assert unrank(3) == S("e0;e1")
    assert unrank(14) == S("e0;e1;e2")


def test_block_sizes_examples():
    assert block_sizes(1, F2) == [1]
    assert block_sizes(2, F2) == [1, 3]
    assert block_sizes(4, F2) == [1, 3, 11, 51]


@pytest.mark.parametrize("p,n", [(2, 4), (3, 3), (5, 2)])
def test_enumeration_matches_closure_oracle(p, n):
    F = FieldPrime(p)
    order, keys = oracle.theta_order(n, p)
    assert len(order) + 1 == galois_number(n, p)
    sizes = [sum(1 for k in keys if k[0] == m) for m in range(1, n + 1)]
    assert block_sizes(n, F) == sizes
    for i, rows in enumerate(order):
        U = Subspace(rows, F)
        assert rank(U) == i
        assert unrank(i, F) == U


def test_galois_numbers():
    assert [galois_number(n, 2) for n in range(5)] == [1, 2, 5, 16, 67]
    assert gaussian_binomial(4, 2, 2) == 35
    assert gaussian_binomial(3, 1, 3) == 13


def test_rank_unrank_roundtrip_prefix():
    for i in range(1000):
        U = unrank(i)
        assert rank(Subspace(U.rows, F2)) == i
    for i in range(300):
        assert rank(Subspace(unrank(i, F3).rows, F3)) == i


def test_rank_unrank_large_ids():
    for i in (10 ** 6, 10 ** 12 + 7, 2 ** 80 + 12345):
        U = unrank(i)
        assert rank(Subspace(U.rows, F2)) == i
    U = S("e0+e7;e3+e40;e41")
    assert unrank(rank(U)) == U


def test_rank_memo_consistent_across_threads():
    subs = [unrank(i) for i in range(500, 700)]
    expected = [rank(Subspace(U.rows, F2)) for U in subs]
    memo = _RankMemo()
    results = [None] * 4

    def work(j):
        results[j] = [memo.rank(Subspace(U.rows, F2)) for U in subs[j % 2::2]]

    threads = [threading.Thread(target=work, args=(j,)) for j in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert results[0] == expected[0::2] and results[1] == expected[1::2]
    assert results[2] == results[0] and results[3] == results[1]


# -- successor search ----------------------------------------------------------

def _scan(W, M, F):
    i = -1 if M is None else rank(M)
    while True:
        i += 1
        U = unrank(i, F)
        if is_subspace_of(W, U):
            return U


@pytest.mark.parametrize("p,top", [(2, 400), (3, 150)])
def test_least_superspace_matches_scan(p, top):
    F = FieldPrime(p)
    import random

    rnd = random.Random(p)
    cases = [(Subspace.zero(F), None), (unrank(0, F), None)]
    for _ in range(250):
        W = unrank(rnd.randrange(top), F) if rnd.random() < 0.9 else Subspace.zero(F)
        M = unrank(rnd.randrange(top), F)
        cases.append((W, M))
    for W, M in cases:
        assert least_superspace_after(W, M) == _scan(W, M, F), (W, M)


def test_least_superspace_examples():
    assert least_superspace_after(S("e0"), S("e0")) == S("e0;e1")
    assert least_superspace_after(S("e0;e1"), S("e0;e1")) == S("e0;e1;e2")
    assert least_superspace_after(S("e0;e1"), S("e0;e1;e2")) == S("e0;e1;e3")
    M = unrank(1234)
    assert least_superspace_after(Subspace.zero(), M) == unrank(1235)


def test_block_least_exhaustive_small():
    for n in range(1, 5):
        block = [unrank(i) for i in range(2 ** 10) if unrank(i).ambient == n]
        for W in [unrank(i) for i in range(15)]:
            for d in range(1, n + 1):
                got = block_least(W, n, d)
                want = next((U for U in block if U.dim == d and W <= U), None)
                assert got == want, (W, n, d)
