from __future__ import annotations

import itertools

import numpy as np
from hypothesis import given, strategies as st

from altcohom.f2_core import (
    BitMatrix,
    SpanBuilder,
    binom,
    binom_mod2,
    compositions,
    int_rank,
    kernel_basis,
    partitions_into,
    rank,
    rref,
    shuffle_counts,
    shuffles,
    solve_in_span,
)

dense_matrices = st.integers(1, 9).flatmap(
    lambda r: st.integers(1, 70).flatmap(
        lambda c: st.lists(st.lists(st.integers(0, 1), min_size=c, max_size=c), min_size=r, max_size=r)
    )
)


def brute_rank(rows) -> int:
    vecs = [int("".join(map(str, r)), 2) for r in rows]
    return int_rank(vecs)


def test_rank_small_cases():
    assert rank(BitMatrix.from_dense(np.eye(3, dtype=int))) == 3
    assert rank(BitMatrix.zeros(4, 5)) == 0
    assert rank(BitMatrix.from_dense([[1, 0, 1, 1], [1, 0, 1, 1]])) == 1


def test_kernel_small_cases():
    assert kernel_basis(BitMatrix.from_dense(np.eye(2, dtype=int))) == []
    assert len(kernel_basis(BitMatrix.zeros(2, 3))) == 3
    ker = kernel_basis(BitMatrix.from_dense([[1, 1, 0]]))
    span = {tuple((a * ker[0] + b * ker[1]) % 2) for a in (0, 1) for b in (0, 1)}
    assert span == {(0, 0, 0), (1, 1, 0), (0, 0, 1), (1, 1, 1)}


def test_solve_in_span_examples():
    c = solve_in_span(BitMatrix.from_dense(np.eye(3, dtype=int)), [0, 1, 0])
    assert list(c) == [0, 1, 0]
    assert solve_in_span(BitMatrix.from_dense([[1, 1]]), [0, 1]) is None
    c = solve_in_span(BitMatrix.from_dense([[1, 1, 0], [0, 1, 1]]), [1, 0, 1])
    assert list(c) == [1, 1]


@given(dense_matrices)
def test_rank_matches_integer_elimination(rows):
    m = BitMatrix.from_dense(rows)
    assert rank(m) == brute_rank(rows)
    assert rank(m) <= min(m.rows, m.cols)


@given(dense_matrices, st.randoms())
def test_rank_invariant_under_row_permutation(rows, rnd):
    perm = list(rows)
    rnd.shuffle(perm)
    assert rank(BitMatrix.from_dense(rows)) == rank(BitMatrix.from_dense(perm))


@given(dense_matrices)
def test_kernel_vectors_are_annihilated(rows):
    m = BitMatrix.from_dense(rows)
    ker = kernel_basis(m)
    assert len(ker) == m.cols - rank(m)
    for v in ker:
        assert not m.mul_vec(v).any()


@given(dense_matrices)
def test_rank_does_not_mutate(rows):
    m = BitMatrix.from_dense(rows)
    before = m.bits.copy()
    rank(m)
    rref(m)
    assert np.array_equal(before, m.bits)


def test_padding_bits_are_zero():
    m = BitMatrix.from_dense([[1] * 70])
    assert m.bits.shape == (1, 2)
    assert int(m.bits[0, 1]) == (1 << 6) - 1


def test_span_builder_coordinates():
    sb = SpanBuilder()
    assert sb.add(0b011)
    assert sb.add(0b110)
    assert not sb.add(0b101)
    assert sb.coordinates(0b101) == 0b011
    assert sb.coordinates(0b001) is None
    assert sb.rank == 2


def test_shuffle_counts_examples():
    assert len(shuffles(1, 2)) == 3
    assert shuffle_counts(2, 2) == (4, 2)
    assert [s.is_even for s in shuffles(0, 3)] == [True]


@given(st.integers(0, 6), st.integers(0, 6))
def test_shuffle_total_and_order(p, q):
    sh = shuffles(p, q)
    assert len(sh) == binom(p + q, p)
    assert [s.pattern for s in sh] == sorted(s.pattern for s in sh)
    for s in sh:
        inv = sum(1 for a, b in itertools.combinations(s.pattern, 2) if a == 1 and b == 0)
        assert s.parity == inv % 2


@given(st.integers(0, 200), st.integers(0, 200))
def test_binom_mod2_lucas(n, k):
    assert binom_mod2(n, k) == binom(n, k) % 2


def test_compositions_and_partitions():
    assert sorted(compositions(2, [1, 1, 1])) == [(0, 1, 1), (1, 0, 1), (1, 1, 0)]
    assert sorted(partitions_into(4, [1, 2])) == [(0, 2), (2, 1), (4, 0)]
