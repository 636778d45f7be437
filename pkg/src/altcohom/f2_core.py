"""Exact GF(2) linear algebra and the small combinatorial kernels shared by the
cochain and symbolic layers.

Matrices are dense and bit packed: each row is a run of little-endian 64-bit
words held in a ``numpy.uint64`` array.  Elimination XORs whole rows at once,
which is fast enough for the largest cells used here (about 10^4 columns).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np

WORD = 64
_ONE = np.uint64(1)


def _words(cols: int) -> int:
    return (cols + WORD - 1) // WORD


@dataclass
class BitMatrix:
    """Dense GF(2) matrix with rows packed into uint64 words."""

    rows: int
    cols: int
    bits: np.ndarray

    def __post_init__(self) -> None:
        expected = (self.rows, _words(self.cols))
        if self.bits.shape != expected or self.bits.dtype != np.uint64:
            raise ValueError(f"bit payload must be uint64 of shape {expected}")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, np.zeros((rows, _words(cols)), dtype=np.uint64))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]] | np.ndarray) -> "BitMatrix":
        arr = np.asarray(dense, dtype=np.uint8) & 1
        if arr.ndim != 2:
            raise ValueError("dense input must be two dimensional")
        rows, cols = arr.shape
        return cls(rows, cols, pack_rows(arr))

    @classmethod
    def from_support(cls, support: Sequence[Iterable[int]], cols: int) -> "BitMatrix":
        """Build a matrix from, for each row, the column indices holding a 1.

        Repeated indices cancel, so callers may pass raw multiplicities."""
        m = cls.zeros(len(support), cols)
        for r, idxs in enumerate(support):
            for c in idxs:
                m.bits[r, c // WORD] ^= _ONE << np.uint64(c % WORD)
        return m

    def to_dense(self) -> np.ndarray:
        return unpack_rows(self.bits, self.cols)

    def row(self, r: int) -> np.ndarray:
        return unpack_rows(self.bits[r : r + 1], self.cols)[0]

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_dense(self.to_dense().T)

    def copy(self) -> "BitMatrix":
        return BitMatrix(self.rows, self.cols, self.bits.copy())

    def mul_vec(self, v: Sequence[int] | np.ndarray) -> np.ndarray:
        """Return M·v over GF(2)."""
        packed = pack_rows(np.asarray(v, dtype=np.uint8).reshape(1, -1) & 1)[0]
        prod = self.bits & packed
        return np.array([_parity_words(r) for r in prod], dtype=np.uint8)


def pack_rows(arr: np.ndarray) -> np.ndarray:
    """Pack a 0/1 array of shape (r, c) into uint64 words of shape (r, ceil(c/64))."""
    rows, cols = arr.shape
    nw = _words(cols)
    padded = np.zeros((rows, nw * WORD), dtype=np.uint8)
    padded[:, :cols] = arr
    by = np.packbits(padded, axis=1, bitorder="little")
    return by.view("<u8").astype(np.uint64, copy=False).reshape(rows, nw)


def unpack_rows(bits: np.ndarray, cols: int) -> np.ndarray:
    if bits.shape[0] == 0:
        return np.zeros((0, cols), dtype=np.uint8)
    by = np.ascontiguousarray(bits.astype("<u8")).view(np.uint8)
    out = np.unpackbits(by.reshape(bits.shape[0], -1), axis=1, bitorder="little")
    return out[:, :cols].astype(np.uint8)


def _parity_words(words: np.ndarray) -> int:
    acc = 0
    for w in words:
        acc ^= int(w)
    return bin(acc).count("1") & 1


def _eliminate(bits: np.ndarray, cols: int, full: bool) -> tuple[np.ndarray, list[int]]:
    """Gaussian elimination in place on a copy.

    With ``full`` the result is in reduced row echelon form, otherwise only
    rows below each pivot are cleared (enough for the rank)."""
    a = bits.copy()
    nrows = a.shape[0]
    r = 0
    pivots: list[int] = []
    for c in range(cols):
        if r == nrows:
            break
        w = c // WORD
        mask = _ONE << np.uint64(c % WORD)
        below = np.flatnonzero(a[r:, w] & mask)
        if below.size == 0:
            continue
        p = r + int(below[0])
        if p != r:
            a[[r, p]] = a[[p, r]]
        if full:
            hits = np.flatnonzero(a[:, w] & mask)
            hits = hits[hits != r]
        else:
            hits = r + 1 + np.flatnonzero(a[r + 1 :, w] & mask)
        if hits.size:
            a[hits] ^= a[r]
        pivots.append(c)
        r += 1
    return a, pivots


def rank(m: BitMatrix) -> int:
    """GF(2) rank; the argument is not modified."""
    if m.rows == 0 or m.cols == 0:
        return 0
    _, piv = _eliminate(m.bits, m.cols, full=False)
    return len(piv)


def rref(m: BitMatrix) -> tuple[BitMatrix, list[int]]:
    """Reduced row echelon form (nonzero rows only) and pivot columns."""
    a, piv = _eliminate(m.bits, m.cols, full=True)
    return BitMatrix(len(piv), m.cols, a[: len(piv)].copy()), piv


def kernel_basis(m: BitMatrix) -> list[np.ndarray]:
    """Basis of {v : M·v = 0}; one vector per free column."""
    red, piv = rref(m)
    dense = red.to_dense()
    pivset = set(piv)
    out: list[np.ndarray] = []
    for f in range(m.cols):
        if f in pivset:
            continue
        v = np.zeros(m.cols, dtype=np.uint8)
        v[f] = 1
        for i, c in enumerate(piv):
            if dense[i, f]:
                v[c] = 1
        out.append(v)
    return out


def solve_in_span(rows: BitMatrix, target: Sequence[int] | np.ndarray) -> np.ndarray | None:
    """Coefficients c with sum_i c_i·rows_i = target, or None outside the span."""
    t = np.asarray(target, dtype=np.uint8) & 1
    if t.shape != (rows.cols,):
        raise ValueError("target length must equal the number of columns")
    # Augment with an identity block that records row combinations.
    aug = np.concatenate([rows.to_dense(), np.eye(rows.rows, dtype=np.uint8)], axis=1)
    red, piv = rref(BitMatrix.from_dense(aug) if rows.rows else BitMatrix.zeros(0, rows.cols))
    if rows.rows == 0:
        return np.zeros(0, dtype=np.uint8) if not t.any() else None
    dense = red.to_dense()
    cur = np.concatenate([t, np.zeros(rows.rows, dtype=np.uint8)])
    for i, c in enumerate(piv):
        if c >= rows.cols:
            break
        if cur[c]:
            cur ^= dense[i]
    if cur[: rows.cols].any():
        return None
    return cur[rows.cols :].copy()


class SpanBuilder:
    """Incremental echelon basis over GF(2) using Python integers as bitsets.

    ``add`` reports whether a vector was independent of everything added so
    far; ``reduce`` returns the residue of a vector together with the mask of
    added vectors used, so membership tests also yield coordinates."""

    def __init__(self) -> None:
        self._piv: dict[int, tuple[int, int]] = {}
        self.count = 0

    def reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        while v:
            top = v.bit_length() - 1
            hit = self._piv.get(top)
            if hit is None:
                return v, combo
            v ^= hit[0]
            combo ^= hit[1]
        return 0, combo

    def add(self, v: int) -> bool:
        res, combo = self.reduce(v)
        if res == 0:
            self.count += 1
            return False
        self._piv[res.bit_length() - 1] = (res, combo ^ (1 << self.count))
        self.count += 1
        return True

    def coordinates(self, v: int) -> int | None:
        """Mask of added vectors summing to v (only meaningful when the added
        vectors were independent), or None if v is outside the span."""
        res, combo = self.reduce(v)
        return None if res else combo

    @property
    def rank(self) -> int:
        return len(self._piv)


def int_rank(vectors: Iterable[int]) -> int:
    sb = SpanBuilder()
    for v in vectors:
        sb.add(v)
    return sb.rank


@dataclass(frozen=True)
class Shuffle:
    """A (p,q)-shuffle: zeros mark first-group slots, ones second-group slots."""

    pattern: tuple[int, ...]
    parity: int

    @property
    def is_even(self) -> bool:
        return self.parity == 0


def inversion_parity(pattern: Sequence[int]) -> int:
    ones = 0
    inv = 0
    for b in pattern:
        if b:
            ones += 1
        else:
            inv += ones
    return inv & 1


@lru_cache(maxsize=None)
def _shuffles(p: int, q: int) -> tuple[Shuffle, ...]:
    out = []
    n = p + q
    for ones in combinations(range(n), q):
        pat = [0] * n
        for i in ones:
            pat[i] = 1
        out.append(tuple(pat))
    out.sort()
    return tuple(Shuffle(pat, inversion_parity(pat)) for pat in out)


def shuffles(p: int, q: int) -> list[Shuffle]:
    """All binom(p+q, p) shuffles in lexicographic pattern order."""
    if p < 0 or q < 0:
        raise ValueError("shuffle sizes must be non-negative")
    return list(_shuffles(p, q))


@lru_cache(maxsize=None)
def shuffle_counts(p: int, q: int) -> tuple[int, int]:
    """(number of even, number of odd) (p,q)-shuffles."""
    ev = sum(1 for s in _shuffles(p, q) if s.parity == 0)
    return ev, len(_shuffles(p, q)) - ev


def binom_mod2(n: int, k: int) -> int:
    """binom(n, k) mod 2 by Lucas; 0 when k < 0 or k > n."""
    if k < 0 or n < 0 or k > n:
        return 0
    return 1 if (k & (n - k)) == 0 else 0


def binom(a: int, b: int) -> int:
    """Integer binomial with the convention binom(a, b) = 0 unless 0 <= b <= a."""
    if b < 0 or a < 0 or b > a:
        return 0
    from math import comb

    return comb(a, b)


def compositions(total: int, maxima: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Tuples (c_1..c_k) with 0 <= c_i <= maxima[i] summing to total."""
    k = len(maxima)
    if k == 0:
        if total == 0:
            yield ()
        return
    rest = sum(maxima[1:])
    for c in range(max(0, total - rest), min(maxima[0], total) + 1):
        for tail in compositions(total - c, maxima[1:]):
            yield (c,) + tail


def partitions_into(total: int, parts: Sequence[int]) -> Iterator[tuple[int, ...]]:
    """Non-negative multiplicities (c_i) with sum c_i * parts[i] == total."""
    if not parts:
        if total == 0:
            yield ()
        return
    head = parts[0]
    if head <= 0:
        raise ValueError("parts must be positive")
    for c in range(total // head + 1):
        for tail in partitions_into(total - c * head, parts[1:]):
            yield (c,) + tail
