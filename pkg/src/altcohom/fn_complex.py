"""Fox-Neuwirth cochain complexes FN_n (symmetric groups) and FNA_n
(alternating groups).

A cochain basis element is a sequence of n-1 non-negative integers; in the
alternating complex it also carries a charge.  Charges are stored as bits:
0 for ``+`` and 1 for ``-``, so conjugation is XOR with 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterator, Mapping, Sequence

import numpy as np

from .f2_core import BitMatrix

Seq = tuple[int, ...]
PLUS, MINUS = 0, 1
CHARGE_TEXT = {PLUS: "+", MINUS: "-"}

# Resource cap on the number of basis cochains in a single degree cell.
MAX_CELL = 60000


class CellTooLarge(RuntimeError):
    """A requested (n, degree) cell exceeds the elimination size cap."""


class NotACocycle(ValueError):
    pass


# ---------------------------------------------------------------------------
# Blocks and shuffles


def ell_blocks(g: Sequence[int], ell: int) -> list[Seq]:
    """Maximal runs of entries greater than ``ell``, delimited by entries
    at most ``ell`` and by the two virtual boundary entries."""
    blocks: list[Seq] = []
    cur: list[int] = []
    for a in g:
        if a <= ell:
            blocks.append(tuple(cur))
            cur = []
        else:
            cur.append(a)
    blocks.append(tuple(cur))
    return blocks


def _join(blocks: Sequence[Seq], sep: int) -> Seq:
    out: list[int] = []
    for k, b in enumerate(blocks):
        if k:
            out.append(sep)
        out.extend(b)
    return tuple(out)


def block_shuffle_parity(pattern: Sequence[int], left: Sequence[Seq], right: Sequence[Seq]) -> int:
    """Sign of the permutation of configuration points induced by a block
    shuffle.  A block with k entries spans k+1 points, so moving a right
    block past a left block costs (len+1)(len'+1) transpositions."""
    li = ri = 0
    ones_pts = 0
    par = 0
    for b in pattern:
        if b:
            ones_pts += len(right[ri]) + 1
            ri += 1
        else:
            par += ones_pts * (len(left[li]) + 1)
            li += 1
    return par & 1


@lru_cache(maxsize=None)
def _patterns(p: int, q: int) -> tuple[tuple[int, ...], ...]:
    out = []
    for ones in combinations(range(p + q), q):
        pat = [0] * (p + q)
        for i in ones:
            pat[i] = 1
        out.append(tuple(pat))
    out.sort()
    return tuple(out)


def delta_i_terms(g: Seq, i: int) -> list[tuple[Seq, int]]:
    """The shuffled sequences of the i-th face (1-based) with parities.

    Each shuffle contributes one (sequence, parity) pair; equal sequences are
    not merged here so that callers can accumulate integer multiplicities."""
    a = g[i - 1]
    gi = list(g)
    gi[i - 1] = a + 1
    lo = i - 1
    while lo > 0 and gi[lo - 1] > a:
        lo -= 1
    hi = i - 1
    while hi < len(gi) - 1 and gi[hi + 1] > a:
        hi += 1
    left = ell_blocks(gi[lo : i - 1], a + 1)
    right = ell_blocks(gi[i:hi + 1], a + 1)
    prefix = tuple(gi[:lo])
    suffix = tuple(gi[hi + 1 :])
    out = []
    for pat in _patterns(len(left), len(right)):
        li = ri = 0
        seq_blocks = []
        for b in pat:
            if b:
                seq_blocks.append(right[ri])
                ri += 1
            else:
                seq_blocks.append(left[li])
                li += 1
        mid = _join(seq_blocks, a + 1)
        out.append((prefix + mid + suffix, block_shuffle_parity(pat, left, right)))
    return out


def block_insertion_terms(g: Seq, i: int) -> list[tuple[Seq, int]]:
    """Closed form for the i-th face when the a_i-block to the left of a_i
    has r > 1 entries all exceeding a_i + 1 and the one to the right has
    s > 0 entries all equal to a_i + 1.  The left block is placed at every
    position among s + 1 copies of a_i + 1; placement j flips the charge
    when j(r + 1) is odd."""
    a = g[i - 1]
    lo = i - 1
    while lo > 0 and g[lo - 1] > a:
        lo -= 1
    hi = i - 1
    while hi < len(g) - 1 and g[hi + 1] > a:
        hi += 1
    left, right = tuple(g[lo : i - 1]), tuple(g[i : hi + 1])
    r, s = len(left), len(right)
    if r <= 1 or s == 0 or any(x <= a + 1 for x in left) or any(x != a + 1 for x in right):
        raise ParameterError("face does not satisfy the block-insertion hypotheses")
    prefix, suffix = tuple(g[:lo]), tuple(g[hi + 1 :])
    out = []
    for j in range(s + 2):
        mid = (a + 1,) * j + left + (a + 1,) * (s + 1 - j)
        out.append((prefix + mid + suffix, (j * (r + 1)) & 1))
    return out


@lru_cache(maxsize=None)
def _delta_seq(g: Seq) -> tuple[tuple[Seq, int], ...]:
    """delta of g^+ as a tuple of (sequence, charge) with odd multiplicity."""
    counts: dict[tuple[Seq, int], int] = {}
    for i in range(1, len(g) + 1):
        for s, par in delta_i_terms(g, i):
            counts[(s, par)] = counts.get((s, par), 0) + 1
    return tuple(sorted(k for k, v in counts.items() if v & 1))


@lru_cache(maxsize=None)
def _delta_seq_fn(g: Seq) -> tuple[Seq, ...]:
    counts: dict[Seq, int] = {}
    for i in range(1, len(g) + 1):
        for s, _ in delta_i_terms(g, i):
            counts[s] = counts.get(s, 0) + 1
    return tuple(sorted(k for k, v in counts.items() if v & 1))


def delta_i_charged(g: Seq, charge: int, i: int) -> dict[tuple[Seq, int], int]:
    """The i-th component with integer multiplicities (before reduction)."""
    counts: dict[tuple[Seq, int], int] = {}
    for s, par in delta_i_terms(g, i):
        key = (s, charge ^ par)
        counts[key] = counts.get(key, 0) + 1
    return counts


# ---------------------------------------------------------------------------
# Cochains


@dataclass(frozen=True)
class Cochain:
    """A GF(2) sum of sequences of length n-1.

    ``charged`` distinguishes FNA (terms are (sequence, charge) pairs) from FN
    (terms are bare sequences)."""

    n: int
    charged: bool
    terms: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        for t in self.terms:
            s = t[0] if self.charged else t
            if len(s) != self.n - 1:
                raise ValueError(f"term {t} has the wrong length for n={self.n}")
        degs = {sum(t[0] if self.charged else t) for t in self.terms}
        if len(degs) > 1:
            raise ValueError("cochain terms must share one degree")

    @property
    def degree(self) -> int | None:
        for t in self.terms:
            return sum(t[0] if self.charged else t)
        return None

    def __add__(self, other: "Cochain") -> "Cochain":
        self._compat(other)
        return Cochain(self.n, self.charged, self.terms ^ other.terms)

    def _compat(self, other: "Cochain") -> None:
        if self.n != other.n or self.charged != other.charged:
            raise ValueError("cochains live in different complexes")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        return format_cochain(self)

    @staticmethod
    def zero(n: int, charged: bool = True) -> "Cochain":
        return Cochain(n, charged, frozenset())


def fna(*items: tuple[Sequence[int], str]) -> Cochain:
    """Convenience constructor: fna(([1,1,1], '+'), ([2,0,1], 'o'))."""
    acc: set = set()
    n = None
    for seq, ch in items:
        s = tuple(seq)
        n = len(s) + 1
        for c in _charges(ch):
            acc ^= {(s, c)}
    if n is None:
        raise ValueError("need at least one term")
    return Cochain(n, True, frozenset(acc))


def fn(*seqs: Sequence[int]) -> Cochain:
    acc: set = set()
    for s in seqs:
        acc ^= {tuple(s)}
    n = len(tuple(seqs[0])) + 1
    return Cochain(n, False, frozenset(acc))


def _charges(ch: str) -> tuple[int, ...]:
    if ch == "+":
        return (PLUS,)
    if ch == "-":
        return (MINUS,)
    if ch == "o":
        return (PLUS, MINUS)
    raise ValueError(f"unknown charge {ch!r}")


def format_cochain(x: Cochain) -> str:
    if not x.terms:
        return "0"
    if not x.charged:
        return " + ".join("[" + ",".join(map(str, s)) + "]" for s in sorted(x.terms))
    byseq: dict[Seq, set[int]] = {}
    for s, c in x.terms:
        byseq.setdefault(s, set()).add(c)
    parts = []
    for s in sorted(byseq):
        cs = byseq[s]
        suffix = "o" if len(cs) == 2 else CHARGE_TEXT[next(iter(cs))]
        parts.append("[" + ",".join(map(str, s)) + "]^" + suffix)
    return " + ".join(parts)


class CochainParseError(ValueError):
    def __init__(self, msg: str, pos: int) -> None:
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TERM = re.compile(r"\s*\[([0-9,\s]*)\](?:\^([+\-o]))?\s*")


def parse_cochain(text: str) -> Cochain:
    """Parse "[1,1,1]^+ + [2,0,1]^o"; terms without a suffix are FN terms."""
    pos = 0
    terms: set = set()
    charged: bool | None = None
    n: int | None = None
    if not text.strip():
        raise CochainParseError("empty cochain", 0)
    while True:
        m = _TERM.match(text, pos)
        if not m:
            raise CochainParseError("expected a bracketed sequence", pos)
        body = m.group(1).strip()
        seq = tuple(int(v) for v in body.split(",")) if body else ()
        this_charged = m.group(2) is not None
        if charged is None:
            charged = this_charged
        elif charged != this_charged:
            raise CochainParseError("mixed charged and uncharged terms", m.start())
        if n is None:
            n = len(seq) + 1
        elif len(seq) + 1 != n:
            raise CochainParseError("terms of different lengths", m.start())
        if this_charged:
            for c in _charges(m.group(2)):
                terms ^= {(seq, c)}
        else:
            terms ^= {seq}
        pos = m.end()
        if pos >= len(text):
            break
        if text[pos] != "+":
            raise CochainParseError("expected '+'", pos)
        pos += 1
    assert n is not None and charged is not None
    return Cochain(n, charged, frozenset(terms))


# ---------------------------------------------------------------------------
# Differentials and chain maps


def differential_fna(x: Cochain) -> Cochain:
    if not x.charged:
        raise ValueError("differential_fna needs a charged cochain")
    acc: set = set()
    for s, c in x.terms:
        for t, par in _delta_seq(s):
            acc ^= {(t, c ^ par)}
    return Cochain(x.n, True, frozenset(acc))


def differential_fn(x: Cochain) -> Cochain:
    if x.charged:
        raise ValueError("differential_fn needs an uncharged cochain")
    acc: set = set()
    for s in x.terms:
        for t in _delta_seq_fn(s):
            acc ^= {t}
    return Cochain(x.n, False, frozenset(acc))


def differential(x: Cochain) -> Cochain:
    return differential_fna(x) if x.charged else differential_fn(x)


def transfer_chain(x: Cochain) -> Cochain:
    """Gamma^(+/-) -> Gamma."""
    acc: set = set()
    for s, _ in x.terms:
        acc ^= {s}
    return Cochain(x.n, False, frozenset(acc))


def restrict_chain(x: Cochain) -> Cochain:
    """Gamma -> Gamma^+ + Gamma^-."""
    acc: set = set()
    for s in x.terms:
        acc ^= {(s, PLUS), (s, MINUS)}
    return Cochain(x.n, True, frozenset(acc))


def conjugate_chain(x: Cochain) -> Cochain:
    return Cochain(x.n, True, frozenset((s, c ^ 1) for s, c in x.terms))


# ---------------------------------------------------------------------------
# Tensors, coproduct and transfer product


@dataclass(frozen=True)
class Tensor:
    """GF(2) sum of pure tensors of basis cochain terms.

    ``terms`` holds pairs (left_term, right_term); ``ns`` records the group
    sizes (i, j) of the two factors."""

    ns: tuple[int, int]
    charged: bool
    terms: frozenset

    def __add__(self, other: "Tensor") -> "Tensor":
        return Tensor(self.ns, self.charged, self.terms ^ other.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(
            f"{_fmt_term(a, self.charged)}⊗{_fmt_term(b, self.charged)}" for a, b in sorted(self.terms)
        )


def _fmt_term(t, charged: bool) -> str:
    if charged:
        s, c = t
        return "[" + ",".join(map(str, s)) + "]^" + CHARGE_TEXT[c]
    return "[" + ",".join(map(str, t)) + "]"


def coproduct_chain(x: Cochain, split: tuple[int, int]) -> Tensor:
    """Cellular coproduct onto the (i, j) point split."""
    i, j = split
    if i + j != x.n or i < 0 or j < 0:
        raise ValueError("split must be a pair of non-negative sizes summing to n")
    acc: set = set()
    if i == 0 or j == 0:
        raise ValueError("use proper splits; the unit components are handled symbolically")
    for t in x.terms:
        s = t[0] if x.charged else t
        if s[i - 1] != 0:
            continue
        left, right = s[: i - 1], s[i:]
        if x.charged:
            c = t[1]
            acc ^= {((left, PLUS), (right, c)), ((left, MINUS), (right, c ^ 1))}
        else:
            acc ^= {(left, right)}
    return Tensor((i, j), x.charged, frozenset(acc))


def coproduct_all(x: Cochain) -> dict[tuple[int, int], Tensor]:
    """All proper splits (i, j) with i, j > 0 (the reduced coproduct)."""
    out = {}
    for i in range(1, x.n):
        t = coproduct_chain(x, (i, x.n - i))
        if t.terms:
            out[(i, x.n - i)] = t
    return out


def _block_shuffles(a: Sequence[Seq], b: Sequence[Seq]) -> Iterator[Seq]:
    for pat in _patterns(len(a), len(b)):
        ai = bi = 0
        blocks = []
        for bit in pat:
            if bit:
                blocks.append(b[bi])
                bi += 1
            else:
                blocks.append(a[ai])
                ai += 1
        yield _join(blocks, 0)


def transfer_product_chain(x: Cochain, y: Cochain) -> Cochain:
    """Cellular transfer product: shuffles of the 0-blocks, charges multiply."""
    if x.charged != y.charged:
        raise ValueError("both factors must be charged or both uncharged")
    counts: dict = {}
    for tx in x.terms:
        for ty in y.terms:
            sx = tx[0] if x.charged else tx
            sy = ty[0] if y.charged else ty
            for s in _block_shuffles(ell_blocks(sx, 0), ell_blocks(sy, 0)):
                key = (s, tx[1] ^ ty[1]) if x.charged else s
                counts[key] = counts.get(key, 0) + 1
    return Cochain(x.n + y.n, x.charged, frozenset(k for k, v in counts.items() if v & 1))


def tensor_differential(t: Tensor) -> Tensor:
    """delta on a tensor of cochains (Leibniz rule, no signs mod 2)."""
    acc: set = set()
    i, j = t.ns
    for a, b in t.terms:
        da = differential(Cochain(i, t.charged, frozenset([a])))
        db = differential(Cochain(j, t.charged, frozenset([b])))
        for x in da.terms:
            acc ^= {(x, b)}
        for y in db.terms:
            acc ^= {(a, y)}
    return Tensor(t.ns, t.charged, frozenset(acc))


# ---------------------------------------------------------------------------
# Named cochains


class ParameterError(ValueError):
    pass


def _ones(k: int) -> Seq:
    return (1,) * k


def _blocks_cochain(blocks: Sequence[Seq], charge: str | None) -> Cochain:
    s = _join(blocks, 0)
    if charge is None:
        return Cochain(len(s) + 1, False, frozenset([s]))
    return fna((s, charge))


def alpha(ell: int, m: int, charge: str | None = "+") -> Cochain:
    """m blocks of 2^ell - 1 ones separated by zeros."""
    if ell < 1 or m < 1:
        raise ParameterError("alpha needs ell >= 1 and m >= 1")
    return _blocks_cochain([_ones(2**ell - 1)] * m, charge)


def beta_ij(ell: int, m: int, i: int, j: int, charge: str | None = "o") -> Cochain:
    """m+1 blocks: block i is [2], block j has 2^ell - 3 ones, the rest full."""
    if ell < 2 or m < 1 or not (1 <= i < j <= m + 1):
        raise ParameterError("beta needs ell >= 2, m >= 1 and 1 <= i < j <= m+1")
    blocks = []
    for k in range(1, m + 2):
        if k == i:
            blocks.append((2,))
        elif k == j:
            blocks.append(_ones(2**ell - 3))
        else:
            blocks.append(_ones(2**ell - 1))
    return _blocks_cochain(blocks, charge)


def beta(ell: int, m: int, charge: str | None = "o") -> Cochain:
    acc = None
    for i in range(1, m + 2):
        for j in range(i + 1, m + 2):
            b = beta_ij(ell, m, i, j, charge)
            acc = b if acc is None else acc + b
    assert acc is not None
    return acc


def gamma_rep(ell: int, m: int, charge: str = "+") -> Cochain:
    """The cocycle alpha^(+/-) + beta^o representing gamma^(+/-)_{ell,m}."""
    if ell < 2:
        raise ParameterError("gamma representatives need ell >= 2")
    if charge not in "+-":
        raise ParameterError("charge must be + or -")
    return alpha(ell, m, charge) + beta(ell, m, "o")


def sigma(ell: int, m: int, p: int, r: int, bump: int | None = None) -> Cochain:
    """sigma_{ell,m}(p; r)^o: m blocks, the p-th has r ones, the others
    2^ell - 1 ones.  ``bump`` adds one to that (1-based) entry."""
    if not (1 <= p <= m):
        raise ParameterError("sigma needs 1 <= p <= m")
    blocks = [(_ones(r) if k == p else _ones(2**ell - 1)) for k in range(1, m + 1)]
    s = list(_join(blocks, 0))
    if bump is not None:
        s[bump - 1] += 1
    return fna((s, "o"))


def tau(ell: int, m: int, p: int, q: int, r: int, s: int) -> Cochain:
    """tau_{ell,m}(p, q; r, s)^o: m blocks, the p-th with r ones, the q-th
    with s ones, the others 2^ell - 1 ones."""
    if not (1 <= p < q <= m):
        raise ParameterError("tau needs 1 <= p < q <= m")
    blocks = []
    for k in range(1, m + 1):
        if k == p:
            blocks.append(_ones(r))
        elif k == q:
            blocks.append(_ones(s))
        else:
            blocks.append(_ones(2**ell - 1))
    return fna((_join(blocks, 0), "o"))


def alpha_two(m: int, charge: str | None = "+") -> Cochain:
    """alpha_{2,m}(2): m blocks [2,2,2]."""
    if m < 1:
        raise ParameterError("m >= 1")
    return _blocks_cochain([(2, 2, 2)] * m, charge)


def alpha_threehalves(ell: int, m: int, charge: str | None = "+") -> Cochain:
    """alpha_{ell,m}(1.5): m blocks [2,1,2,...,1,2] of length 2^ell - 1."""
    if ell < 2 or m < 1:
        raise ParameterError("ell >= 2 and m >= 1")
    block = tuple(2 if k % 2 == 0 else 1 for k in range(2**ell - 1))
    return _blocks_cochain([block] * m, charge)


def named_cochain(kind: str, params: Mapping[str, int | str]) -> Cochain:
    """Dispatch by name: alpha, beta_ij, beta, gamma, sigma, tau, alpha_two,
    alpha_threehalves."""
    p = dict(params)
    try:
        if kind == "alpha":
            return alpha(p["ell"], p["m"], p.get("charge", "+"))
        if kind == "beta_ij":
            return beta_ij(p["ell"], p["m"], p["i"], p["j"])
        if kind == "beta":
            return beta(p["ell"], p["m"])
        if kind == "gamma":
            return gamma_rep(p["ell"], p["m"], p.get("charge", "+"))
        if kind == "sigma":
            return sigma(p["ell"], p["m"], p["p"], p["r"], p.get("bump"))
        if kind == "tau":
            return tau(p["ell"], p["m"], p["p"], p["q"], p["r"], p["s"])
        if kind == "alpha_two":
            return alpha_two(p["m"], p.get("charge", "+"))
        if kind == "alpha_threehalves":
            return alpha_threehalves(p["ell"], p["m"], p.get("charge", "+"))
    except KeyError as exc:
        raise ParameterError(f"missing parameter {exc}") from exc
    raise ParameterError(f"unknown cochain kind {kind!r}")


def av_vanishes(x: Cochain) -> bool:
    """True iff every term has two consecutive nonzero entries."""
    for t in x.terms:
        s = t[0] if x.charged else t
        if not any(s[k] and s[k + 1] for k in range(len(s) - 1)):
            return False
    return True


# ---------------------------------------------------------------------------
# Bases and cohomology


def sequences(length: int, total: int) -> list[Seq]:
    """All sequences of non-negative integers with given length and sum,
    in lexicographic order."""
    if length == 0:
        return [()] if total == 0 else []
    out: list[Seq] = []

    def rec(prefix: list[int], left: int, slots: int) -> None:
        if slots == 1:
            out.append(tuple(prefix + [left]))
            return
        for v in range(left + 1):
            prefix.append(v)
            rec(prefix, left - v, slots - 1)
            prefix.pop()

    rec([], total, length)
    return out


def cell_basis(n: int, d: int, charged: bool) -> list:
    seqs = sequences(n - 1, d)
    if not charged:
        return seqs
    return [(s, c) for s in seqs for c in (PLUS, MINUS)]


def cell_size(n: int, d: int, charged: bool) -> int:
    from math import comb

    if n < 2:
        return 0
    k = comb(d + n - 2, n - 2)
    return 2 * k if charged else k


def differential_matrix(n: int, d: int, charged: bool) -> BitMatrix:
    """Rows indexed by the degree-d basis; row r is delta of basis element r
    in degree-(d+1) coordinates."""
    src = cell_basis(n, d, charged)
    tgt = cell_basis(n, d + 1, charged)
    index = {t: k for k, t in enumerate(tgt)}
    support = []
    for t in src:
        if charged:
            s, c = t
            support.append([index[(u, c ^ par)] for u, par in _delta_seq(s)])
        else:
            support.append([index[u] for u in _delta_seq_fn(t)])
    return BitMatrix.from_support(support, len(tgt))


@dataclass
class CohomologyBasis:
    """Cohomology of one (n, degree) cell.

    ``reps`` are reduced-echelon cocycle representatives.  The stored image
    echelon form and rep pivots give a linear projection from cochains to
    coordinates that vanishes on coboundaries."""

    n: int
    degree: int
    charged: bool
    dim: int
    coboundary_rank: int
    cocycle_rank: int
    basis: list
    reps: list[Cochain]
    _img: np.ndarray = field(repr=False, default=None)
    _img_piv: list[int] = field(repr=False, default_factory=list)
    _rep: np.ndarray = field(repr=False, default=None)
    _rep_piv: list[int] = field(repr=False, default_factory=list)

    @property
    def cocycle_reps(self) -> list[Cochain]:
        return self.reps

    def vector(self, x: Cochain) -> np.ndarray:
        index = {t: k for k, t in enumerate(self.basis)}
        v = np.zeros(len(self.basis), dtype=np.uint8)
        for t in x.terms:
            v[index[t]] ^= 1
        return v

    def project(self, x: Cochain) -> np.ndarray:
        """Linear map to coordinates; zero on coboundaries, the class on cocycles."""
        if x.n != self.n or x.charged != self.charged:
            raise ValueError("cochain from a different complex")
        if x.terms and x.degree != self.degree:
            raise ValueError("cochain of a different degree")
        v = self.vector(x)
        for row, c in zip(self._img, self._img_piv):
            if v[c]:
                v ^= row
        coords = np.zeros(self.dim, dtype=np.uint8)
        for k, (row, c) in enumerate(zip(self._rep, self._rep_piv)):
            if v[c]:
                coords[k] = 1
                v ^= row
        return coords


def _cell_check(n: int, d: int, charged: bool) -> None:
    size = max(cell_size(n, d, charged), cell_size(n, d + 1, charged))
    if size > MAX_CELL:
        raise CellTooLarge(
            f"cell (n={n}, degree={d}, {'FNA' if charged else 'FN'}) needs {size} basis cochains; cap is {MAX_CELL}"
        )


@lru_cache(maxsize=None)
def differential_rank(n: int, d: int, charged: bool) -> int:
    if d < 0 or n < 2:
        return 0
    from .f2_core import rank

    _cell_check(n, d, charged)
    return rank(differential_matrix(n, d, charged))


def cohomology_dim(n: int, d: int, charged: bool = True) -> int:
    _cell_check(n, d, charged)
    return cell_size(n, d, charged) - differential_rank(n, d, charged) - differential_rank(n, d - 1, charged)


@lru_cache(maxsize=None)
def cohomology(n: int, d: int, variant: str = "FNA") -> CohomologyBasis:
    """Cohomology with cocycle representatives for one (n, degree) cell."""
    if variant not in ("FN", "FNA"):
        raise ValueError("variant must be FN or FNA")
    charged = variant == "FNA"
    if n < 2 or d < 0:
        raise ValueError("need n >= 2 and d >= 0")
    _cell_check(n, d, charged)
    basis = cell_basis(n, d, charged)
    size = len(basis)
    dmat = differential_matrix(n, d, charged)
    from .f2_core import kernel_basis, rref

    kern = kernel_basis(dmat.transpose()) if dmat.cols else [
        np.eye(size, dtype=np.uint8)[k] for k in range(size)
    ]
    if d > 0:
        prev = differential_matrix(n, d - 1, charged)
        img, img_piv = rref(prev)
        img_dense = img.to_dense()
    else:
        img_dense, img_piv = np.zeros((0, size), dtype=np.uint8), []
    kmat = np.array(kern, dtype=np.uint8).reshape(len(kern), size)
    for row, c in zip(img_dense, img_piv):
        hit = np.flatnonzero(kmat[:, c])
        if hit.size:
            kmat[hit] ^= row
    if kmat.shape[0]:
        red, rep_piv = rref(BitMatrix.from_dense(kmat))
        rep_dense = red.to_dense()
    else:
        rep_dense, rep_piv = np.zeros((0, size), dtype=np.uint8), []
    reps = [
        Cochain(n, charged, frozenset(basis[k] for k in np.flatnonzero(row))) for row in rep_dense
    ]
    return CohomologyBasis(
        n=n,
        degree=d,
        charged=charged,
        dim=len(reps),
        coboundary_rank=len(img_piv),
        cocycle_rank=len(kern),
        basis=basis,
        reps=reps,
        _img=img_dense,
        _img_piv=list(img_piv),
        _rep=rep_dense,
        _rep_piv=list(rep_piv),
    )


def identify_class(x: Cochain) -> np.ndarray:
    """Coordinates of the class of a cocycle in the stored basis."""
    if differential(x).terms:
        raise NotACocycle("identify_class needs a cocycle")
    if not x.terms:
        raise ValueError("the zero cochain has no degree; its class is zero")
    return cohomology(x.n, x.degree, "FNA" if x.charged else "FN").project(x)


def identify_tensor(t: Tensor) -> dict[tuple[int, int], np.ndarray]:
    """Class of a tensor cocycle in H(i) ⊗ H(j), by bidegree.

    Uses the chain-level projections of both factors, which are chain maps to
    cohomology, so their tensor product computes the Kunneth class."""
    if tensor_differential(t).terms:
        raise NotACocycle("identify_tensor needs a cocycle")
    variant = "FNA" if t.charged else "FN"
    i, j = t.ns
    out: dict[tuple[int, int], np.ndarray] = {}
    for a, b in t.terms:
        da = sum(a[0] if t.charged else a)
        db = sum(b[0] if t.charged else b)
        ha = cohomology(i, da, variant)
        hb = cohomology(j, db, variant)
        va = ha.project(Cochain(i, t.charged, frozenset([a])))
        vb = hb.project(Cochain(j, t.charged, frozenset([b])))
        if not va.any() or not vb.any():
            continue
        m = np.outer(va, vb).astype(np.uint8)
        key = (da, db)
        out[key] = out[key] ^ m if key in out else m
    return {k: v for k, v in out.items() if v.any()}


# ---------------------------------------------------------------------------
# Cycles for non-triviality certificates


def chain_boundary(chain: Cochain) -> Cochain:
    """Boundary of a chain (transpose of delta) computed locally.

    The preimages of a sequence under delta keep the multiset of entries
    except for one entry lowered by one, so they are enumerated as the
    distinct rearrangements of those multisets."""
    if chain.terms and not chain.charged:
        raise ValueError("chain_boundary is implemented for charged chains")
    targets = set(chain.terms)
    acc: set = set()
    cands: set[Seq] = set()
    for s, _ in chain.terms:
        vals = list(s)
        for k, v in enumerate(vals):
            if v == 0:
                continue
            low = sorted(vals[:k] + [v - 1] + vals[k + 1 :])
            cands.update(multiset_permutations(low))
    for y in cands:
        for c in (PLUS, MINUS):
            hits = 0
            for t, par in _delta_seq(y):
                if (t, c ^ par) in targets:
                    hits ^= 1
            if hits:
                acc ^= {(y, c)}
    return Cochain(chain.n, True, frozenset(acc))


def multiset_permutations(values: Sequence[int]) -> Iterator[Seq]:
    """Distinct rearrangements of a multiset, in lexicographic order."""
    counts: dict[int, int] = {}
    for v in values:
        counts[v] = counts.get(v, 0) + 1
    keys = sorted(counts)
    n = len(values)
    cur: list[int] = []

    def rec() -> Iterator[Seq]:
        if len(cur) == n:
            yield tuple(cur)
            return
        for k in keys:
            if counts[k]:
                counts[k] -= 1
                cur.append(k)
                yield from rec()
                cur.pop()
                counts[k] += 1

    return rec()


def pair(x: Cochain, chain: Cochain) -> int:
    return len(x.terms & chain.terms) & 1
