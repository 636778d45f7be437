"""The Hopf ring H*(BS_•; F_2), its Gysin bases, and the Nakaoka oracle.

Classes are Hopf monomials: transfer products of cup monomials ("columns")
in the generators gamma_{ell,m}.  The additive basis used here is the
gathered one: at most one column per exponent profile, since
gamma_{ell,n} ⊙ gamma_{ell,m} = binom(n+m, n) gamma_{ell,n+m} lets equal
profiles merge.  Normal forms are computed by restriction to elementary
abelian subgroups and solving in the certified basis; the Nakaoka count
(Dyer-Lashof monomials in homology) is an independent dimension oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .f2_core import SpanBuilder, binom_mod2
from .restriction_detect import (
    ImageSpace,
    concat_targets,
    family_sym,
    image,
)
from .symbols import Expr, SymGen, add, cup, gen, odot, power, zero


# ---------------------------------------------------------------------------
# Hopf monomials


@dataclass(frozen=True, order=True)
class SymColumn:
    """A cup monomial prod_ell gamma_{ell, width/2^ell}^{d_ell} on S_width.

    ``exps`` lists (ell, d_ell) with ell >= 1 and d_ell > 0; empty means the
    cup unit gamma_{0,width}."""

    width: int
    exps: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        for ell, d in self.exps:
            if ell < 1 or d < 1 or self.width % (2**ell):
                raise ValueError(f"invalid column {self.width}:{self.exps}")

    @property
    def degree(self) -> int:
        return sum(d * (self.width >> ell) * (2**ell - 1) for ell, d in self.exps)

    @property
    def scale(self) -> int:
        return max((ell for ell, _ in self.exps), default=1)

    @property
    def is_unit(self) -> bool:
        return not self.exps

    @property
    def pure_level_one(self) -> int | None:
        """k if the column is gamma_{1,m}^k (units give 0), else None."""
        if not self.exps:
            return 0
        if len(self.exps) == 1 and self.exps[0][0] == 1:
            return self.exps[0][1]
        return None

    def expr(self) -> Expr:
        if not self.exps:
            return gen(SymGen(0, self.width))
        return cup(*(power(gen(SymGen(ell, self.width >> ell)), d) for ell, d in self.exps))

    def sort_key(self) -> tuple:
        return (-self.width, -self.degree, self.exps)

    def __str__(self) -> str:
        if not self.exps:
            return f"1[{self.width}]"
        parts = []
        for ell, d in self.exps:
            s = f"c({ell},{self.width >> ell})"
            parts.append(s if d == 1 else f"{s}^{d}")
        return "*".join(parts)


@dataclass(frozen=True, order=True)
class SymHopfMonomial:
    columns: tuple[SymColumn, ...]

    @property
    def width(self) -> int:
        return sum(c.width for c in self.columns)

    @property
    def degree(self) -> int:
        return sum(c.degree for c in self.columns)

    @property
    def scale(self) -> int:
        return min((c.scale for c in self.columns), default=1)

    def expr(self) -> Expr:
        if not self.columns:
            raise ValueError("the empty monomial has no expression")
        return odot(*(c.expr() for c in self.columns))

    def __str__(self) -> str:
        return " o ".join(str(c) for c in self.columns) if self.columns else "1[0]"


def _profiles(max_level: int, width: int, budget: int) -> Iterator[tuple[tuple[int, int], ...]]:
    """Exponent profiles with top level exactly max_level, degree <= budget."""

    def rec(ell: int, left: int) -> Iterator[list[tuple[int, int]]]:
        if ell > max_level:
            yield []
            return
        unit = (width >> ell) * (2**ell - 1)
        top = left // unit
        lo = 1 if ell == max_level else 0
        for d in range(lo, top + 1):
            for rest in rec(ell + 1, left - d * unit):
                yield ([(ell, d)] if d else []) + rest

    for p in rec(1, budget):
        yield tuple(p)


@lru_cache(maxsize=None)
def _columns(max_width: int, max_degree: int) -> tuple[SymColumn, ...]:
    cols = [SymColumn(w) for w in range(1, max_width + 1)]
    L = 1
    while 2**L <= max_width:
        for w in range(2**L, max_width + 1, 2**L):
            for prof in _profiles(L, w, max_degree):
                cols.append(SymColumn(w, prof))
        L += 1
    return tuple(c for c in cols if c.degree <= max_degree)


@lru_cache(maxsize=None)
def basis_sym(n: int, d: int) -> tuple[SymHopfMonomial, ...]:
    """Gathered Hopf monomial basis of H^d(BS_n)."""
    if n == 0:
        return (SymHopfMonomial(()),) if d == 0 else ()
    cols = _columns(n, d)
    by_profile: dict[tuple, list[SymColumn]] = {}
    for c in cols:
        by_profile.setdefault(c.exps, []).append(c)
    profiles = sorted(by_profile)
    out: list[SymHopfMonomial] = []

    def rec(i: int, wleft: int, dleft: int, acc: list[SymColumn]) -> None:
        if wleft == 0 and dleft == 0:
            out.append(SymHopfMonomial(tuple(sorted(acc, key=SymColumn.sort_key))))
            return
        if i == len(profiles) or wleft <= 0:
            return
        rec(i + 1, wleft, dleft, acc)
        for c in by_profile[profiles[i]]:
            if c.width <= wleft and c.degree <= dleft:
                acc.append(c)
                rec(i + 1, wleft - c.width, dleft - c.degree, acc)
                acc.pop()

    rec(0, n, d, [])
    return tuple(sorted(set(out)))


def poincare_sym(n: int, max_degree: int) -> list[int]:
    return [len(basis_sym(n, d)) for d in range(max_degree + 1)]


# ---------------------------------------------------------------------------
# Gysin bases


def in_Ga(h: SymHopfMonomial) -> bool:
    return h.scale > 1 and all(not c.is_unit for c in h.columns)


def in_Gq(h: SymHopfMonomial) -> bool:
    pure = [(c.pure_level_one, c) for c in h.columns if c.pure_level_one is not None]
    if not pure:
        return True
    k, col = max(pure, key=lambda kc: kc[0])
    return k == 0 or col.width // 2 > 1


def gysin_Ga(n: int, d: int) -> list[SymHopfMonomial]:
    """Basis of the annihilator of the Euler class: scale greater than one."""
    if n % 2:
        raise ValueError("n must be even")
    return [h for h in basis_sym(n, d) if in_Ga(h)]


def gysin_Gq(n: int, d: int) -> list[SymHopfMonomial]:
    """Representatives of a basis of H*(BS_n)/(e)."""
    if n % 2:
        raise ValueError("n must be even")
    return [h for h in basis_sym(n, d) if in_Gq(h)]


def euler_class(n: int) -> Expr:
    """e = gamma_{1,1} ⊙ 1_{n-2}."""
    if n < 2:
        raise ValueError("the Euler class needs n >= 2")
    g = gen(SymGen(1, 1))
    return g if n == 2 else odot(g, gen(SymGen(0, n - 2)))


def e_multiply(h: SymHopfMonomial) -> list[SymHopfMonomial]:
    """Terms of e·h by the replacement rule gamma_{1,m}^k -> gamma_{1,1}^{k+1}
    ⊙ gamma_{1,m-1}^k, applied to one pure level-one column at a time (units
    count as k = 0).  Terms are returned unmerged; zero when h has scale > 1."""
    out = []
    for i, c in enumerate(h.columns):
        k = c.pure_level_one
        if k is None:
            continue
        m = c.width // 2 if c.width % 2 == 0 else None
        if c.is_unit:
            if c.width < 2:
                continue
            rest = [SymColumn(c.width - 2)] if c.width > 2 else []
        else:
            if m is None:
                continue
            rest = [SymColumn(c.width - 2, ((1, k),))] if m > 1 else []
        new = list(h.columns[:i]) + [SymColumn(2, ((1, k + 1),))] + rest + list(h.columns[i + 1 :])
        out.append(SymHopfMonomial(tuple(sorted(new, key=SymColumn.sort_key))))
    return out


# ---------------------------------------------------------------------------
# Normal form by restriction


@dataclass(frozen=True)
class SymClass:
    width: int
    degree: int
    terms: frozenset

    def __add__(self, other: "SymClass") -> "SymClass":
        if (self.width, self.degree) != (other.width, other.degree):
            raise ValueError("summands must share width and degree")
        return SymClass(self.width, self.degree, self.terms ^ other.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def expr(self) -> Expr:
        if not self.terms:
            return zero(self.width, self.degree)
        return add(*(t.expr() for t in sorted(self.terms)))

    def __str__(self) -> str:
        return " + ".join(str(t) for t in sorted(self.terms)) if self.terms else "0"


class NotInBasis(RuntimeError):
    pass


class _Solver:
    def __init__(self, basis: Sequence, exprs: Sequence[Expr], targets) -> None:
        self.basis = list(basis)
        self.space = ImageSpace(targets)
        self.sb = SpanBuilder()
        self.independent = all(self.sb.add(self.space.vector(e)) for e in exprs)

    def solve(self, e: Expr) -> frozenset:
        mask = self.sb.coordinates(self.space.vector(e))
        if mask is None:
            raise NotInBasis("class outside the span of the basis images")
        return frozenset(b for i, b in enumerate(self.basis) if (mask >> i) & 1)


@lru_cache(maxsize=None)
def _sym_solver(n: int, d: int) -> _Solver:
    basis = basis_sym(n, d)
    return _Solver(basis, [b.expr() for b in basis], family_sym(n))


def certify_sym(n: int, d: int) -> bool:
    """True when the basis images on the detection family are independent."""
    return _sym_solver(n, d).independent


def sym_normalize(e: Expr) -> SymClass:
    if e.width == 0:
        raise ValueError("component zero is the ground field")
    return SymClass(e.width, e.degree, _sym_solver(e.width, e.degree).solve(e))


# ---------------------------------------------------------------------------
# Coproduct


def _sym_gen_coproduct(g: SymGen) -> list[tuple[Expr | None, Expr | None]]:
    out = []
    for i in range(g.m + 1):
        j = g.m - i
        left = gen(SymGen(g.ell, i)) if i else None
        right = gen(SymGen(g.ell, j)) if j else None
        out.append((left, right))
    return out


def coproduct_expr(e: Expr) -> dict[tuple[int, int], list[tuple]]:
    """Symbolic coproduct: generator rule extended by the bialgebra laws for
    cup (componentwise product) and transfer products (componentwise ⊙).
    ``None`` stands for the unit of the empty component."""
    from .symbols import Cup, Gen, Odot, Sum, Zero

    def comp(x: Expr | None) -> int:
        return 0 if x is None else x.width

    def rec(x: Expr) -> list[tuple]:
        if isinstance(x, Zero):
            return []
        if isinstance(x, Gen):
            if not isinstance(x.g, SymGen):
                raise TypeError("symmetric coproduct of a non-symmetric generator")
            if x.g.ell == 0:
                return [
                    (gen(SymGen(0, i)) if i else None, gen(SymGen(0, x.g.m - i)) if x.g.m - i else None)
                    for i in range(x.g.m + 1)
                ]
            return _sym_gen_coproduct(x.g)
        if isinstance(x, Sum):
            return [t for s in x.terms for t in rec(s)]
        if isinstance(x, Cup):
            acc = rec(x.factors[0])
            for f in x.factors[1:]:
                nxt = []
                other = rec(f)
                for a1, a2 in acc:
                    for b1, b2 in other:
                        if comp(a1) != comp(b1):
                            continue
                        l = None if a1 is None else cup(a1, b1)
                        r = None if a2 is None else cup(a2, b2)
                        nxt.append((l, r))
                acc = nxt
            return acc
        if isinstance(x, Odot):
            acc = rec(x.factors[0])
            for f in x.factors[1:]:
                nxt = []
                other = rec(f)
                for a1, a2 in acc:
                    for b1, b2 in other:
                        l = a1 if b1 is None else (b1 if a1 is None else odot(a1, b1))
                        r = a2 if b2 is None else (b2 if a2 is None else odot(a2, b2))
                        nxt.append((l, r))
                acc = nxt
            return acc
        raise TypeError(f"cannot take the coproduct of {type(x).__name__}")

    out: dict[tuple[int, int], list[tuple]] = {}
    for l, r in rec(e):
        out.setdefault((comp(l), comp(r)), []).append((l, r))
    return out


def _coords(x: Expr | None, width: int) -> frozenset:
    if x is None:
        return frozenset({SymHopfMonomial(())})
    return sym_normalize(x).terms


def normalize_tensor(pairs: Sequence[tuple]) -> frozenset:
    """Reduce a list of (left, right) expressions to a set of basis pairs."""
    out: set = set()
    for l, r in pairs:
        for a in _coords(l, 0):
            for b in _coords(r, 0):
                pair = (a, b)
                if pair in out:
                    out.remove(pair)
                else:
                    out.add(pair)
    return frozenset(out)


def coproduct_sym(e: Expr, split: tuple[int, int]) -> frozenset:
    """Component (i, j) of the coproduct, as a set of basis monomial pairs."""
    i, j = split
    if i < 0 or j < 0 or i + j != e.width:
        raise ValueError("split must add up to the width")
    return normalize_tensor(coproduct_expr(e).get((i, j), []))


def coproduct_sym_by_restriction(e: Expr, split: tuple[int, int]) -> frozenset:
    """The same component computed by solving restriction images on product
    subgroups E_1 x E_2 (an independent route)."""
    i, j = split
    if i == 0 or j == 0:
        return coproduct_sym(e, split)
    pairs = []
    exprs = []
    for d1 in range(e.degree + 1):
        for a in basis_sym(i, d1):
            for b in basis_sym(j, e.degree - d1):
                pairs.append((a, b))
                exprs.append((a.expr(), b.expr()))
    targets = [concat_targets(t1, t2) for t1 in family_sym(i) for t2 in family_sym(j)]
    space = ImageSpace(targets)
    sb = SpanBuilder()
    from .restriction_detect import pmul, shift_target, target_nvars

    def tensor_vec(a: Expr, b: Expr) -> int:
        v = 0
        for ti, (t1, t2) in enumerate((t1, t2) for t1 in family_sym(i) for t2 in family_sym(j)):
            p = pmul(image(a, t1), image(b, shift_target(t2, target_nvars(t1))))
            for m in p:
                key = (ti, m)
                pos = space._index.get(key)
                if pos is None:
                    pos = space._index[key] = len(space._index)
                v |= 1 << pos
        return v

    for a, b in exprs:
        sb.add(tensor_vec(a, b))
    mask = sb.coordinates(space.vector(e))
    if mask is None:
        raise NotInBasis("coproduct image outside the tensor basis span")
    return frozenset(p for k, p in enumerate(pairs) if (mask >> k) & 1)


# ---------------------------------------------------------------------------
# Nakaoka oracle


@dataclass(frozen=True, order=True)
class QMonomial:
    """q_{i_1} ∘ ... ∘ q_{i_l} applied to the point class."""

    I: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(i * 2**j for j, i in enumerate(self.I))

    @property
    def width(self) -> int:
        return 2 ** len(self.I)

    @property
    def admissible(self) -> bool:
        return all(a <= b for a, b in zip(self.I, self.I[1:]))

    @property
    def strongly_admissible(self) -> bool:
        return self.admissible and all(i > 0 for i in self.I)


def q_degree(I: Sequence[int]) -> int:
    return QMonomial(tuple(I)).degree


@dataclass(frozen=True, order=True)
class NakaokaMonomial:
    factors: tuple[QMonomial, ...]
    iota_count: int

    @property
    def width(self) -> int:
        return sum(f.width for f in self.factors) + self.iota_count

    @property
    def degree(self) -> int:
        return sum(f.degree for f in self.factors)


class AdemLoop(RuntimeError):
    pass


@lru_cache(maxsize=None)
def adem_reduce(I: tuple[int, ...], depth: int = 0) -> frozenset:
    """Rewrite q_I into admissible monomials with the Adem relation
    q_m ∘ q_n = sum_i binom(i-n-1, 2i-m-n) q_{m+2n-2i} ∘ q_i (m > n),
    leftmost inadmissible pair first."""
    if depth > 200:
        raise AdemLoop(f"Adem rewriting did not terminate on {I}")
    I = tuple(I)
    for p in range(len(I) - 1):
        m, n = I[p], I[p + 1]
        if m > n:
            out: set = set()
            for i in range(n, m + n + 1):
                if binom_mod2(i - n - 1, 2 * i - m - n):
                    new = I[:p] + (m + 2 * n - 2 * i, i) + I[p + 2 :]
                    if min(new) < 0:
                        continue
                    for t in adem_reduce(new, depth + 1):
                        if t in out:
                            out.remove(t)
                        else:
                            out.add(t)
            return frozenset(out)
    return frozenset({I})


@lru_cache(maxsize=None)
def _strongly_admissible(width: int, degree: int) -> tuple[QMonomial, ...]:
    L = width.bit_length() - 1
    out = []

    def rec(pos: int, lo: int, left: int, acc: list[int]) -> None:
        if pos == L:
            if left == 0:
                out.append(QMonomial(tuple(acc)))
            return
        w = 2**pos
        # remaining positions pos..L-1 each carry weight >= w and entries >= lo
        for i in range(max(lo, 1), left // w + 1):
            rec(pos + 1, i, left - i * w, acc + [i])

    rec(0, 1, degree, [])
    return tuple(out)


@lru_cache(maxsize=None)
def nakaoka_basis(n: int, d: int) -> tuple[NakaokaMonomial, ...]:
    """Monomials in strongly admissible q_I (repeats allowed) times a power
    of the point class, of total width n and degree d."""
    if n < 0 or d < 0:
        raise ValueError("need n >= 0 and d >= 0")
    gens: list[QMonomial] = []
    w = 2
    while w <= n:
        for deg in range(1, d + 1):
            gens.extend(_strongly_admissible(w, deg))
        w *= 2
    gens.sort()
    out: list[NakaokaMonomial] = []

    def rec(i: int, wleft: int, dleft: int, acc: list[QMonomial]) -> None:
        if dleft == 0:
            out.append(NakaokaMonomial(tuple(acc), wleft))
            return
        if i == len(gens):
            return
        g = gens[i]
        rec(i + 1, wleft, dleft, acc)
        k = 1
        while k * g.width <= wleft and k * g.degree <= dleft:
            rec(i + 1, wleft - k * g.width, dleft - k * g.degree, acc + [g] * k)
            k += 1

    rec(0, n, d, [])
    return tuple(out)


def nakaoka_count(n: int, d: int) -> int:
    return len(nakaoka_basis(n, d))
