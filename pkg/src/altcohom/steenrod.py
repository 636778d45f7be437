"""Steenrod squares on H*(BA_•; F_2) and H*(BS_•; F_2).

Squares on Hopf ring generators come from bi-partition formulas: level-ℓ
bi-partitions for charged generators (with the modified level-2 variant
for gamma_{2,m}), and Wu classes for the scale-one generators gamma_{1,k;m}.
They extend to all classes by the Cartan formula for both products, and
commute with conjugation, restriction and transfer.

``sq_by_restriction`` is an independent route: apply the polynomial Cartan
action to the restriction images and solve for the unique class with those
images (detection is injective).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .alternating_hopf import AltClass, as_expr, class_from_images, normalize
from .f2_core import binom_mod2
from .restriction_detect import family_alt, image, poly_sq, target_nvars
from .symbols import (
    PLUS,
    Charged,
    Conj,
    Cup,
    Expr,
    Gen,
    Neutral,
    Odot,
    Res,
    SignUnit,
    Sum,
    SymGen,
    Tr,
    Unit,
    Zero,
    add,
    conj,
    cup,
    gen,
    odot,
    power,
    res,
    tr,
    zero,
)


# ---------------------------------------------------------------------------
# Bi-partitions


def bipartition_vector(p: int, lp: int, ell: int) -> tuple[int, int]:
    return (2**p * (2**ell - 2**lp) + 2**p - 1, 2**p)


@dataclass(frozen=True)
class BiPartition:
    """(j, m) = sum of c[p, l'] * x_{p,l'}, plus an optional (1, 1) term."""

    level: int
    target: tuple[int, int]
    coeffs: tuple = ()  # ((p, l'), c) with c > 0, sorted
    extra: int = 0  # coefficient of (1, 1) in the modified level-2 variant

    def total(self) -> tuple[int, int]:
        j = m = 0
        for (p, lp), c in self.coeffs:
            dj, dm = bipartition_vector(p, lp, self.level)
            j += c * dj
            m += c * dm
        return (j + self.extra, m + self.extra)

    def as_dict(self) -> dict:
        return {
            "level": self.level,
            "target": list(self.target),
            "terms": [{"p": p, "l": lp, "c": c} for (p, lp), c in self.coeffs],
            "extra": self.extra,
        }


def _vectors(m: int, ell: int) -> list[tuple[int, int]]:
    out = []
    p = 0
    while 2**p <= m:
        for lp in range(0 if p == 0 else 1, ell + 1):
            out.append((p, lp))
        p += 1
    return out


def enumerate_bipartitions(j: int, m: int, ell: int, modified: bool = False) -> list[BiPartition]:
    """All level-ell bi-partitions of (j, m), in lex order on (p, l', c)."""
    if ell < 1:
        raise ValueError("bi-partitions need level >= 1")
    if modified and ell != 2:
        raise ValueError("the modified variant exists only at level 2")
    vecs = _vectors(m, ell)
    out: list[BiPartition] = []

    def rec(i: int, jl: int, ml: int, acc: list, extra: int) -> None:
        if i == len(vecs):
            if jl == 0 and ml == 0:
                out.append(BiPartition(ell, (j, m), tuple(acc), extra))
            return
        p, lp = vecs[i]
        dj, dm = bipartition_vector(p, lp, ell)
        c = 0
        while c * dj <= jl and c * dm <= ml:
            rec(i + 1, jl - c * dj, ml - c * dm, acc + ([((p, lp), c)] if c else []), extra)
            c += 1

    extras = (0, 1) if modified else (0,)
    for e in extras:
        if j >= e and m >= e:
            rec(0, j - e, m - e, [], e)
    return out


# ---------------------------------------------------------------------------
# Squares on generators


def _alt_gamma(level: int, count: int) -> Expr:
    """gamma^+_{level,count} with gamma^+_{0,2m} = 1_m and level one read as
    the top scale-one generator gamma_{1,M;M}."""
    if level == 0:
        return gen(Unit(count // 2))
    if level == 1:
        return gen(Neutral(count, count)) if count >= 2 else zero(2 * count, count)
    return gen(Charged(level, count, PLUS))


def _sym_gamma(level: int, count: int) -> Expr:
    return gen(SymGen(level, count))


def _monomial(pi: BiPartition, symmetric: bool, conjugate_level_two: bool = True) -> Expr:
    mk = _sym_gamma if symmetric else _alt_gamma
    parts = []
    for (p, lp), c in pi.coeffs:
        piece = cup(mk(pi.level + p, c), mk(pi.level - lp, c * 2 ** (p + lp)))
        if not symmetric and pi.level == 2 and (p, lp) == (0, 1) and c % 2 and conjugate_level_two:
            piece = conj(piece)
        parts.append(piece)
    if pi.extra:
        parts.append(power(gen(Neutral(2, 2)), 2))
    return odot(*parts)


def _binom_gen_mod2(n: int, k: int) -> int:
    """binom(n, k) mod 2 for any integer n, via binom(-a, k) = (-1)^k binom(a+k-1, k)."""
    if k < 0:
        return 0
    if n >= 0:
        return binom_mod2(n, k)
    return binom_mod2(k - n - 1, k)


def _scale_one(k: int, m: int) -> Expr:
    if k == 0:
        return gen(SignUnit(PLUS)) if m == 0 else gen(Unit(m))
    if k == 1 or k > m:
        return zero(2 * m, k)
    return gen(Neutral(k, m))


def wu_expr(i: int, j: int, m: int) -> Expr:
    """W(i, j; m) = sum_l binom(i-j+l-1, l) gamma_{1,j-l;m} gamma_{1,i+l;m}."""
    if m == 0:
        if i == 0 and j == 0:
            return add(gen(SignUnit(0)), gen(SignUnit(1)))
        return zero(0, i + j)
    terms = []
    for l in range(0, min(j, m - i) + 1):
        if _binom_gen_mod2(i - j + l - 1, l):
            terms.append(cup(_scale_one(j - l, m), _scale_one(i + l, m)))
    terms = [t for t in terms if not isinstance(t, Zero)]
    return add(*terms) if terms else zero(2 * m, i + j)


def wu_W(i: int, j: int, m: int) -> AltClass:
    return normalize(wu_expr(i, j, m))


def _sq_neutral(j: int, k: int, m: int) -> Expr:
    """Sq^j gamma_{1,k;m}: level-1 bi-partitions (j,k) = a(1,1) + b(0,1) + sum c_p (2^p-1, 2^p)."""
    terms = []
    for pi in enumerate_bipartitions(j, k, 1):
        coeffs = dict(pi.coeffs)
        a = coeffs.get((0, 0), 0)
        b = coeffs.get((0, 1), 0)
        parts = [wu_expr(a + b, a, a + b + m - k)]
        for (p, lp), c in pi.coeffs:
            if p > 0:
                parts.append(gen(Charged(1 + p, c, PLUS)))
        terms.append(odot(*parts))
    terms = [t for t in terms if not isinstance(t, Zero)]
    return add(*terms) if terms else zero(2 * m, k + j)


def sq_generator_expr(j: int, g) -> Expr:
    """Sq^j of a generator, unnormalized."""
    deg = g.degree
    if j < 0 or j > deg:
        return zero(g.width, deg + max(j, 0))
    if j == 0:
        return gen(g)
    if isinstance(g, (Unit, SignUnit)):
        return zero(g.width, deg + j)
    if isinstance(g, Charged):
        if g.charge:
            return conj(sq_generator_expr(j, g.conj()))
        pis = enumerate_bipartitions(j, g.m, g.ell, modified=(g.ell == 2))
        terms = [_monomial(pi, False) for pi in pis]
    elif isinstance(g, Neutral):
        return _sq_neutral(j, g.k, g.m)
    elif isinstance(g, SymGen):
        if g.ell == 0:
            return zero(g.width, deg + j)
        terms = [_monomial(pi, True) for pi in enumerate_bipartitions(j, g.m, g.ell)]
    else:
        raise TypeError(f"unknown generator {g!r}")
    terms = [t for t in terms if not isinstance(t, Zero)]
    return add(*terms) if terms else zero(g.width, deg + j)


def sq_generator(j: int, g) -> AltClass:
    if isinstance(g, SymGen):
        raise TypeError("use sq_expr for symmetric generators")
    return normalize(sq_generator_expr(j, g))


# ---------------------------------------------------------------------------
# Cartan extension


def _cartan(j: int, factors: tuple, combine) -> Expr:
    first, rest = factors[0], factors[1:]
    if not rest:
        return sq_expr(j, first)
    tail = rest[0] if len(rest) == 1 else combine(*rest)
    terms = []
    for i in range(0, j + 1):
        a = sq_expr(i, first)
        if isinstance(a, Zero):
            continue
        b = sq_expr(j - i, tail)
        if isinstance(b, Zero):
            continue
        t = combine(a, b)
        if not isinstance(t, Zero):
            terms.append(t)
    if not terms:
        return None
    return add(*terms)


@lru_cache(maxsize=None)
def sq_expr(j: int, e: Expr) -> Expr:
    """Sq^j e as an unnormalized expression."""
    if j < 0 or j > e.degree or isinstance(e, Zero):
        return zero(e.width, e.degree + max(j, 0))
    if j == 0:
        return e
    if isinstance(e, Gen):
        return sq_generator_expr(j, e.g)
    if isinstance(e, Sum):
        terms = [sq_expr(j, t) for t in e.terms]
        terms = [t for t in terms if not isinstance(t, Zero)]
        return add(*terms) if terms else zero(e.width, e.degree + j)
    if isinstance(e, Conj):
        return conj(sq_expr(j, e.arg))
    if isinstance(e, Res):
        return res(sq_expr(j, e.arg))
    if isinstance(e, Tr):
        return tr(sq_expr(j, e.arg))
    if isinstance(e, (Cup, Odot)):
        combine = cup if isinstance(e, Cup) else odot
        out = _cartan(j, e.factors, combine)
        return zero(e.width, e.degree + j) if out is None else out
    raise TypeError(f"cannot apply Sq to {type(e).__name__}")


def sq(j: int, x) -> AltClass:
    """Sq^j on H*(BA_n), normalized in the certified basis."""
    e = as_expr(x)
    if j < 0 or j > e.degree:
        return AltClass(e.width, e.degree + max(j, 0))
    return normalize(sq_expr(j, e))


def total_sq(x, max_j: int | None = None) -> dict[int, AltClass]:
    e = as_expr(x)
    top = e.degree if max_j is None else min(max_j, e.degree)
    return {j: sq(j, e) for j in range(top + 1)}


# ---------------------------------------------------------------------------
# Restriction oracle


def sq_by_restriction(j: int, x) -> AltClass:
    """Sq^j computed from the polynomial action on restriction images."""
    e = as_expr(x)
    n, d = e.width, e.degree
    if j < 0 or j > d:
        return AltClass(n, d + max(j, 0))
    polys = [poly_sq(j, image(e, t), target_nvars(t)) for t in family_alt(n)]
    return class_from_images(n, d + j, polys)


def adem_terms(a: int, b: int) -> list[tuple[int, int]]:
    """Sq^a Sq^b = sum binom(b-1-c, a-2c) Sq^{a+b-c} Sq^c for 0 < a < 2b."""
    if not (0 < a < 2 * b):
        raise ValueError("Adem relation needs 0 < a < 2b")
    return [(a + b - c, c) for c in range(0, a // 2 + 1) if binom_mod2(b - 1 - c, a - 2 * c)]
