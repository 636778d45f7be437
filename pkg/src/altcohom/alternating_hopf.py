"""The almost-Hopf ring H*(BA_•; F_2).

Classes are sums of Hopf monomials ``1^± ⊙ m_1 ⊙ ... ⊙ m_p ⊙ m_ν``: charged
cup monomials ("columns") on power-of-two widths, followed by at most one
neutral cup monomial (the tail).  The additive basis in each (n, d) is
chosen greedily from structurally admissible candidates and certified by
the rank of their restriction images; its size is checked against the Gysin
count |G_q| + |G_a|.  Normal forms, products, conjugation and the concrete
coproduct are all computed by solving restriction images in that basis.
The coproduct is also available symbolically from the generator rules, the
cup bialgebra law and polarized distributivity, so the two routes can be
compared.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

from .f2_core import SpanBuilder, binom_mod2
from .restriction_detect import (
    ImageSpace,
    family_alt,
    image,
    pmul,
    shift_target,
    target_nvars,
)
from .symbols import (
    PLUS,
    MINUS,
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
from .symmetric_hopf import (
    SymClass,
    SymColumn,
    SymHopfMonomial,
    coproduct_expr as sym_coproduct_expr,
    gysin_Ga,
    gysin_Gq,
    in_Ga,
    sym_normalize,
)


class ParameterError(ValueError):
    pass


class BasisIncomplete(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Monomials


def _gen_key(g) -> tuple:
    if isinstance(g, Neutral):
        return (1, g.k, 0)
    return (g.ell, g.m, g.charge)


@dataclass(frozen=True, order=True)
class AltColumn:
    """A cup monomial on A_width: (generator, exponent) pairs."""

    width: int
    factors: tuple = ()

    @property
    def degree(self) -> int:
        return sum(g.degree * e for g, e in self.factors)

    @property
    def neutral(self) -> bool:
        return all(isinstance(g, Neutral) for g, _ in self.factors)

    def expr(self) -> Expr:
        if not self.factors:
            return gen(Unit(self.width // 2))
        return cup(*(power(gen(g), e) for g, e in self.factors))

    def conj_expr(self) -> Expr:
        if not self.factors:
            return self.expr()
        return cup(*(power(gen(g.conj()) if isinstance(g, Charged) else gen(g), e) for g, e in self.factors))

    def profile(self) -> tuple:
        """Charge-blind exponent profile, used to merge equal columns."""
        prof: dict = {}
        for g, e in self.factors:
            key = ("s", g.k) if isinstance(g, Neutral) else ("g", g.ell)
            prof[key] = prof.get(key, 0) + e
        return tuple(sorted(prof.items()))

    def sort_key(self) -> tuple:
        return (-self.width, -self.degree, tuple(sorted((_gen_key(g), e) for g, e in self.factors)))

    def __str__(self) -> str:
        if not self.factors:
            return f"1({self.width // 2})"
        parts = []
        for g, e in sorted(self.factors, key=lambda ge: _gen_key(ge[0])):
            parts.append(str(g) if e == 1 else f"{g}^{e}")
        return "*".join(parts)


@dataclass(frozen=True, order=True)
class AltHopfMonomial:
    sign: int
    columns: tuple = ()
    tail: AltColumn | None = None

    def __post_init__(self) -> None:
        if self.tail is not None and self.sign != PLUS:
            raise ParameterError("a monomial with a neutral tail carries the + sign")

    @property
    def width(self) -> int:
        return sum(c.width for c in self.columns) + (self.tail.width if self.tail else 0)

    @property
    def degree(self) -> int:
        return sum(c.degree for c in self.columns) + (self.tail.degree if self.tail else 0)

    @property
    def factors(self) -> list[AltColumn]:
        return list(self.columns) + ([self.tail] if self.tail else [])

    def expr(self) -> Expr:
        parts = [c.expr() for c in self.factors]
        if not parts:
            return gen(SignUnit(self.sign))
        core = odot(*parts)
        return conj(core) if self.sign == MINUS else core

    def __str__(self) -> str:
        parts = [str(c) for c in self.factors]
        if not parts:
            return "1" + "+-"[self.sign]
        body = " o ".join(parts)
        return body if self.sign == PLUS else f"1- o {body}"


def monomial_expr(m: AltHopfMonomial) -> Expr:
    return m.expr()


# ---------------------------------------------------------------------------
# Candidate enumeration


def _charged_columns(width: int, max_degree: int) -> list[AltColumn]:
    out: list[AltColumn] = []
    if width == 4:
        a = Neutral(2, 2)
        bp, bm = Charged(2, 1, PLUS), Charged(2, 1, MINUS)
        for N in range(1, max_degree // 3 + 1):
            for p in range(0, (max_degree - 3 * N) // 2 + 1):
                for e in (1, 0):
                    if e > N:
                        continue
                    f = [(a, p), (bp, e), (bm, N - e)]
                    out.append(AltColumn(4, tuple((g, k) for g, k in f if k)))
        return out
    J = width.bit_length() - 1
    levels = list(range(1, J + 1))
    units = {ell: (width >> ell) * (2**ell - 1) if ell > 1 else width // 2 for ell in levels}

    def rec(i: int, left: int, acc: list) -> Iterator[list]:
        if i == len(levels):
            yield list(acc)
            return
        ell = levels[i]
        for d in range(0, left // units[ell] + 1):
            acc.append((ell, d))
            yield from rec(i + 1, left - d * units[ell], acc)
            acc.pop()

    for prof in rec(0, max_degree, []):
        if not any(d for ell, d in prof if ell >= 2):
            continue
        fs = []
        for ell, d in prof:
            if d == 0:
                continue
            g = Neutral(width // 2, width // 2) if ell == 1 else Charged(ell, width >> ell, PLUS)
            fs.append((g, d))
        out.append(AltColumn(width, tuple(fs)))
    return out


def _tails(width: int, degree: int) -> list[AltColumn]:
    m = width // 2
    ks = list(range(2, m + 1))
    out = []

    def rec(i: int, left: int, acc: list) -> None:
        if left == 0:
            out.append(AltColumn(width, tuple(acc)))
            return
        if i == len(ks):
            return
        k = ks[i]
        for e in range(left // k, -1, -1):
            rec(i + 1, left - e * k, acc + ([(Neutral(k, m), e)] if e else []))

    rec(0, degree, [])
    return out


def candidates(n: int, d: int) -> list[AltHopfMonomial]:
    """Structurally admissible Hopf monomials of width n and degree d."""
    if n == 0:
        return [AltHopfMonomial(PLUS), AltHopfMonomial(MINUS)] if d == 0 else []
    pool: dict[tuple, list[AltColumn]] = {}
    w = 4
    while w <= n:
        for c in _charged_columns(w, d):
            pool.setdefault((w, c.profile()), []).append(c)
        w *= 2
    keys = sorted(pool)
    out: list[AltHopfMonomial] = []

    def rec(i: int, wleft: int, dleft: int, acc: list[AltColumn]) -> None:
        if i == len(keys):
            cols = tuple(sorted(acc, key=AltColumn.sort_key))
            if wleft == 0:
                if dleft == 0:
                    out.append(AltHopfMonomial(PLUS, cols))
                    if cols:
                        out.append(AltHopfMonomial(MINUS, cols))
            else:
                for t in _tails(wleft, dleft):
                    out.append(AltHopfMonomial(PLUS, cols, t))
            return
        rec(i + 1, wleft, dleft, acc)
        for c in pool[keys[i]]:
            if c.width <= wleft and c.degree <= dleft:
                acc.append(c)
                rec(i + 1, wleft - c.width, dleft - c.degree, acc)
                acc.pop()

    rec(0, n, d, [])
    return out


def _candidate_order(m: AltHopfMonomial) -> tuple:
    plus_count = sum(e for c in m.columns for g, e in c.factors if isinstance(g, Charged) and g.charge == PLUS)
    return (len(m.factors), m.sign, -plus_count, str(m))


# ---------------------------------------------------------------------------
# Certified basis


def gysin_count(n: int, d: int) -> int:
    if n == 0:
        return 2 if d == 0 else 0
    return len(gysin_Gq(n, d)) + len(gysin_Ga(n, d))


class _AltSolver:
    def __init__(self, n: int, d: int) -> None:
        self.n, self.d = n, d
        self.space = ImageSpace(family_alt(n))
        self.sb = SpanBuilder()
        self.basis: list[AltHopfMonomial] = []
        # SpanBuilder numbers every vector offered to it, independent or not
        self._tried: list[AltHopfMonomial] = []
        for m in sorted(candidates(n, d), key=_candidate_order):
            self._tried.append(m)
            if self.sb.add(self.space.vector(m.expr())):
                self.basis.append(m)
        self.expected = gysin_count(n, d)

    @property
    def complete(self) -> bool:
        return len(self.basis) == self.expected

    def solve(self, e: Expr) -> frozenset:
        return self.solve_vector(self.space.vector(e))

    def solve_vector(self, v: int) -> frozenset:
        mask = self.sb.coordinates(v)
        if mask is None:
            raise BasisIncomplete(f"class outside the certified span in ({self.n},{self.d})")
        return frozenset(b for i, b in enumerate(self._tried) if (mask >> i) & 1)


@lru_cache(maxsize=None)
def _solver(n: int, d: int) -> _AltSolver:
    if n % 2:
        raise ParameterError("only even n is supported")
    return _AltSolver(n, d)


def basis_alt(n: int, d: int) -> list[AltHopfMonomial]:
    """Certified Hopf monomial basis of H^d(BA_n)."""
    return list(_solver(n, d).basis)


def basis_certificate(n: int, d: int) -> tuple[int, int]:
    """(certified rank, Gysin count); equal when the basis is complete."""
    s = _solver(n, d)
    return len(s.basis), s.expected


def poincare_alt(n: int, max_degree: int) -> list[int]:
    return [len(basis_alt(n, d)) for d in range(max_degree + 1)]


# ---------------------------------------------------------------------------
# Classes


@dataclass(frozen=True)
class AltClass:
    width: int
    degree: int
    terms: frozenset = frozenset()

    def __add__(self, other: "AltClass") -> "AltClass":
        if (self.width, self.degree) != (other.width, other.degree):
            raise ParameterError("summands must share width and degree")
        return AltClass(self.width, self.degree, self.terms ^ other.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def sorted_terms(self) -> list[AltHopfMonomial]:
        return sorted(self.terms, key=_candidate_order)

    def expr(self) -> Expr:
        if not self.terms:
            return zero(self.width, self.degree)
        return add(*(t.expr() for t in self.sorted_terms()))

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.sorted_terms()) if self.terms else "0"


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (AltClass, AltHopfMonomial, SymClass, SymHopfMonomial)):
        return x.expr()
    raise TypeError(f"cannot interpret {type(x).__name__} as a class")


def normalize(x) -> AltClass:
    """Canonical sum of basis monomials representing x."""
    e = as_expr(x)
    if isinstance(e, Zero):
        return AltClass(e.width, e.degree)
    return AltClass(e.width, e.degree, _solver(e.width, e.degree).solve(e))


def class_from_images(n: int, d: int, polys: Sequence) -> AltClass:
    """The class of H^d(BA_n) with the given images on family_alt(n)."""
    s = _solver(n, d)
    return AltClass(n, d, s.solve_vector(s.space.vector_from_polys(polys)))


def cup_product(x, y) -> AltClass:
    return normalize(cup(as_expr(x), as_expr(y)))


def odot_product(x, y) -> AltClass:
    return normalize(odot(as_expr(x), as_expr(y)))


def conjugate(x) -> AltClass:
    """The involution, 1^- ⊙ x."""
    return normalize(odot(gen(SignUnit(MINUS)), as_expr(x)))


def tr_to_sym(x) -> SymClass:
    return sym_normalize(tr(as_expr(x)))


def res_from_sym(y) -> AltClass:
    return normalize(res(as_expr(y)))


def euler_product(y) -> SymClass:
    from .symmetric_hopf import euler_class

    e = as_expr(y)
    return sym_normalize(cup(euler_class(e.width), e))


# ---------------------------------------------------------------------------
# Gysin lifts


def a4_lift(p: int, n: int) -> Expr:
    """gamma_{1,2;2}^p * sum_{i < n/2} binom(n,i) (g+)^i (g-)^{n-i}."""
    if n < 1:
        raise ParameterError("need a positive power of gamma_{2,1}")
    bp, bm = gen(Charged(2, 1, PLUS)), gen(Charged(2, 1, MINUS))
    terms = []
    for i in range(0, n):
        if 2 * i >= n or not binom_mod2(n, i):
            continue
        fs = ([power(bp, i)] if i else []) + [power(bm, n - i)]
        terms.append(cup(*fs))
    core = add(*terms) if terms else zero(4, 3 * n)
    return cup(power(gen(Neutral(2, 2)), p), core) if p else core


def _binary_pieces(col: SymColumn) -> list[tuple[int, tuple]]:
    out = []
    w = col.width
    bit = 1
    while w:
        if w & 1:
            out.append((bit, col.exps))
        w >>= 1
        bit <<= 1
    return out


def _lift_piece(width: int, exps: tuple) -> Expr:
    if width == 4:
        d = dict(exps)
        return a4_lift(d.get(1, 0), d.get(2, 0))
    fs = []
    for ell, d in exps:
        g = Neutral(width // 2, width // 2) if ell == 1 else Charged(ell, width >> ell, PLUS)
        fs.append(power(gen(g), d))
    return cup(*fs)


def lift_expr(x: SymHopfMonomial) -> Expr:
    """x^+: the transfer product of lifts of the binary pieces of x."""
    if not in_Ga(x):
        raise ParameterError(f"{x} is not in G_a")
    pieces = []
    for col in x.columns:
        for w, exps in _binary_pieces(col):
            pieces.append(_lift_piece(w, exps))
    return odot(*pieces)


def lift_gysin(x: SymHopfMonomial, n: int | None = None) -> AltClass:
    if n is not None and x.width != n:
        raise ParameterError("monomial width does not match n")
    return normalize(lift_expr(x))


# ---------------------------------------------------------------------------
# Polarized basis


@dataclass
class PolarizedBasis:
    n: int
    d: int
    elements: list  # (kind, Expr) with kind in "+", "-", "o"
    space: ImageSpace
    sb: SpanBuilder

    @property
    def certified(self) -> bool:
        return self.sb.rank == len(self.elements) == gysin_count(self.n, self.d)

    def coords(self, e: Expr) -> list[tuple[str, Expr]]:
        mask = self.sb.coordinates(self.space.vector(e))
        if mask is None:
            raise BasisIncomplete(f"outside the polarized basis in ({self.n},{self.d})")
        return [self.elements[i] for i in range(len(self.elements)) if (mask >> i) & 1]


@lru_cache(maxsize=None)
def polarized_basis(n: int, d: int) -> PolarizedBasis:
    if n == 0:
        elems = [("+", gen(SignUnit(PLUS))), ("-", gen(SignUnit(MINUS)))] if d == 0 else []
    else:
        elems = []
        ga = gysin_Ga(n, d)
        for x in ga:
            elems.append(("+", lift_expr(x)))
        for x in ga:
            elems.append(("-", conj(lift_expr(x))))
        ga_set = set(ga)
        for y in gysin_Gq(n, d):
            if y not in ga_set:
                elems.append(("o", res(y.expr())))
    space = ImageSpace(family_alt(n))
    sb = SpanBuilder()
    for _, e in elems:
        sb.add(space.vector(e))
    return PolarizedBasis(n, d, elems, space, sb)


def polarized_coords(e: Expr) -> list[tuple[str, Expr]]:
    if isinstance(e, Zero):
        return []
    return polarized_basis(e.width, e.degree).coords(e)


# ---------------------------------------------------------------------------
# Coproducts


@dataclass(frozen=True)
class AltTensor:
    split: tuple[int, int]
    terms: frozenset  # pairs of AltHopfMonomial

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return " + ".join(f"({a}) (x) ({b})" for a, b in sorted(self.terms, key=lambda p: (str(p[0]), str(p[1]))))


def _tensor_basis(i: int, j: int, degree: int) -> list[tuple[AltHopfMonomial, AltHopfMonomial]]:
    pairs = []
    for d1 in range(degree + 1):
        for a in basis_alt(i, d1):
            for b in basis_alt(j, degree - d1):
                pairs.append((a, b))
    return pairs


class _TensorSolver:
    def __init__(self, i: int, j: int, degree: int) -> None:
        self.pairs = _tensor_basis(i, j, degree)
        self.targets = [(t1, shift_target(t2, target_nvars(t1))) for t1 in family_alt(i) for t2 in family_alt(j)]
        self._index: dict = {}
        self.sb = SpanBuilder()
        for a, b in self.pairs:
            self.sb.add(self.vec_pair(a.expr(), b.expr()))

    def _bits(self, ti: int, poly) -> int:
        v = 0
        for m in poly:
            key = (ti, m)
            pos = self._index.get(key)
            if pos is None:
                pos = self._index[key] = len(self._index)
            v |= 1 << pos
        return v

    def vec_pair(self, a: Expr, b: Expr) -> int:
        v = 0
        for ti, (t1, t2) in enumerate(self.targets):
            v ^= self._bits(ti, pmul(image(a, t1), image(b, t2)))
        return v

    def vec_class(self, e: Expr) -> int:
        v = 0
        for ti, (t1, t2) in enumerate(self.targets):
            v ^= self._bits(ti, image(e, t1 + t2))
        return v

    def solve_vec(self, v: int) -> frozenset:
        mask = self.sb.coordinates(v)
        if mask is None:
            raise BasisIncomplete("tensor outside the span of basis pairs")
        return frozenset(p for k, p in enumerate(self.pairs) if (mask >> k) & 1)


@lru_cache(maxsize=None)
def _tensor_solver(i: int, j: int, degree: int) -> _TensorSolver:
    return _TensorSolver(i, j, degree)


def _check_split(width: int, split: tuple[int, int]) -> tuple[int, int]:
    i, j = split
    if i < 0 or j < 0 or i + j != width or i % 2 or j % 2:
        raise ParameterError(f"invalid split {split} of width {width}")
    return i, j


def coproduct_alt(x, split: tuple[int, int]) -> AltTensor:
    """Component (i, j) of the coproduct, computed by restriction to
    products of detection subgroups."""
    e = as_expr(x)
    i, j = _check_split(e.width, split)
    if e.width == 0:
        return normalize_tensor(coproduct_symbolic(e).get((0, 0), []), (0, 0))
    if i == 0 or j == 0:
        xc = normalize(e)
        xb = conjugate(e)
        plus = AltHopfMonomial(PLUS)
        minus = AltHopfMonomial(MINUS)
        terms: set = set()
        for t in xc.terms:
            terms ^= {(plus, t) if i == 0 else (t, plus)}
        for t in xb.terms:
            terms ^= {(minus, t) if i == 0 else (t, minus)}
        return AltTensor((i, j), frozenset(terms))
    solver = _tensor_solver(i, j, e.degree)
    return AltTensor((i, j), solver.solve_vec(solver.vec_class(e)))


def normalize_tensor(pairs: Sequence[tuple[Expr, Expr]], split: tuple[int, int]) -> AltTensor:
    out: set = set()
    for a, b in pairs:
        if isinstance(a, Zero) or isinstance(b, Zero):
            continue
        for u in normalize(a).terms:
            for v in normalize(b).terms:
                out ^= {(u, v)}
    return AltTensor(split, frozenset(out))


def _unit_expr(m: int) -> Expr:
    """1_m, with 1_0 = 1^+ + 1^-."""
    if m == 0:
        return add(gen(SignUnit(PLUS)), gen(SignUnit(MINUS)))
    return gen(Unit(m))


def _charged_expr(ell: int, m: int, charge: int) -> Expr:
    if m == 0:
        return gen(SignUnit(charge))
    g = gen(Charged(ell, m, PLUS))
    return conj(g) if charge else g


def _neutral_expr(p: int, i: int) -> Expr:
    if p == 0:
        return _unit_expr(i)
    return gen(Neutral(p, i))


def _gen_coproduct(g) -> list[tuple[Expr, Expr]]:
    out = []
    if isinstance(g, SignUnit):
        for s in (PLUS, MINUS):
            out.append((gen(SignUnit(s)), gen(SignUnit(s ^ g.charge))))
    elif isinstance(g, Unit):
        for i in range(g.m + 1):
            out.append((_unit_expr(i), _unit_expr(g.m - i)))
    elif isinstance(g, Charged):
        for i in range(g.m + 1):
            for s in (PLUS, MINUS):
                out.append((_charged_expr(g.ell, i, s), _charged_expr(g.ell, g.m - i, s ^ g.charge)))
    elif isinstance(g, Neutral):
        for i in range(g.m + 1):
            j = g.m - i
            for p in range(0, min(i, g.k) + 1):
                q = g.k - p
                if p == 1 or q == 1 or q > j:
                    continue
                out.append((_neutral_expr(p, i), _neutral_expr(q, j)))
    else:
        raise TypeError(f"no coproduct rule for {g!r}")
    return out


def _rho_plus(kinds: Sequence[str]) -> bool:
    for k in kinds:
        if k != "o":
            return k == "+"
    return False


def odot_polarized(da: Sequence[tuple[Expr, Expr]], db: Sequence[tuple[Expr, Expr]]) -> list[tuple[Expr, Expr]]:
    """Delta(alpha) ⊙_{rho+} Delta(beta) for coproducts given as pair lists."""
    out = []
    pa = [(polarized_coords(l), polarized_coords(r)) for l, r in da]
    pb = [(polarized_coords(l), polarized_coords(r)) for l, r in db]
    for la, ra in pa:
        for lb, rb in pb:
            for k1, a1 in la:
                for k2, a2 in ra:
                    for k3, b1 in lb:
                        for k4, b2 in rb:
                            if _rho_plus((k1, k2, k3, k4)):
                                out.append((odot(a1, b1), odot(a2, b2)))
    return out


def coproduct_symbolic(e: Expr) -> dict[tuple[int, int], list[tuple[Expr, Expr]]]:
    """Coproduct from the generator rules, the cup bialgebra law, polarized
    distributivity for transfer products and Delta(conj x) = (conj x id) Delta x."""

    def rec(x: Expr) -> list[tuple[Expr, Expr]]:
        if isinstance(x, Zero):
            return []
        if isinstance(x, Gen):
            return _gen_coproduct(x.g)
        if isinstance(x, Sum):
            return [p for t in x.terms for p in rec(t)]
        if isinstance(x, Conj):
            return [(conj(l), r) for l, r in rec(x.arg)]
        if isinstance(x, Cup):
            acc = rec(x.factors[0])
            for f in x.factors[1:]:
                other = rec(f)
                acc = [
                    (cup(a1, b1), cup(a2, b2))
                    for a1, a2 in acc
                    for b1, b2 in other
                    if a1.width == b1.width
                ]
            return acc
        if isinstance(x, Odot):
            acc = rec(x.factors[0])
            for f in x.factors[1:]:
                acc = odot_polarized(acc, rec(f))
            return acc
        if isinstance(x, Res):
            out = []
            for (i, j), pairs in sym_coproduct_expr(x.arg).items():
                for l, r in pairs:
                    le = _unit_expr(0) if l is None else res(l)
                    re_ = _unit_expr(0) if r is None else res(r)
                    out.append((le, re_))
            return out
        raise TypeError(f"no coproduct rule for {type(x).__name__}")

    out: dict[tuple[int, int], list] = {}
    for l, r in rec(e):
        if isinstance(l, Zero) or isinstance(r, Zero):
            continue
        out.setdefault((l.width, r.width), []).append((l, r))
    return out


def coproduct_alt_symbolic(x, split: tuple[int, int]) -> AltTensor:
    e = as_expr(x)
    split = _check_split(e.width, split)
    return normalize_tensor(coproduct_symbolic(e).get(split, []), split)


# ---------------------------------------------------------------------------
# Named classes


def gamma(ell: int, m: int, charge: int = PLUS) -> Expr:
    return _charged_expr(ell, m, charge)


def neutral(k: int, m: int) -> Expr:
    if k == 1:
        return zero(2 * m, 1)
    return _neutral_expr(k, m)


def unit(m: int) -> Expr:
    return _unit_expr(m)
