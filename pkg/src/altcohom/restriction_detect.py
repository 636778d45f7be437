"""Invariant-ring targets, restriction to elementary abelian subgroups, and
the detection harness.

A class is tested through its images on products of elementary abelian
"atoms" placed on consecutive blocks of points:

* ``V_k^±`` (k >= 3): the regular (C_2)^k on 2^k points, one atom per
  A_{2^k}-conjugacy class;
* ``V_2``: the Klein four-group on 4 points (its two classes coincide);
* ``AV_a`` (a >= 2): the even part of a disjoint transpositions, with
  variables y_1..y_{a-1}; a transposition class x_i restricts to y_i for
  i < a and x_a to y_1 + ... + y_{a-1};
* ``F``: a fixed point.

Symmetric classes are tested on products of ``S_k`` atoms, the regular
(C_2)^k on 2^k points (``S_0`` is a fixed point).

Inside the engine a polynomial is a frozenset of monomials, and a monomial
is an int holding one byte-sized exponent per variable.  Images of cup
products are products of images.  Images of transfer products follow the
double coset formula: only cosets fixed by the elementary abelian subgroup
survive, since transfer from a proper subgroup of an elementary abelian
2-group vanishes mod 2.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .f2_core import BitMatrix, SpanBuilder, binom_mod2, kernel_basis
from .symbols import (
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
    conj,
    odot,
)

BITS = 8
_EMASK = (1 << BITS) - 1

Poly = frozenset
ONE: Poly = frozenset({0})
ZERO: Poly = frozenset()


# ---------------------------------------------------------------------------
# Encoded polynomial arithmetic


def var(i: int) -> Poly:
    return frozenset({1 << (BITS * i)})


def encode(exps: Sequence[int]) -> int:
    out = 0
    for i, e in enumerate(exps):
        if not 0 <= e <= _EMASK:
            raise OverflowError("exponent outside the packed range")
        out |= e << (BITS * i)
    return out


def decode(mono: int, nvars: int) -> tuple[int, ...]:
    return tuple((mono >> (BITS * i)) & _EMASK for i in range(nvars))


def _toggle(s: set, x) -> None:
    if x in s:
        s.remove(x)
    else:
        s.add(x)


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ZERO
    if a == ONE:
        return b
    if b == ONE:
        return a
    out: set[int] = set()
    for x in a:
        for y in b:
            _toggle(out, x + y)
    return frozenset(out)


def ppow(a: Poly, k: int) -> Poly:
    out = ONE
    base = a
    while k:
        if k & 1:
            out = pmul(out, base)
        k >>= 1
        if k:
            base = pmul(base, base)
    return out


def psum(polys: Iterable[Poly]) -> Poly:
    out: set[int] = set()
    for p in polys:
        out ^= p
    return frozenset(out)


def pdegree(p: Poly, nvars: int) -> int | None:
    degs = {sum(decode(m, nvars)) for m in p}
    if not degs:
        return None
    if len(degs) > 1:
        raise ValueError("polynomial is not homogeneous")
    return degs.pop()


def substitute(p: Poly, images: Sequence[Poly], nvars: int) -> Poly:
    """Replace variable i by ``images[i]`` for i < nvars."""
    cache: dict[tuple[int, int], Poly] = {}
    out: set[int] = set()
    for mono in p:
        term = ONE
        for i, e in enumerate(decode(mono, nvars)):
            if e:
                key = (i, e)
                if key not in cache:
                    cache[key] = ppow(images[i], e)
                term = pmul(term, cache[key])
                if not term:
                    break
        out ^= term
    return frozenset(out)


def poly_sq(j: int, p: Poly, nvars: int) -> Poly:
    """Sq^j on F_2[x_1..x_n] with |x_i| = 1: Sq(x) = x + x^2 and Cartan."""
    out: set[int] = set()
    if j < 0:
        return ZERO
    for mono in p:
        states: set[tuple[int, int]] = {(0, 0)}
        for i, e in enumerate(decode(mono, nvars)):
            nxt: set[tuple[int, int]] = set()
            for built, used in states:
                for t in range(0, min(e, j - used) + 1):
                    if binom_mod2(e, t):
                        _toggle(nxt, (built + ((e + t) << (BITS * i)), used + t))
            states = nxt
        for built, used in states:
            if used == j:
                _toggle(out, built)
    return frozenset(out)


# ---------------------------------------------------------------------------
# MultiPoly: the named-variable surface


@dataclass(frozen=True)
class MultiPoly:
    """Polynomial over F_2 in named variables; terms are exponent tuples."""

    variables: tuple[str, ...]
    terms: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_encoded(cls, p: Poly, variables: Sequence[str]) -> "MultiPoly":
        n = len(variables)
        return cls(tuple(variables), frozenset(decode(m, n) for m in p))

    @classmethod
    def gen(cls, variables: Sequence[str], i: int) -> "MultiPoly":
        e = [0] * len(variables)
        e[i] = 1
        return cls(tuple(variables), frozenset({tuple(e)}))

    @classmethod
    def one(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls(tuple(variables), frozenset({(0,) * len(variables)}))

    def encoded(self) -> Poly:
        return frozenset(encode(t) for t in self.terms)

    def _check(self, other: "MultiPoly") -> None:
        if self.variables != other.variables:
            raise ValueError("polynomials live in different rings")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        return MultiPoly(self.variables, self.terms ^ other.terms)

    __sub__ = __add__

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check(other)
        return MultiPoly.from_encoded(pmul(self.encoded(), other.encoded()), self.variables)

    def __pow__(self, k: int) -> "MultiPoly":
        return MultiPoly.from_encoded(ppow(self.encoded(), k), self.variables)

    def __bool__(self) -> bool:
        return bool(self.terms)

    @property
    def degree(self) -> int | None:
        degs = {sum(t) for t in self.terms}
        if not degs:
            return None
        if len(degs) > 1:
            raise ValueError("polynomial is not homogeneous")
        return degs.pop()

    def substitute(self, images: Sequence["MultiPoly"]) -> "MultiPoly":
        if len(images) != len(self.variables) or not images:
            raise ValueError("need one image per variable")
        tgt = images[0].variables
        p = substitute(self.encoded(), [im.encoded() for im in images], len(self.variables))
        return MultiPoly.from_encoded(p, tgt)

    def sq(self, j: int) -> "MultiPoly":
        return MultiPoly.from_encoded(poly_sq(j, self.encoded(), len(self.variables)), self.variables)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for t in sorted(self.terms, reverse=True):
            f = [v if e == 1 else f"{v}^{e}" for v, e in zip(self.variables, t) if e]
            parts.append("*".join(f) if f else "1")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Dickson and other invariants


@lru_cache(maxsize=None)
def _dickson(k: int, off: int) -> tuple[Poly, ...]:
    """Coefficients c_0..c_{2^k} of prod_{v in F_2^k} (X + v.x) in x_off.."""
    coeffs: list[Poly] = [ONE]
    for v in range(2**k):
        lin = psum(var(off + i) for i in range(k) if (v >> i) & 1)
        nxt = [ZERO] * (len(coeffs) + 1)
        for c, p in enumerate(coeffs):
            nxt[c + 1] = nxt[c + 1] ^ p
            nxt[c] = nxt[c] ^ pmul(lin, p)
        coeffs = nxt
    return tuple(coeffs)


def dickson(k: int, i: int, off: int = 0) -> Poly:
    """D_{k,i}: the coefficient of X^{2^i}, of degree 2^k - 2^i."""
    if not 0 <= i < k:
        raise ValueError("need 0 <= i < k")
    return _dickson(k, off)[2**i]


def dickson_gens(n: int) -> list[MultiPoly]:
    """The n Dickson generators of F_2[x_1..x_n]^{GL_n}, by increasing degree."""
    if not 1 <= n <= 3:
        raise ValueError("Dickson generators are supported for 1 <= n <= 3")
    names = [f"x{i + 1}" for i in range(n)]
    return [MultiPoly.from_encoded(dickson(n, i), names) for i in reversed(range(n))]


def a4_a(off: int = 0) -> Poly:
    x, y = var(off), var(off + 1)
    return psum([pmul(x, x), pmul(x, y), pmul(y, y)])


def a4_b(sign: int, off: int = 0) -> Poly:
    """b_+ = x1^3 + x1^2 x2 + x2^3 and its conjugate b_- (swap x1, x2)."""
    x, y = var(off), var(off + 1)
    if sign:
        x, y = y, x
    return psum([ppow(x, 3), pmul(pmul(x, x), y), ppow(y, 3)])


def monomials(nvars: int, d: int) -> list[int]:
    out = []

    def rec(i: int, left: int, acc: int) -> None:
        if i == nvars - 1:
            out.append(acc + (left << (BITS * i)))
            return
        for e in range(left, -1, -1):
            rec(i + 1, left - e, acc + (e << (BITS * i)))

    if nvars == 0:
        return [0] if d == 0 else []
    rec(0, d, 0)
    return out


class InvariantRing:
    """Fixed subring of F_2[x_1..x_n] under a finite linear group.

    ``group`` is ``"GL"`` (GL_n(F_2)), ``"C3"`` (the order-three subgroup of
    GL_2 cycling x_1, x_2, x_1 + x_2) or ``"S"`` (variable permutations)."""

    def __init__(self, nvars: int, group: str) -> None:
        if group == "C3" and nvars != 2:
            raise ValueError("the C3 action is on two variables")
        if group not in ("GL", "C3", "S"):
            raise ValueError(f"unknown group {group!r}")
        self.nvars = nvars
        self.group = group
        self._cache: dict[int, list[Poly]] = {}

    @property
    def names(self) -> list[str]:
        return [f"x{i + 1}" for i in range(self.nvars)]

    def generators(self) -> list[list[Poly]]:
        """Substitutions (image of each variable) generating the group."""
        n = self.nvars
        xs = [var(i) for i in range(n)]
        gens: list[list[Poly]] = []
        if self.group == "C3":
            return [[xs[1], xs[0] ^ xs[1]]]
        for i in range(n - 1):
            g = list(xs)
            g[i], g[i + 1] = xs[i + 1], xs[i]
            gens.append(g)
        if self.group == "GL" and n >= 1:
            if n == 1:
                return gens
            g = list(xs)
            g[0] = xs[0] ^ xs[1]
            gens.append(g)
        return gens

    def basis(self, d: int) -> list[Poly]:
        if d not in self._cache:
            monos = monomials(self.nvars, d)
            idx = {m: i for i, m in enumerate(monos)}
            # Row (g, t) and column m hold the coefficient of t in (g - 1)(m);
            # invariants form the kernel of the stacked map.
            blocks = []
            for g in self.generators():
                supp = []
                for m in monos:
                    img = substitute(frozenset({m}), g, self.nvars) ^ frozenset({m})
                    supp.append([idx[t] for t in img])
                blocks.append(BitMatrix.from_support(supp, len(monos)).to_dense().T)
            if blocks:
                vecs = kernel_basis(BitMatrix.from_dense(np.vstack(blocks)))
            else:
                vecs = list(np.eye(len(monos), dtype=np.uint8))
            self._cache[d] = [frozenset(monos[i] for i in np.flatnonzero(v)) for v in vecs]
        return self._cache[d]

    def dim(self, d: int) -> int:
        return len(self.basis(d))

    def basis_polys(self, d: int) -> list[MultiPoly]:
        return [MultiPoly.from_encoded(p, self.names) for p in self.basis(d)]

    def is_invariant(self, p: Poly) -> bool:
        return all(substitute(p, g, self.nvars) == p for g in self.generators())


def c3_invariants(d: int) -> list[MultiPoly]:
    """Basis of the degree-d part of F_2[x1, x2]^{C_3}."""
    return InvariantRing(2, "C3").basis_polys(d)


def in_span(polys: Sequence[Poly], target: Poly) -> bool:
    sb = SpanBuilder()
    index: dict[int, int] = {}

    def vec(p: Poly) -> int:
        v = 0
        for m in p:
            v |= 1 << index.setdefault(m, len(index))
        return v

    for p in polys:
        sb.add(vec(p))
    return sb.coordinates(vec(target)) is not None


# ---------------------------------------------------------------------------
# Targets


@dataclass(frozen=True, order=True)
class Atom:
    kind: str  # "V", "A", "F" (alternating), "S" (symmetric), "Z" (A_0')
    size: int  # k for V/S, a for A
    sign: int = 0
    off: int = 0

    @property
    def width(self) -> int:
        if self.kind in ("V", "S"):
            return 2**self.size
        if self.kind == "A":
            return 2 * self.size
        if self.kind == "F":
            return 1
        return 0

    @property
    def nvars(self) -> int:
        if self.kind in ("V", "S"):
            return self.size
        if self.kind == "A":
            return self.size - 1
        return 0

    def label(self) -> str:
        if self.kind == "V":
            return f"V{self.size}" + ("" if self.size == 2 else "+-"[self.sign])
        if self.kind == "A":
            return f"AV{self.size}"
        if self.kind == "S":
            return f"V{self.size}"
        if self.kind == "F":
            return "pt"
        return "1" + "+-"[self.sign]


Target = tuple


def target_nvars(t: Target) -> int:
    return max((a.off + a.nvars for a in t), default=0)


def target_width(t: Target) -> int:
    return sum(a.width for a in t)


def target_label(t: Target) -> str:
    return "x".join(a.label() for a in t) or "trivial"


def variable_names(t: Target) -> list[str]:
    names = [""] * target_nvars(t)
    xi = yi = 0
    for a in t:
        for j in range(a.nvars):
            if a.kind == "A":
                yi += 1
                names[a.off + j] = f"y{yi}"
            else:
                xi += 1
                names[a.off + j] = f"x{xi}"
    return names


def build_target(atoms: Sequence[tuple], start: int = 0) -> Target:
    """Assign variable offsets to atoms given as (kind, size[, sign])."""
    out = []
    off = start
    for item in atoms:
        kind, size = item[0], item[1]
        sign = item[2] if len(item) > 2 else 0
        a = Atom(kind, size, sign, off)
        out.append(a)
        off += a.nvars
    return tuple(out)


def shift_target(t: Target, start: int) -> Target:
    return build_target([(a.kind, a.size, a.sign) for a in t], start)


def concat_targets(t1: Target, t2: Target) -> Target:
    return t1 + shift_target(t2, target_nvars(t1))


def _v_multisets(width: int, min_k: int = 2) -> Iterator[list[tuple]]:
    """Multisets of V atoms (k >= 2; sign only for k >= 3) of total width."""

    choices = []
    k = 2
    while 2**k <= max(width, 0):
        if k == 2:
            choices.append(("V", 2, 0))
        else:
            choices += [("V", k, 0), ("V", k, 1)]
        k += 1
    choices.sort(key=lambda c: (-c[1], c[2]))

    def rec(i: int, left: int) -> Iterator[list[tuple]]:
        if left == 0:
            yield []
            return
        for j in range(i, len(choices)):
            w = 2 ** choices[j][1]
            if w <= left:
                for rest in rec(j, left - w):
                    yield [choices[j]] + rest

    yield from rec(0, width)


@lru_cache(maxsize=None)
def family_alt(n: int) -> tuple[Target, ...]:
    """Detection targets for H*(BA_n): V-atom products with optionally one
    AV atom or a pair of fixed points."""
    if n == 0:
        return (build_target([("Z", 0, 0)]), build_target([("Z", 0, 1)]))
    if n % 2:
        raise ValueError("only even n is supported")
    out: list[Target] = []
    for vw in range(n - n % 4, -1, -4):
        rest = n - vw
        tails: list[list[tuple]] = []
        if rest == 0:
            tails = [[]]
        elif rest == 2:
            tails = [[("F", 0), ("F", 0)]]
        elif rest >= 4:
            tails = [[("A", rest // 2)]]
        for vs in _v_multisets(vw):
            for tail in tails:
                out.append(build_target(vs + tail))
    return tuple(out)


@lru_cache(maxsize=None)
def family_sym(n: int) -> tuple[Target, ...]:
    """Products of regular elementary abelian atoms covering n points."""
    out: list[Target] = []

    def rec(left: int, maxk: int, acc: list) -> None:
        if left == 0:
            out.append(build_target(acc))
            return
        for k in range(maxk, -1, -1):
            if 2**k <= left:
                rec(left - 2**k, k, acc + [("S", k)])

    top = max(n.bit_length() - 1, 0)
    rec(n, top, [])
    return tuple(out)


# ---------------------------------------------------------------------------
# Atom-level restriction rules


@lru_cache(maxsize=None)
def _elem_sym(forms: tuple[Poly, ...], p: int) -> Poly:
    table = [ONE] + [ZERO] * p
    for f in forms:
        for q in range(p, 0, -1):
            table[q] = table[q] ^ pmul(table[q - 1], f)
    return table[p]


def _av_forms(a: Atom) -> tuple[Poly, ...]:
    ys = [var(a.off + i) for i in range(a.size - 1)]
    return tuple(ys) + (psum(ys),)


def atom_charged(a: Atom, ell: int, i: int, sign: int) -> Poly:
    """Image of gamma^sign_{ell,i} on a single atom of width i 2^ell."""
    if a.kind == "V":
        if a.size == 2:
            return a4_b(sign, a.off) if (ell, i) == (2, 1) else ZERO
        if sign != a.sign:
            return ZERO
        return dickson(a.size, a.size - ell, a.off)
    if a.kind == "A":
        if (ell, i) == (2, 1):
            return ppow(var(a.off), 3)
        return ZERO
    return ZERO


def atom_neutral(a: Atom, p: int, i: int) -> Poly:
    """Image of gamma_{1,p;i} on an atom of width 2i (p != 1)."""
    if p == 0:
        return ONE
    if a.kind == "V":
        return dickson(a.size, a.size - 1, a.off) if p == i else ZERO
    if a.kind == "A":
        return _elem_sym(_av_forms(a), p)
    return ZERO


def _gen_alt(g, t: Target) -> Poly:
    if isinstance(g, Unit):
        return ONE
    if isinstance(g, SignUnit):
        if len(t) == 1 and t[0].kind == "Z":
            return ONE if t[0].sign == g.charge else ZERO
        raise ValueError("sign units live on the empty component")
    if isinstance(g, Charged):
        step = 2**g.ell
        states = {0: ONE}
        for a in t:
            if a.width % step:
                return ZERO
            i = a.width // step
            imgs = [atom_charged(a, g.ell, i, s) for s in (0, 1)]
            nxt: dict[int, Poly] = {}
            for par, pol in states.items():
                for s in (0, 1):
                    if imgs[s]:
                        key = par ^ s
                        nxt[key] = nxt.get(key, ZERO) ^ pmul(pol, imgs[s])
            states = nxt
        return states.get(g.charge, ZERO)
    if isinstance(g, Neutral):
        states = {0: ONE}
        for a in t:
            if a.kind == "F":
                continue
            i = a.width // 2
            nxt = {}
            for used, pol in states.items():
                for p in range(0, min(i, g.k - used) + 1):
                    if p == 1:
                        continue
                    img = atom_neutral(a, p, i)
                    if img:
                        nxt[used + p] = nxt.get(used + p, ZERO) ^ pmul(pol, img)
            states = nxt
        return states.get(g.k, ZERO)
    raise TypeError(f"{g!r} is not an alternating generator")


def _gen_sym(g: SymGen, t: Target) -> Poly:
    if g.ell == 0:
        return ONE
    out = ONE
    step = 2**g.ell
    for a in t:
        if a.width % step:
            return ZERO
        out = pmul(out, dickson(a.size, a.size - g.ell, a.off))
    return out


# ---------------------------------------------------------------------------
# The evaluation engine


def is_symmetric_target(t: Target) -> bool:
    return any(a.kind == "S" for a in t)


def _conj_trivial(t: Target) -> bool:
    return any(a.kind == "A" for a in t) or sum(1 for a in t if a.kind == "F") >= 2


def _swap_pair(p: Poly, off: int) -> Poly:
    out: set[int] = set()
    sh0, sh1 = BITS * off, BITS * (off + 1)
    for m in p:
        e0 = (m >> sh0) & _EMASK
        e1 = (m >> sh1) & _EMASK
        m2 = m - (e0 << sh0) - (e1 << sh1) + (e1 << sh0) + (e0 << sh1)
        out.add(m2)
    return frozenset(out)


def _width0_coeffs(e: Expr) -> tuple[int, int]:
    """(a, b) with e = a 1^+ + b 1^- on the empty component."""
    z = family_alt(0)
    return (1 if image(e, z[0]) else 0, 1 if image(e, z[1]) else 0)


def _assignments(t: Target, widths: Sequence[int]) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Ways to distribute atoms among factors, order preserved per factor."""
    r = len(widths)

    def rec(i: int, left: list[int], acc: list[list[int]]) -> Iterator:
        if i == len(t):
            if all(x == 0 for x in left):
                yield tuple(tuple(a) for a in acc)
            return
        w = t[i].width
        for j in range(r):
            if left[j] >= w:
                left[j] -= w
                acc[j].append(i)
                yield from rec(i + 1, left, acc)
                acc[j].pop()
                left[j] += w

    yield from rec(0, list(widths), [[] for _ in range(r)])


def _mackey(factors: Sequence[Expr], t: Target, symmetric: bool) -> Poly:
    out: set[int] = set()
    for assign in _assignments(t, [f.width for f in factors]):
        subs = [tuple(t[i] for i in idx) for idx in assign]
        if symmetric:
            term = ONE
            for f, s in zip(factors, subs):
                term = pmul(term, image(f, s))
                if not term:
                    break
            out ^= term
            continue
        states = {0: ONE}
        for f, s in zip(factors, subs):
            imgs = (image(f, s), image(conj(f), s))
            nxt: dict[int, Poly] = {}
            for par, pol in states.items():
                for c in (0, 1):
                    if imgs[c]:
                        nxt[par ^ c] = nxt.get(par ^ c, ZERO) ^ pmul(pol, imgs[c])
            states = nxt
        out ^= states.get(0, ZERO)
    return frozenset(out)


def _sym_target_of(t: Target) -> tuple[Target, list[Poly], int]:
    """Symmetric target containing the alternating target t, with the linear
    substitution carrying its variables back to t's variables."""
    base = target_nvars(t)
    atoms = []
    subst: dict[int, Poly] = {}
    fresh = base
    for a in t:
        if a.kind == "V":
            atoms.append(("S", a.size, 0, a.off))
            for j in range(a.size):
                subst[a.off + j] = var(a.off + j)
        elif a.kind == "F":
            atoms.append(("S", 0, 0, 0))
        elif a.kind == "A":
            forms = _av_forms(a)
            for f in forms:
                atoms.append(("S", 1, 0, fresh))
                subst[fresh] = f
                fresh += 1
        else:
            raise ValueError("restriction from the symmetric side needs a positive width")
    st = tuple(Atom(k, s, sg, off) for k, s, sg, off in atoms)
    images = [subst.get(i, ZERO) for i in range(fresh)]
    return st, images, fresh


@lru_cache(maxsize=None)
def image(e: Expr, t: Target) -> Poly:
    """Restriction of the class e to the target t, as an encoded polynomial."""
    if e.width != target_width(t):
        raise ValueError(f"width {e.width} does not match target {target_label(t)}")
    sym = is_symmetric_target(t)
    if isinstance(e, Zero):
        return ZERO
    if isinstance(e, Gen):
        if sym:
            if not isinstance(e.g, SymGen):
                raise TypeError("alternating generator evaluated on a symmetric target")
            return _gen_sym(e.g, t)
        return _gen_alt(e.g, t)
    if isinstance(e, Sum):
        return psum(image(x, t) for x in e.terms)
    if isinstance(e, Cup):
        out = ONE
        for f in e.factors:
            out = pmul(out, image(f, t))
            if not out:
                break
        return out
    if isinstance(e, Conj):
        if sym:
            raise TypeError("conjugation is only defined on alternating classes")
        if len(t) == 1 and t[0].kind == "Z":
            return image(e.arg, (Atom("Z", 0, t[0].sign ^ 1, 0),))
        if _conj_trivial(t):
            return image(e.arg, t)
        first = t[0]
        if first.size == 2:
            return _swap_pair(image(e.arg, t), first.off)
        flipped = (Atom(first.kind, first.size, first.sign ^ 1, first.off),) + t[1:]
        return image(e.arg, flipped)
    if isinstance(e, Odot):
        if sym:
            return _mackey(e.factors, t, True)
        a, b = 1, 0
        rest = []
        for f in e.factors:
            if f.width == 0:
                c, d = _width0_coeffs(f)
                a, b = (a * c + b * d) & 1, (a * d + b * c) & 1
            else:
                rest.append(f)
        if not rest:
            z = t[0]
            return ONE if (a, b)[z.sign] else ZERO
        core = odot(*rest) if len(rest) > 1 else rest[0]
        out = ZERO
        if a:
            out ^= _mackey(rest, t, False) if len(rest) > 1 else image(core, t)
        if b:
            out ^= image(conj(core), t)
        return out
    if isinstance(e, Res):
        if sym:
            raise TypeError("restriction lands on alternating targets")
        st, images, nv = _sym_target_of(t)
        return substitute(image(e.arg, st), images, nv)
    if isinstance(e, Tr):
        if not sym:
            raise TypeError("transfer lands on symmetric targets")
        if any(a.kind == "S" and a.size == 1 for a in t):
            return ZERO
        at = tuple(Atom("V", a.size, 0, a.off) if a.size >= 2 else Atom("F", 0, 0, 0) for a in t)
        return image(e.arg, at) ^ image(conj(e.arg), at)
    raise TypeError(f"cannot evaluate {type(e).__name__}")


# ---------------------------------------------------------------------------
# Image vectors and ranks


class ImageSpace:
    """Assigns bit positions to (target, monomial) pairs so that images on a
    list of targets become Python-int vectors."""

    def __init__(self, targets: Sequence[Target]) -> None:
        self.targets = tuple(targets)
        self._index: dict[tuple[int, int], int] = {}

    def vector(self, e: Expr, which: Sequence[int] | None = None) -> int:
        v = 0
        idxs = range(len(self.targets)) if which is None else which
        for ti in idxs:
            for m in image(e, self.targets[ti]):
                key = (ti, m)
                pos = self._index.get(key)
                if pos is None:
                    pos = self._index[key] = len(self._index)
                v |= 1 << pos
        return v

    def vector_from_polys(self, polys: Sequence[Poly]) -> int:
        """Vector of precomputed images, one polynomial per target."""
        v = 0
        for ti, poly in enumerate(polys):
            for m in poly:
                key = (ti, m)
                pos = self._index.get(key)
                if pos is None:
                    pos = self._index[key] = len(self._index)
                v |= 1 << pos
        return v


def images_equal(a: Expr, b: Expr, targets: Sequence[Target]) -> list[tuple[str, bool]]:
    return [(target_label(t), image(a, t) == image(b, t)) for t in targets]


# ---------------------------------------------------------------------------
# Target parsing and reports


class Undetermined:
    """Marker for restrictions that the tabulated rules leave open."""

    def __init__(self, reason: str) -> None:
        self.reason = reason

    def __repr__(self) -> str:
        return f"Undetermined({self.reason!r})"

    def __bool__(self) -> bool:
        return False


def parse_target(text: str, n: int) -> Target:
    """Targets such as ``V3+``, ``V3-``, ``V2``, ``AV`` (= AV_{n/2}),
    ``AV3`` or products ``V2xAV2``.  Widths must sum to n."""
    parts = [p.strip() for p in text.split("x") if p.strip()]
    atoms: list[tuple] = []
    for p in parts:
        if p.startswith("AV"):
            rest = p[2:]
            atoms.append(("A", int(rest) if rest else n // 2))
        elif p.startswith("V"):
            body = p[1:]
            sign = 0
            if body.endswith(("+", "-")):
                sign = 0 if body[-1] == "+" else 1
                body = body[:-1]
            k = int(body)
            if k < 2:
                raise ValueError("V atoms need k >= 2 on the alternating side")
            atoms.append(("V", k, 0 if k == 2 else sign))
        elif p == "pt":
            atoms.append(("F", 0))
        else:
            raise ValueError(f"unknown target atom {p!r}")
    t = build_target(atoms)
    if target_width(t) != n:
        raise ValueError(f"target {text!r} has width {target_width(t)}, expected {n}")
    return t


def restrict_expr(e: Expr, t: Target, rules: str = "full") -> MultiPoly | Undetermined:
    """Restriction of e to t.  With ``rules="tabulated"`` transfer products
    restricted to AV atoms are reported as undetermined, matching the cases
    left open by the detection table; ``"full"`` uses the double coset
    formula."""
    if rules == "tabulated" and any(a.kind == "A" for a in t) and _has_odot(e):
        return Undetermined("transfer product restricted to an AV target")
    return MultiPoly.from_encoded(image(e, t), variable_names(t))


def _has_odot(e: Expr) -> bool:
    if isinstance(e, Odot):
        return any(f.width > 0 for f in e.factors) and sum(1 for f in e.factors if f.width) > 1
    if isinstance(e, (Cup,)):
        return any(_has_odot(f) for f in e.factors)
    if isinstance(e, Sum):
        return any(_has_odot(f) for f in e.terms)
    if isinstance(e, (Conj, Res, Tr)):
        return _has_odot(e.arg)
    return False


def target_family_kind(t: Target, n: int) -> str:
    if len(t) == 1 and t[0].kind == "V":
        return "V"
    if len(t) == 1 and t[0].kind == "A":
        return "AV"
    return "AI"


@dataclass(frozen=True)
class DetectionReport:
    n: int
    degree: int
    basis_size: int
    block_ranks: dict
    family_ranks: dict
    combined_rank: int

    @property
    def injective(self) -> bool:
        return self.combined_rank == self.basis_size

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "degree": self.degree,
            "basis_size": self.basis_size,
            "block_ranks": self.block_ranks,
            "family_ranks": self.family_ranks,
            "combined_rank": self.combined_rank,
            "injective": self.injective,
        }


def detection_report(n: int, d: int) -> DetectionReport:
    from .alternating_hopf import basis_alt, monomial_expr

    basis = [monomial_expr(b) for b in basis_alt(n, d)]
    targets = family_alt(n)
    space = ImageSpace(targets)
    blocks = {}
    fams: dict[str, list[int]] = {}
    for ti, t in enumerate(targets):
        sb = SpanBuilder()
        for b in basis:
            sb.add(space.vector(b, [ti]))
        blocks[target_label(t)] = sb.rank
        fams.setdefault(target_family_kind(t, n), []).append(ti)
    fam_ranks = {}
    for k, idxs in fams.items():
        sb = SpanBuilder()
        for b in basis:
            sb.add(space.vector(b, idxs))
        fam_ranks[k] = sb.rank
    sb = SpanBuilder()
    for b in basis:
        sb.add(space.vector(b))
    return DetectionReport(n, d, len(basis), blocks, fam_ranks, sb.rank)


@dataclass(frozen=True)
class RelationReport:
    width: int
    degree: int
    checks: tuple  # (label, passed)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checks)

    @property
    def failures(self) -> list[str]:
        return [lab for lab, ok in self.checks if not ok]


def product_targets(n: int) -> list[Target]:
    """Targets E_1 x E_2 for every split n = i + j with i, j > 0; agreement
    on these is agreement of the coproduct components."""
    out = []
    for i in range(2, n - 1, 2):
        for t1 in family_alt(i):
            for t2 in family_alt(n - i):
                out.append(concat_targets(t1, t2))
    return out


def verify_relation(lhs: Expr, rhs: Expr, coproducts: bool = True) -> RelationReport:
    """Compare restrictions on all detection targets and, optionally, on the
    product targets that detect the coproduct."""
    if (lhs.width, lhs.degree) != (rhs.width, rhs.degree):
        raise ValueError("both sides must share width and degree")
    targets = list(family_alt(lhs.width))
    labels = [target_label(t) for t in targets]
    if coproducts and lhs.width > 2:
        pts = product_targets(lhs.width)
        targets += pts
        labels += ["D:" + target_label(t) for t in pts]
    checks = tuple((lab, image(lhs, t) == image(rhs, t)) for lab, t in zip(labels, targets))
    return RelationReport(lhs.width, lhs.degree, checks)
