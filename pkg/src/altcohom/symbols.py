"""Symbolic generators and expression trees shared by the symmetric and the
alternating Hopf ring layers.

Widths are numbers of points: a class of width n lives in H*(BS_n) or
H*(BA_n).  Charges are bits (0 = ``+``, 1 = ``-``).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

PLUS, MINUS = 0, 1


# ---------------------------------------------------------------------------
# Generators


@dataclass(frozen=True, order=True)
class Charged:
    """gamma^(+/-)_{ell,m} on A_{m 2^ell}; only the width-4 local normal form
    ever stores a negative charge inside a cup monomial."""

    ell: int
    m: int
    charge: int = PLUS

    def __post_init__(self) -> None:
        if self.ell < 2 or self.m < 1:
            raise ValueError("charged generators need ell >= 2 and m >= 1")

    @property
    def width(self) -> int:
        return self.m * 2**self.ell

    @property
    def degree(self) -> int:
        return self.m * (2**self.ell - 1)

    def conj(self) -> "Charged":
        return Charged(self.ell, self.m, self.charge ^ 1)

    def __str__(self) -> str:
        return f"g{'+-'[self.charge]}({self.ell},{self.m})"


@dataclass(frozen=True, order=True)
class Neutral:
    """gamma_{1,k;m} on A_{2m}, the restriction of gamma_{1,k} ⊙ 1_{m-k}."""

    k: int
    m: int

    def __post_init__(self) -> None:
        if not (2 <= self.k <= self.m):
            raise ValueError("neutral generators need 2 <= k <= m")

    @property
    def width(self) -> int:
        return 2 * self.m

    @property
    def degree(self) -> int:
        return self.k

    def __str__(self) -> str:
        return f"s({self.k};{self.m})"


@dataclass(frozen=True, order=True)
class Unit:
    """The cup unit 1_m of A_{2m}."""

    m: int

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("units need m >= 1; use SignUnit on the empty component")

    @property
    def width(self) -> int:
        return 2 * self.m

    degree = 0

    def __str__(self) -> str:
        return f"1({self.m})"


@dataclass(frozen=True, order=True)
class SignUnit:
    """1^+ or 1^- on the formal component A_0'."""

    charge: int

    width = 0
    degree = 0

    def __str__(self) -> str:
        return "1" + "+-"[self.charge]


@dataclass(frozen=True, order=True)
class SymGen:
    """gamma_{ell,m} in H^{m(2^ell - 1)}(BS_{m 2^ell}); ell = 0 is the unit."""

    ell: int
    m: int

    def __post_init__(self) -> None:
        if self.ell < 0 or self.m < 1:
            raise ValueError("symmetric generators need ell >= 0 and m >= 1")

    @property
    def width(self) -> int:
        return self.m * 2**self.ell

    @property
    def degree(self) -> int:
        return self.m * (2**self.ell - 1)

    def __str__(self) -> str:
        return f"c({self.ell},{self.m})"


AltGenerator = Union[Charged, Neutral, Unit, SignUnit]
Generator = Union[Charged, Neutral, Unit, SignUnit, SymGen]


# ---------------------------------------------------------------------------
# Expressions


@dataclass(frozen=True)
class Expr:
    width: int
    degree: int


@dataclass(frozen=True)
class Gen(Expr):
    g: Generator

    def __str__(self) -> str:
        return str(self.g)


@dataclass(frozen=True)
class Zero(Expr):
    def __str__(self) -> str:
        return "0"


@dataclass(frozen=True)
class Cup(Expr):
    factors: tuple

    def __str__(self) -> str:
        return "*".join(_paren(f) for f in self.factors)


@dataclass(frozen=True)
class Odot(Expr):
    factors: tuple

    def __str__(self) -> str:
        return " o ".join(_paren(f) for f in self.factors)


@dataclass(frozen=True)
class Sum(Expr):
    terms: tuple

    def __str__(self) -> str:
        return " + ".join(str(t) for t in self.terms)


@dataclass(frozen=True)
class Conj(Expr):
    arg: Expr

    def __str__(self) -> str:
        return f"conj({self.arg})"


@dataclass(frozen=True)
class Res(Expr):
    """Restriction of a symmetric expression to the alternating group."""

    arg: Expr

    def __str__(self) -> str:
        return f"res({self.arg})"


@dataclass(frozen=True)
class Tr(Expr):
    """Transfer of an alternating expression to the symmetric group."""

    arg: Expr

    def __str__(self) -> str:
        return f"tr({self.arg})"


def res(e: Expr) -> Expr:
    return e if isinstance(e, Zero) else Res(e.width, e.degree, e)


def tr(e: Expr) -> Expr:
    return e if isinstance(e, Zero) else Tr(e.width, e.degree, e)


def _paren(e: Expr) -> str:
    return f"({e})" if isinstance(e, (Sum, Odot)) else str(e)


def gen(g: Generator) -> Gen:
    return Gen(g.width, g.degree, g)


def zero(width: int, degree: int) -> Zero:
    return Zero(width, degree)


def cup(*fs: Expr) -> Expr:
    """Cup product; factors on different widths multiply to zero."""
    flat: list[Expr] = []
    for f in fs:
        flat.extend(f.factors if isinstance(f, Cup) else (f,))
    if not flat:
        raise ValueError("empty cup product")
    deg = sum(f.degree for f in flat)
    widths = {f.width for f in flat}
    if len(widths) > 1:
        return Zero(max(widths), deg)
    if any(isinstance(f, Zero) for f in flat):
        return Zero(flat[0].width, deg)
    if len(flat) == 1:
        return flat[0]
    return Cup(flat[0].width, deg, tuple(flat))


def odot(*fs: Expr) -> Expr:
    flat: list[Expr] = []
    for f in fs:
        flat.extend(f.factors if isinstance(f, Odot) else (f,))
    if not flat:
        raise ValueError("empty transfer product")
    w = sum(f.width for f in flat)
    deg = sum(f.degree for f in flat)
    if any(isinstance(f, Zero) for f in flat):
        return Zero(w, deg)
    if len(flat) == 1:
        return flat[0]
    return Odot(w, deg, tuple(flat))


def add(*ts: Expr) -> Expr:
    flat: list[Expr] = []
    for t in ts:
        if isinstance(t, Sum):
            flat.extend(t.terms)
        elif not isinstance(t, Zero):
            flat.append(t)
    if not ts:
        raise ValueError("empty sum")
    if not flat:
        return Zero(ts[0].width, ts[0].degree)
    if len({(t.width, t.degree) for t in flat}) > 1:
        raise ValueError("summands must share width and degree")
    if len(flat) == 1:
        return flat[0]
    return Sum(flat[0].width, flat[0].degree, tuple(flat))


def conj(e: Expr) -> Expr:
    if isinstance(e, Conj):
        return e.arg
    if isinstance(e, Zero):
        return e
    return Conj(e.width, e.degree, e)


def power(e: Expr, k: int) -> Expr:
    if k < 1:
        raise ValueError("use positive powers; the unit depends on the width")
    return cup(*([e] * k))


def generators_in(e: Expr) -> Iterable[Generator]:
    if isinstance(e, Gen):
        yield e.g
    elif isinstance(e, (Cup, Odot)):
        for f in e.factors:
            yield from generators_in(f)
    elif isinstance(e, Sum):
        for t in e.terms:
            yield from generators_in(t)
    elif isinstance(e, (Conj, Res, Tr)):
        yield from generators_in(e.arg)


# ---------------------------------------------------------------------------
# Expression grammar


class ExprParseError(ValueError):
    def __init__(self, msg: str, pos: int) -> None:
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<gpm>g(?P<sign>[+\-])\((?P<l>\d+),(?P<m>\d+)\))"
    r"|(?P<s>s\((?P<k>\d+);(?P<sm>\d+)\))"
    r"|(?P<c>c\((?P<cl>\d+),(?P<cm>\d+)\))"
    r"|(?P<unit>1\((?P<um>\d+)\))"
    r"|(?P<sunit>1(?P<us>[+\-]))"
    r"|(?P<conj>conj)"
    r"|(?P<op>[*o+^()])"
    r"|(?P<num>\d+)"
    r")"
)


def parse_expr(text: str, symmetric: bool = False) -> Expr:
    """Parse the expression grammar.

    Alternating: ``g+(l,m)``, ``g-(l,m)``, ``s(k;m)``, ``1(m)``, ``1+``,
    ``1-``.  Symmetric: ``c(l,m)`` for gamma_{l,m}.  Operators: ``*`` cup,
    ``o`` transfer product, ``+`` sum, ``^k`` cup power, ``conj(...)``.
    Binding: ``^`` over ``*`` over ``o`` over ``+``."""
    toks: list[tuple[str, object, int]] = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ExprParseError("unexpected character", pos)
        start = m.start() + (len(m.group(0)) - len(m.group(0).lstrip()))
        try:
            if m.group("gpm"):
                if symmetric:
                    raise ExprParseError("charged generator in a symmetric expression", start)
                ch = PLUS if m.group("sign") == "+" else MINUS
                g = Charged(int(m.group("l")), int(m.group("m")), PLUS)
                e: Expr = gen(g)
                toks.append(("atom", conj(e) if ch else e, start))
            elif m.group("s"):
                k, mm = int(m.group("k")), int(m.group("sm"))
                if k == 0:
                    toks.append(("atom", gen(Unit(mm)), start))
                elif k == 1:
                    toks.append(("atom", zero(2 * mm, 1), start))
                else:
                    toks.append(("atom", gen(Neutral(k, mm)), start))
            elif m.group("c"):
                if not symmetric:
                    raise ExprParseError("symmetric generator in an alternating expression", start)
                toks.append(("atom", gen(SymGen(int(m.group("cl")), int(m.group("cm")))), start))
            elif m.group("unit"):
                um = int(m.group("um"))
                if symmetric:
                    toks.append(("atom", gen(SymGen(0, um)), start))
                else:
                    toks.append(("atom", gen(Unit(um)), start))
            elif m.group("sunit"):
                toks.append(("atom", gen(SignUnit(PLUS if m.group("us") == "+" else MINUS)), start))
            elif m.group("conj"):
                toks.append(("conj", None, start))
            elif m.group("op"):
                toks.append(("op", m.group("op"), start))
            else:
                toks.append(("num", int(m.group("num")), start))
        except ValueError as exc:
            if isinstance(exc, ExprParseError):
                raise
            raise ExprParseError(str(exc), start) from exc
        pos = m.end()
    toks.append(("end", None, len(text)))
    p = _Parser(toks)
    out = p.sum()
    if p.peek()[0] != "end":
        raise ExprParseError("trailing input", p.peek()[2])
    return out


class _Parser:
    def __init__(self, toks: list) -> None:
        self.toks = toks
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, op: str) -> None:
        t = self.take()
        if t[0] != "op" or t[1] != op:
            raise ExprParseError(f"expected {op!r}", t[2])

    def sum(self) -> Expr:
        terms = [self.odot()]
        while self.peek()[:2] == ("op", "+"):
            pos = self.take()[2]
            t = self.odot()
            if (t.width, t.degree) != (terms[0].width, terms[0].degree):
                raise ExprParseError("summands differ in width or degree", pos)
            terms.append(t)
        return add(*terms)

    def odot(self) -> Expr:
        fs = [self.cup()]
        while self.peek()[:2] == ("op", "o"):
            self.take()
            fs.append(self.cup())
        return odot(*fs)

    def cup(self) -> Expr:
        fs = [self.pow()]
        while self.peek()[:2] == ("op", "*"):
            self.take()
            fs.append(self.pow())
        return cup(*fs)

    def pow(self) -> Expr:
        base = self.atom()
        while self.peek()[:2] == ("op", "^"):
            self.take()
            t = self.take()
            if t[0] != "num" or t[1] < 1:
                raise ExprParseError("expected a positive exponent", t[2])
            base = power(base, t[1])
        return base

    def atom(self) -> Expr:
        t = self.take()
        if t[0] == "atom":
            return t[1]
        if t[0] == "conj":
            self.expect("(")
            inner = self.sum()
            self.expect(")")
            return conj(inner)
        if t[:2] == ("op", "("):
            inner = self.sum()
            self.expect(")")
            return inner
        raise ExprParseError("expected a generator or '('", t[2])
