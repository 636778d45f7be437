"""Instances of the alternating Hopf ring relations on components of width <= 8.

Each entry is (label, lhs, rhs) with both sides as expressions; the checks
compare them by restriction, never through the normal form."""

from __future__ import annotations

from itertools import combinations_with_replacement

from altcohom.f2_core import binom_mod2
from altcohom.symbols import MINUS, PLUS, Charged, Neutral, SignUnit, Unit, add, conj, cup, gen, odot, power, zero

MAX_WIDTH = 8


def gp(ell: int, m: int):
    return gen(Charged(ell, m, PLUS))


def gm(ell: int, m: int):
    return conj(gen(Charged(ell, m, PLUS)))


def neutral_monomials(m: int, max_degree: int):
    """Cup monomials in gamma_{1,k;m} (2 <= k <= m), including 1_m."""
    out = [gen(Unit(m))]
    ks = list(range(2, m + 1))
    for r in range(1, max_degree // 2 + 1):
        for combo in combinations_with_replacement(ks, r):
            if sum(combo) <= max_degree:
                out.append(cup(*(gen(Neutral(k, m)) for k in combo)))
    return out


def charged_pairs():
    out = []
    for ell in range(2, 4):
        for m in range(1, MAX_WIDTH // 2**ell + 1):
            out.append((ell, m))
    return out


def relation_instances(max_neutral_degree: int = 4) -> list[tuple[str, object, object]]:
    inst: list[tuple[str, object, object]] = []

    # charged-transfer: gamma+ ⊙ gamma+ = binom(m+n, n) gamma+
    for ell, a in charged_pairs():
        for ell2, b in charged_pairs():
            if ell2 != ell or b < a or (a + b) * 2**ell > MAX_WIDTH:
                continue
            lhs = odot(gp(ell, a), gp(ell, b))
            rhs = gp(ell, a + b) if binom_mod2(a + b, b) else zero(lhs.width, lhs.degree)
            inst.append((f"charged-transfer: g+({ell},{a}) o g+({ell},{b})", lhs, rhs))

    # sign-units: 1- ⊙ 1- = 1+, tested against charged classes
    for ell, m in charged_pairs():
        x = gp(ell, m)
        inst.append((f"sign-units: 1- o 1- o g+({ell},{m})", odot(gen(SignUnit(MINUS)), gen(SignUnit(MINUS)), x), x))

    # neutral-sign: (1+ + 1-) ⊙ neutral = 0
    for m in range(1, MAX_WIDTH // 2 + 1):
        for y in neutral_monomials(m, max_neutral_degree):
            lhs = odot(add(gen(SignUnit(PLUS)), gen(SignUnit(MINUS))), y)
            inst.append((f"neutral-sign: (1+ + 1-) o {y}", lhs, zero(y.width, y.degree)))

    # neutral-transfer: neutral ⊙ neutral = 0
    for m in range(1, MAX_WIDTH // 2):
        for n in range(m, MAX_WIDTH // 2 - m + 1):
            for y in neutral_monomials(m, max_neutral_degree):
                for z in neutral_monomials(n, max_neutral_degree - y.degree):
                    lhs = odot(y, z)
                    inst.append((f"neutral-transfer: {y} o {z}", lhs, zero(lhs.width, lhs.degree)))

    # mixed-cup: gamma+_{l,m} * gamma-_{k,n} = 0 unless k = l = 2
    for ell, m in charged_pairs():
        for k, n in charged_pairs():
            if m * 2**ell != n * 2**k or (ell == 2 and k == 2):
                continue
            lhs = cup(gp(ell, m), gm(k, n))
            inst.append((f"mixed-cup: g+({ell},{m}) * g-({k},{n})", lhs, zero(lhs.width, lhs.degree)))

    # gamma2-cup: gamma+_{2,m} * gamma-_{2,m}
    for m in range(1, MAX_WIDTH // 4 + 1):
        lhs = cup(gp(2, m), gm(2, m))
        corr = power(gen(Neutral(2, 2)), 3)
        if m > 1:
            corr = odot(power(gp(2, m - 1), 2), corr)
        rhs = add(power(add(gp(2, m), gm(2, m)), 2), corr) if m % 2 else corr
        inst.append((f"gamma2-cup: g+(2,{m}) * g-(2,{m})", lhs, rhs))

    # charged-neutral-cup: gamma+_{l,m} * gamma_{1,k;m 2^(l-1)}
    for ell, m in charged_pairs():
        half = m * 2 ** (ell - 1)
        for k in range(2, half + 1):
            lhs = cup(gp(ell, m), gen(Neutral(k, half)))
            unit = 2 ** (ell - 1)
            if k % unit:
                rhs = zero(lhs.width, lhs.degree)
            else:
                q = k // unit
                core = cup(gp(ell, q), gen(Neutral(k, k)))
                rhs = core if q == m else odot(core, gp(ell, m - q))
            inst.append((f"charged-neutral-cup: g+({ell},{m}) * s({k};{half})", lhs, rhs))
    return inst


def coproduct_instances() -> list[tuple[str, object]]:
    """Classes whose coproducts exercise polarized distributivity, the generator coproducts and conjugation."""
    out = []
    # charged-coproduct: charged generators
    for ell, m in charged_pairs():
        out.append((f"charged-coproduct: g+({ell},{m})", gp(ell, m)))
    # neutral-coproduct: neutral generators and units
    for m in range(2, MAX_WIDTH // 2 + 1):
        for k in range(2, m + 1):
            out.append((f"neutral-coproduct: s({k};{m})", gen(Neutral(k, m))))
        out.append((f"neutral-coproduct: 1({m})", gen(Unit(m))))
    # polarized-coproduct: transfer products with a charged factor
    out += [
        ("polarized-coproduct: g+(2,1) o 1(2)", odot(gp(2, 1), gen(Unit(2)))),
        ("polarized-coproduct: g+(2,1) o s(2;2)", odot(gp(2, 1), gen(Neutral(2, 2)))),
        ("polarized-coproduct: g-(2,1) o 1(1)", odot(gm(2, 1), gen(Unit(1)))),
        ("polarized-coproduct: g+(2,1)^2 o s(2;2)^3", odot(power(gp(2, 1), 2), power(gen(Neutral(2, 2)), 3))),
        ("polarized-coproduct: (g+(2,1) * s(2;2)) o g+(2,1)", odot(cup(gp(2, 1), gen(Neutral(2, 2))), gp(2, 1))),
    ]
    # conjugate-coproduct: conjugates
    out += [
        ("conjugate-coproduct: conj(g+(2,2))", gm(2, 2)),
        ("conjugate-coproduct: conj(g+(2,1) o s(2;2))", conj(odot(gp(2, 1), gen(Neutral(2, 2))))),
        ("conjugate-coproduct: conj(g+(3,1) * s(4;4))", conj(cup(gp(3, 1), gen(Neutral(4, 4))))),
    ]
    return out


def false_relation():
    """gamma+ gamma- on A_4 with the (gamma_{1,2;2})^3 correction dropped."""
    lhs = cup(gp(2, 1), gm(2, 1))
    rhs = add(power(gp(2, 1), 2), power(gm(2, 1), 2))
    return lhs, rhs
