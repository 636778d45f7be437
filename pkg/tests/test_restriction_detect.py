from __future__ import annotations

import functools

import pytest
from hypothesis import given, strategies as st

from altcohom.restriction_detect import (
    ONE,
    Undetermined,
    build_target,
    decode,
    detection_report,
    encode,
    family_alt,
    family_sym,
    image,
    parse_target,
    pmul,
    poly_sq,
    ppow,
    psum,
    restrict_expr,
    target_label,
    target_width,
    var,
    verify_relation,
)
from altcohom.symbols import Charged, SymGen, conj, cup, gen, parse_expr


def linear_forms(nvars):
    out = []
    for mask in range(1, 2**nvars):
        out.append(psum(var(i) for i in range(nvars) if (mask >> i) & 1))
    return out


def prod(polys):
    return functools.reduce(pmul, polys, ONE)


def total_square_oracle(j, p, nvars):
    """Expand prod (x_i + x_i^2)^{e_i} and keep the part of degree deg + j."""
    out = frozenset()
    for mono in p:
        exps = decode(mono, nvars)
        full = prod(ppow(psum([var(i), ppow(var(i), 2)]), e) for i, e in enumerate(exps) if e)
        keep = frozenset(m for m in full if sum(decode(m, nvars)) == sum(exps) + j)
        out = out ^ keep
    return out


monos = st.lists(st.lists(st.integers(0, 4), min_size=3, max_size=3), min_size=1, max_size=4)


@given(monos, st.integers(0, 8))
def test_poly_sq_matches_total_square(exps, j):
    d = sum(exps[0])
    p = frozenset(encode(e) for e in exps if sum(e) == d)
    assert poly_sq(j, p, 3) == total_square_oracle(j, p, 3)


@given(monos, monos, st.integers(0, 6))
def test_poly_sq_cartan(a, b, j):
    pa = frozenset(encode(e) for e in a if sum(e) == sum(a[0]))
    pb = frozenset(encode(e) for e in b if sum(e) == sum(b[0]))
    rhs = psum(pmul(poly_sq(i, pa, 3), poly_sq(j - i, pb, 3)) for i in range(j + 1))
    assert poly_sq(j, pmul(pa, pb), 3) == rhs


def test_symmetric_top_class_is_dickson_top():
    t = build_target([("S", 2)])
    assert image(gen(SymGen(2, 1)), t) == prod(linear_forms(2))
    t3 = build_target([("S", 3)])
    assert image(gen(SymGen(3, 1)), t3) == prod(linear_forms(3))
    assert image(gen(SymGen(1, 1)), build_target([("S", 1)])) == var(0)


def test_charged_classes_split_top_dickson():
    t = parse_target("V2", 4)
    plus = image(gen(Charged(2, 1)), t)
    minus = image(conj(gen(Charged(2, 1))), t)
    assert pmul(plus, minus) == prod(linear_forms(2)) or psum([plus, minus]) == prod(linear_forms(2))


def test_family_alt_shapes():
    assert [target_label(t) for t in family_alt(4)] == ["V2", "AV2"]
    labels6 = [target_label(t) for t in family_alt(6)]
    assert "V2xptxpt" in labels6 and "AV3" in labels6
    for n in (4, 6, 8, 10, 12):
        assert all(target_width(t) == n for t in family_alt(n))
    for n in (2, 3, 5, 8):
        assert all(target_width(t) == n for t in family_sym(n))


def test_parse_target_errors():
    with pytest.raises(ValueError):
        parse_target("V3+", 4)
    with pytest.raises(ValueError):
        parse_target("W2", 4)
    assert target_label(parse_target("V2xAV2", 8)) == "V2xAV2"


@pytest.mark.parametrize("n,max_d", [(4, 9), (6, 8), (8, 8), (10, 6)])
def test_detection_is_injective(n, max_d):
    for d in range(max_d + 1):
        rep = detection_report(n, d)
        assert rep.injective, rep.as_dict()


def test_tabulated_rules_leave_av_products_open():
    e = parse_expr("g+(2,1) o 1(2)")
    t = parse_target("AV4", 8)
    assert isinstance(restrict_expr(e, t, rules="tabulated"), Undetermined)
    assert not isinstance(restrict_expr(e, t, rules="full"), Undetermined)
    assert not isinstance(restrict_expr(e, parse_target("V3+", 8), rules="tabulated"), Undetermined)


def test_verify_relation_detects_failures():
    g = gen(Charged(2, 1))
    rep = verify_relation(cup(g, conj(g)), cup(conj(g), g))
    assert rep.passed
    bad = verify_relation(g, conj(g))
    assert not bad.passed and bad.failures


@pytest.mark.parametrize("n", [4, 8])
def test_conjugation_swaps_charges_on_images(n):
    m = n // 4
    g = gen(Charged(2, m))
    for t in family_alt(n):
        assert image(conj(conj(g)), t) == image(g, t)
