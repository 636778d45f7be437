"""Component-ring presentations, the A_8 report, and the command-line surface.

Presentations are derived degree by degree.  Every monomial in the chosen
generators is evaluated through its restriction images (restriction is a
ring map and the detection family is injective), so products never need to
be normalized symbolically.  New generators are basis monomials outside the
decomposable span; relations are kernel vectors of the evaluation map not
already in the ideal generated by earlier relations, preferring single
vanishing monomials.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from typing import Callable, Sequence

from . import cache
from .alternating_hopf import (
    AltClass,
    AltHopfMonomial,
    basis_alt,
    conjugate,
    coproduct_alt,
    cup_product,
    gamma,
    neutral,
    normalize,
    odot_product,
    poincare_alt,
    unit,
)
from .f2_core import SpanBuilder
from .restriction_detect import (
    ImageSpace,
    ONE,
    family_alt,
    image,
    pmul,
    detection_report,
    parse_target,
    restrict_expr,
    target_label,
)
from .symbols import Expr, ExprParseError, add, cup, odot, parse_expr

EXIT_OK, EXIT_PARSE, EXIT_CAP, EXIT_FIXTURE = 0, 2, 3, 4


# ---------------------------------------------------------------------------
# Presentations


@dataclass
class Generator:
    degree: int
    cls: AltClass
    name: str


@dataclass
class Relation:
    degree: int
    terms: list[tuple[int, ...]]  # exponent vectors over the generator list

    def is_vanishing_product(self) -> bool:
        return len(self.terms) == 1


@dataclass
class PresentationReport:
    n: int
    max_degree: int
    generators: list[Generator]
    relations: list[Relation]
    poincare: list[int]
    complete: bool = True

    def generator_degrees(self) -> list[int]:
        return [g.degree for g in self.generators]

    def monomial_str(self, exps: Sequence[int]) -> str:
        parts = []
        for g, e in zip(self.generators, exps):
            if e:
                parts.append(g.name if e == 1 else f"({g.name})^{e}")
        return " * ".join(parts) or "1"

    def relation_str(self, r: Relation) -> str:
        if r.is_vanishing_product():
            return f"{self.monomial_str(r.terms[0])} = 0"
        return " + ".join(self.monomial_str(t) for t in r.terms) + " = 0"

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "max_degree": self.max_degree,
            "complete": self.complete,
            "poincare": self.poincare,
            "generators": [
                {"degree": g.degree, "name": g.name, "class": str(g.cls)} for g in self.generators
            ],
            "relations": [
                {
                    "degree": r.degree,
                    "text": self.relation_str(r),
                    "vanishing_product": r.is_vanishing_product(),
                }
                for r in self.relations
            ],
        }


def _generator_order(m: AltHopfMonomial) -> tuple:
    return (len(m.factors), str(m))


def _monomials(degrees: Sequence[int], total: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []

    def rec(i: int, left: int, acc: list[int]) -> None:
        if i == len(degrees):
            if left == 0:
                out.append(tuple(acc))
            return
        for e in range(left // degrees[i] + 1):
            acc.append(e)
            rec(i + 1, left - e * degrees[i], acc)
            acc.pop()

    rec(0, total, [])
    return out


class _Evaluator:
    """Images of generator monomials on the detection family, memoized."""

    def __init__(self, n: int) -> None:
        self.targets = family_alt(n)
        self.gens: list[tuple] = []
        self.cache: dict[tuple[int, ...], tuple] = {}
        self.spaces: dict[int, ImageSpace] = {}

    def add_generator(self, e: Expr) -> None:
        self.gens.append(tuple(image(e, t) for t in self.targets))

    def images(self, exps: tuple[int, ...]) -> tuple:
        exps = tuple(exps) + (0,) * (len(self.gens) - len(exps))
        hit = self.cache.get(exps)
        if hit is not None:
            return hit
        i = next((k for k, e in enumerate(exps) if e), None)
        if i is None:
            out = tuple(ONE for _ in self.targets)
        else:
            rest = list(exps)
            rest[i] -= 1
            prev = self.images(tuple(rest))
            out = tuple(pmul(a, b) for a, b in zip(prev, self.gens[i]))
        self.cache[exps] = out
        return out

    def vector(self, exps: tuple[int, ...], degree: int) -> int:
        space = self.spaces.setdefault(degree, ImageSpace(self.targets))
        return space.vector_from_polys(self.images(exps))


def derive_presentation(n: int, max_degree: int, order: Callable | None = None) -> PresentationReport:
    """Generators and a minimal set of relations for H^{<= max_degree}(BA_n)."""
    if n % 2 or n < 2:
        raise ValueError("n must be even and positive")
    order = order or _generator_order
    ev = _Evaluator(n)
    gens: list[Generator] = []
    rels: list[Relation] = []
    dims = poincare_alt(n, max_degree)
    complete = True
    for d in range(1, max_degree + 1):
        degs = [g.degree for g in gens]
        old = _monomials(degs, d) if gens else []
        dec = SpanBuilder()
        for mono in old:
            dec.add(ev.vector(mono, d))
        new_here = []
        for b in sorted(basis_alt(n, d), key=order):
            img = tuple(image(b.expr(), t) for t in ev.targets)
            vec = ev.spaces.setdefault(d, ImageSpace(ev.targets)).vector_from_polys(img)
            if dec.add(vec):
                new_here.append(b)
        for b in new_here:
            name = str(b)
            gens.append(Generator(d, normalize(b.expr()), name))
            ev.add_generator(b.expr())
        if dec.rank != dims[d]:
            complete = False
        # relations among all generators in degree d
        degs = [g.degree for g in gens]
        monos = _monomials(degs, d)
        index = {m: i for i, m in enumerate(monos)}
        ideal = SpanBuilder()
        for r in rels:
            for u in _monomials(degs, d - r.degree):
                mask = 0
                for t in r.terms:
                    t = tuple(t) + (0,) * (len(degs) - len(t))
                    prod = tuple(a + b for a, b in zip(u, t))
                    mask ^= 1 << index[prod]
                ideal.add(mask)
        # kernel of the evaluation map
        sb = SpanBuilder()
        kernel: list[int] = []
        for i, m in enumerate(monos):
            v = ev.vector(m, d)
            res, combo = sb.reduce(v)
            if res == 0:
                kernel.append(combo ^ (1 << i))
            sb.add(v)
        # combos index monomials in insertion order, which matches monos
        vanishing = [1 << i for i, m in enumerate(monos) if ev.vector(m, d) == 0]
        for vec in vanishing + kernel:
            if ideal.add(vec):
                terms = [monos[i] for i in range(len(monos)) if (vec >> i) & 1]
                rels.append(Relation(d, terms))
    return PresentationReport(n, max_degree, gens, rels, dims, complete)


# ---------------------------------------------------------------------------
# The A_8 report


def a8_named_classes() -> dict[str, Expr]:
    """The named generators of H*(BA_8): sigma_k = gamma_{1,k;4},
    d_3 = gamma_{2,1}^+ ⊙ 1_2, d_6 and d_7 the charged generators."""
    return {
        "s2": neutral(2, 4),
        "s3": neutral(3, 4),
        "s4": neutral(4, 4),
        "d3": odot(gamma(2, 1), unit(2)),
        "d3os2": odot(gamma(2, 1), neutral(2, 2)),
        "d6+": gamma(2, 2),
        "d6-": gamma(2, 2, 1),
        "d7+": gamma(3, 1),
        "d7-": gamma(3, 1, 1),
    }


def a8_published_table() -> dict[tuple[str, int], Expr]:
    """The published Sq table on the named generators, as expressions; entries
    left blank in the table (below the top square) are zero."""
    N = a8_named_classes()
    s2, s3, s4, d3, d3s2 = N["s2"], N["s3"], N["s4"], N["d3"], N["d3os2"]
    t: dict[tuple[str, int], Expr] = {
        ("s2", 1): d3,
        ("s3", 2): cup(s2, s3),
        ("d3", 1): cup(s2, s2),
        ("d3", 2): add(cup(s2, d3), d3s2),
        ("s4", 1): odot(neutral(2, 2), gamma(2, 1)),
        ("s4", 2): add(cup(s2, s4), N["d6+"], N["d6-"]),
        ("s4", 3): add(cup(s3, s4), N["d7+"], N["d7-"]),
        ("d3os2", 2): cup(s2, d3s2),
        ("d3os2", 3): cup(s2, add(N["d6+"], N["d6-"])),
        ("d3os2", 4): cup(s4, d3s2),
    }
    for sg in "+-":
        d6, d7 = N["d6" + sg], N["d7" + sg]
        t[("d6" + sg, 1)] = add(d7, cup(d3, s4), cup(s2, d3s2))
        t[("d6" + sg, 2)] = cup(s2, d6)
        t[("d6" + sg, 3)] = add(cup(s4, d3s2), cup(d3, d6))
        t[("d6" + sg, 4)] = add(cup(s4, d6), cup(d3s2, d3s2))
        t[("d6" + sg, 5)] = add(cup(d3s2, d6), cup(s4, d7))
        t[("d7" + sg, 4)] = cup(s4, d7)
        t[("d7" + sg, 6)] = cup(d6, d7)
    return t


@dataclass
class TableEntry:
    name: str
    j: int
    computed: AltClass
    published: AltClass

    @property
    def agrees(self) -> bool:
        return self.computed == self.published


def a8_steenrod_comparison() -> list[TableEntry]:
    """Sq^j on each named generator, 0 < j < degree, against the published table."""
    from .steenrod import sq

    N = a8_named_classes()
    pub = a8_published_table()
    out = []
    for name, e in N.items():
        for j in range(1, e.degree):
            p = pub.get((name, j))
            published = normalize(p) if p is not None else AltClass(8, e.degree + j)
            out.append(TableEntry(name, j, sq(j, e), published))
    return out


def a8_match_generators(report: PresentationReport) -> dict[str, str]:
    """Name-match chosen generators to the published names by degree and charge."""
    named = a8_named_classes()
    out: dict[str, str] = {}
    pool = {k: normalize(v) for k, v in named.items()}
    for g in report.generators:
        charged = conjugate(g.cls) != g.cls
        cands = [k for k, v in pool.items() if v.degree == g.degree and (k[-1] in "+-") == charged]
        hit = next((k for k in cands if pool[k] == g.cls), None)
        if hit is None and cands:
            hit = cands[0]
        if hit is not None:
            out[g.name] = hit
            pool.pop(hit)
    return out


# ---------------------------------------------------------------------------
# Command line


def _parse_split(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError("split must look like i,j") from exc
    return a, b


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _class_payload(c) -> dict:
    return {"width": c.width, "degree": c.degree, "terms": sorted(str(t) for t in c.terms), "text": str(c)}


def _cmd_cohomology(args) -> int:
    if args.group == "A":
        basis = basis_alt(args.n, args.degree)
        payload = {"group": "A", "n": args.n, "degree": args.degree, "dim": len(basis), "basis": [str(b) for b in basis]}
    else:
        from .symmetric_hopf import basis_sym

        basis = basis_sym(args.n, args.degree)
        payload = {"group": "S", "n": args.n, "degree": args.degree, "dim": len(basis), "basis": [str(b) for b in basis]}
    _emit(args, payload, f"dim H^{args.degree}(B{args.group}_{args.n}) = {payload['dim']}\n" + "\n".join(payload["basis"]))
    return EXIT_OK


def _cmd_poincare(args) -> int:
    key = ("poincare", args.group, args.n, args.max_degree)
    dims = cache.cache_get(key)
    if dims is None:
        if args.group == "A":
            dims = poincare_alt(args.n, args.max_degree)
        else:
            from .symmetric_hopf import poincare_sym

            dims = poincare_sym(args.n, args.max_degree)
        cache.cache_put(key, dims)
    _emit(args, {"group": args.group, "n": args.n, "dims": dims}, " ".join(map(str, dims)))
    return EXIT_OK


def _cmd_diff(args) -> int:
    from .fn_complex import differential_fna, format_cochain, parse_cochain

    x = parse_cochain(args.expr)
    dx = differential_fna(x)
    _emit(args, {"input": format_cochain(x), "differential": format_cochain(dx)}, format_cochain(dx))
    return EXIT_OK


def _cmd_product(args) -> int:
    lhs, rhs = parse_expr(args.lhs), parse_expr(args.rhs)
    res = cup_product(lhs, rhs) if args.kind == "cup" else odot_product(lhs, rhs)
    _emit(args, _class_payload(res), str(res))
    return EXIT_OK


def _cmd_coproduct(args) -> int:
    e = parse_expr(args.expr)
    t = coproduct_alt(e, args.split)
    pairs = sorted((str(a), str(b)) for a, b in t.terms)
    _emit(args, {"split": list(args.split), "terms": [list(p) for p in pairs]}, str(t))
    return EXIT_OK


def _cmd_steenrod(args) -> int:
    from .steenrod import sq

    e = parse_expr(args.expr)
    res = sq(args.sq, e)
    _emit(args, dict(_class_payload(res), sq=args.sq), str(res))
    return EXIT_OK


def _cmd_restrict(args) -> int:
    e = parse_expr(args.expr)
    t = parse_target(args.target, e.width)
    r = restrict_expr(e, t, rules=args.rules)
    text = repr(r) if not r and r.__class__.__name__ == "Undetermined" else str(r)
    _emit(args, {"target": target_label(t), "image": text}, text)
    return EXIT_OK


def _cmd_detect(args) -> int:
    rep = detection_report(args.n, args.degree)
    _emit(args, rep.as_dict(), json.dumps(rep.as_dict(), indent=2, sort_keys=True))
    return EXIT_OK


def _cmd_present(args) -> int:
    if args.n > 12 or args.max_degree > 16:
        print("resource cap: n <= 12 and max degree <= 16", file=sys.stderr)
        return EXIT_CAP
    rep = derive_presentation(args.n, args.max_degree)
    lines = [f"generators of H*(BA_{args.n}) through degree {args.max_degree}:"]
    lines += [f"  deg {g.degree}: {g.name}" for g in rep.generators]
    lines.append(f"relations ({len(rep.relations)}):")
    lines += [f"  deg {r.degree}: {rep.relation_str(r)}" for r in rep.relations]
    _emit(args, rep.as_dict(), "\n".join(lines))
    return EXIT_OK


def verify_paper_fixtures() -> list[tuple[str, bool]]:
    """A fast subset of the acceptance fixtures, for the CLI."""
    from .fn_complex import cohomology_dim
    from .steenrod import sq, sq_by_restriction

    out = []
    out.append(("A4 Poincare series", poincare_alt(4, 6) == [1, 0, 1, 2, 1, 2, 3]))
    out.append(("A8 FNA dims match basis", all(cohomology_dim(8, d) == len(basis_alt(8, d)) for d in range(7))))
    bp, bm = gamma(2, 1), gamma(2, 1, 1)
    rel = normalize(add(cup(bp, bm), cup(bp, bp), cup(bm, bm), cup(neutral(2, 2), neutral(2, 2), neutral(2, 2))))
    out.append(("first gamma_2 relation", not rel))
    out.append(("gamma_{3,1} o gamma_{3,1} = 0", not odot_product(gamma(3, 1), gamma(3, 1))))
    out.append(("detection injective on A8, d <= 6", all(detection_report(8, d).injective for d in range(7))))
    out.append(("Sq on A8 generators matches restriction", all(
        sq(j, e) == sq_by_restriction(j, e) for e in a8_named_classes().values() for j in range(e.degree + 1)
    )))
    rep = derive_presentation(4, 9)
    out.append(("A4 presentation", rep.generator_degrees() == [2, 3, 3] and [r.degree for r in rep.relations] == [6]))
    return out


def _cmd_verify(args) -> int:
    results = verify_paper_fixtures()
    ok = all(r for _, r in results)
    _emit(
        args,
        {"passed": ok, "fixtures": [{"name": n, "passed": r} for n, r in results]},
        "\n".join(f"{'PASS' if r else 'FAIL'}  {n}" for n, r in results),
    )
    return EXIT_OK if ok else EXIT_FIXTURE


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="altcohom", description="Mod-2 cohomology of symmetric and alternating groups.")
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name: str, func, help_: str) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=func)
        return sp

    sp = cmd("cohomology", _cmd_cohomology, "basis of one cohomology group")
    sp.add_argument("--group", choices=["A", "S"], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp = cmd("poincare", _cmd_poincare, "Betti numbers through a degree")
    sp.add_argument("--group", choices=["A", "S"], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--max-degree", type=int, required=True)
    sp = cmd("diff", _cmd_diff, "differential of a charged cochain")
    sp.add_argument("--expr", required=True)
    sp = cmd("product", _cmd_product, "cup or transfer product")
    sp.add_argument("--kind", choices=["cup", "odot"], required=True)
    sp.add_argument("--lhs", required=True)
    sp.add_argument("--rhs", required=True)
    sp = cmd("coproduct", _cmd_coproduct, "one coproduct component")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--split", type=_parse_split, required=True)
    sp = cmd("steenrod", _cmd_steenrod, "apply Sq^J")
    sp.add_argument("--sq", type=int, required=True)
    sp.add_argument("--expr", required=True)
    sp = cmd("restrict", _cmd_restrict, "restriction to a detection subgroup")
    sp.add_argument("--expr", required=True)
    sp.add_argument("--target", required=True)
    sp.add_argument("--rules", choices=["full", "tabulated"], default="full")
    sp = cmd("detect", _cmd_detect, "detection ranks in one degree")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--degree", type=int, required=True)
    sp = cmd("present", _cmd_present, "derive a ring presentation")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--max-degree", type=int, required=True)
    cmd("verify-paper", _cmd_verify, "run the fixture set")
    return p


def run_cli(argv: Sequence[str] | None = None) -> int:
    from .fn_complex import CochainParseError

    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ExprParseError, CochainParseError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
