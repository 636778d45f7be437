from __future__ import annotations

import json
import os

import pytest

from altcohom import cache
from altcohom.alternating_hopf import normalize
from altcohom.presentation_cli import (
    EXIT_CAP,
    EXIT_OK,
    EXIT_PARSE,
    a8_match_generators,
    a8_named_classes,
    a8_steenrod_comparison,
    derive_presentation,
    run_cli,
)
from altcohom.restriction_detect import verify_relation
from altcohom.symbols import add, cup, odot, power


@pytest.fixture(scope="module")
def a8():
    return derive_presentation(8, 14)


def test_a4_presentation():
    rep = derive_presentation(4, 9)
    assert rep.generator_degrees() == [2, 3, 3]
    assert [r.degree for r in rep.relations] == [6]
    assert rep.complete


def test_a8_presentation_counts(a8):
    assert a8.generator_degrees() == [2, 3, 3, 4, 5, 6, 6, 7, 7]
    assert len(a8.relations) == 17
    assert sum(r.is_vanishing_product() for r in a8.relations) == 15
    assert a8.complete


def test_a8_generators_match_names(a8):
    names = a8_match_generators(a8)
    assert sorted(names.values()) == sorted(a8_named_classes())


def test_a8_long_relations():
    N = a8_named_classes()
    s2, s4, d3, d3s2 = N["s2"], N["s4"], N["d3"], N["d3os2"]
    lhs = cup(N["d6+"], N["d6-"])
    rhs = add(cup(d3, s4, d3s2), cup(s2, d3s2, d3s2), cup(s2, s4, add(N["d6+"], N["d6-"])))
    assert verify_relation(lhs, rhs).passed
    hopf = odot(power(N["d3"].factors[0], 2), power(N["d3os2"].factors[1], 3))
    assert normalize(lhs) == normalize(hopf)


def test_a8_steenrod_table_partial_agreement():
    entries = a8_steenrod_comparison()
    assert len(entries) == 34
    disagree = {(e.name, e.j) for e in entries if not e.agrees}
    assert disagree == {
        ("s2", 1), ("s4", 3), ("d3", 1), ("d3os2", 3), ("d3os2", 4),
        ("d6+", 2), ("d6-", 2), ("d6+", 3), ("d6-", 3), ("d6+", 5), ("d6-", 5),
    }


def run_json(capsys, *argv):
    code = run_cli([*argv, "--json"])
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


def test_cli_cohomology_and_poincare(capsys):
    code, doc = run_json(capsys, "cohomology", "--group", "A", "--n", "4", "--degree", "3")
    assert code == EXIT_OK and doc["dim"] == 2
    code, doc = run_json(capsys, "poincare", "--group", "S", "--n", "4", "--max-degree", "5")
    assert doc["dims"] == [1, 1, 2, 3, 3, 4]


def test_cli_diff(capsys):
    code, doc = run_json(capsys, "diff", "--expr", "[1,0,1]^+")
    assert code == EXIT_OK
    assert doc["differential"] in ("[1,0,2]^o + [2,0,1]^o", "[2,0,1]^o + [1,0,2]^o")


def test_cli_product_coproduct_steenrod(capsys):
    code, doc = run_json(capsys, "product", "--kind", "odot", "--lhs", "g+(3,1)", "--rhs", "g+(3,1)")
    assert code == EXIT_OK and doc["terms"] == []
    code, doc = run_json(capsys, "coproduct", "--expr", "g+(2,2)", "--split", "4,4")
    assert code == EXIT_OK and len(doc["terms"]) == 2
    code, doc = run_json(capsys, "steenrod", "--sq", "3", "--expr", "g+(2,1)")
    assert code == EXIT_OK and doc["sq"] == 3 and doc["degree"] == 6


def test_cli_restrict_and_detect(capsys):
    code, doc = run_json(capsys, "restrict", "--expr", "g+(2,1) o 1(2)", "--target", "AV4", "--rules", "tabulated")
    assert code == EXIT_OK and doc["image"].startswith("Undetermined")
    code, doc = run_json(capsys, "detect", "--n", "8", "--degree", "5")
    assert doc["injective"]


def test_cli_present_and_cap(capsys):
    code, doc = run_json(capsys, "present", "--n", "4", "--max-degree", "6")
    assert code == EXIT_OK and [g["degree"] for g in doc["generators"]] == [2, 3, 3]
    assert run_cli(["present", "--n", "14", "--max-degree", "6"]) == EXIT_CAP
    assert run_cli(["present", "--n", "8", "--max-degree", "20"]) == EXIT_CAP


@pytest.mark.parametrize(
    "argv",
    [
        ["steenrod", "--sq", "1", "--expr", "g+(2,1) +"],
        ["diff", "--expr", "[1,0"],
        ["product", "--kind", "cup", "--lhs", "x", "--rhs", "g+(2,1)"],
    ],
)
def test_cli_parse_errors(argv, capsys):
    assert run_cli(argv) == EXIT_PARSE
    assert "error" in capsys.readouterr().err


def test_cli_split_error():
    with pytest.raises(SystemExit) as info:
        run_cli(["coproduct", "--expr", "g+(2,1)", "--split", "four"])
    assert info.value.code == 2


def test_cli_verify_paper(capsys):
    code, doc = run_json(capsys, "verify-paper")
    assert code == EXIT_OK and doc["passed"]


def test_cache_round_trip(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.ENV_VAR, str(tmp_path))
    key = ("poincare", "A", 8, 6)
    assert cache.cache_get(key) is None
    cache.cache_put(key, [1, 0, 1])
    assert cache.cache_get(key) == [1, 0, 1]
    files = os.listdir(tmp_path)
    assert files == [cache.key_digest(key) + ".json"]
    doc = json.loads((tmp_path / files[0]).read_text())
    assert doc["version"] == cache.SCHEMA_VERSION and doc["key"] == ["poincare", "A", 8, 6]


def test_cache_version_miss_and_corruption(tmp_path, monkeypatch, caplog):
    monkeypatch.setenv(cache.ENV_VAR, str(tmp_path))
    cache.cache_put(("k",), 1)
    assert cache.cache_get(("k",), version=cache.SCHEMA_VERSION + 1) is None
    path = tmp_path / (cache.key_digest(("k",)) + ".json")
    path.write_text("{not json")
    assert cache.cache_get(("k",)) is None
    assert "corrupt" in caplog.text


def test_cache_memory_fallback(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.ENV_VAR, str(tmp_path / "missing"))
    cache.cache_put(("mem", 1), {"a": 1})
    assert cache.cache_get(("mem", 1)) == {"a": 1}
    assert not (tmp_path / "missing").exists()


def test_cli_uses_cache(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cache.ENV_VAR, str(tmp_path))
    run_json(capsys, "poincare", "--group", "A", "--n", "4", "--max-degree", "4")
    assert len(os.listdir(tmp_path)) == 1
    code, doc = run_json(capsys, "poincare", "--group", "A", "--n", "4", "--max-degree", "4")
    assert doc["dims"] == [1, 0, 1, 2, 1]


@pytest.mark.parametrize("v,nbits", [(0, 1), (1, 64), (2**64 + 5, 70), (2**130 - 1, 130)])
def test_hex_bits_round_trip(v, nbits):
    text = cache.hex_bits(v, nbits)
    assert len(text) % 16 == 0
    assert cache.unhex_bits(text) == v
