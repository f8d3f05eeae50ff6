import json
from fractions import Fraction

import pytest

from corpus import random_thetas, random_trees
from tropmult import fixtures
from tropmult.constraints import AffineConstraint
from tropmult.document import dumps, encode_int, encode_rational, from_json, loads, to_json
from tropmult.errors import MalformedInput
from tropmult.mult_index import mult

MINIMAL = {
    "rank": 2,
    "vertices": [{"id": "V"}],
    "edges": [
        {"id": "X1", "tail": "V", "head": None, "weight": 1, "direction": [-1, 0]},
        {"id": "X2", "tail": "V", "head": None, "weight": 1, "direction": [0, -1]},
        {"id": "X3", "tail": "V", "head": None, "weight": 1, "direction": [1, 1]},
    ],
    "markings": [{"index": 1, "edge": "X1"}, {"index": 2, "edge": "X2"}, {"index": 3, "edge": "X3"}],
}


def all_problems():
    return fixtures.standard_corpus() + list(random_trees(10)) + [t.problem for t in random_thetas(3)]


def test_round_trip_is_canonical():
    for p in all_problems():
        text = dumps(p)
        again = loads(text)
        assert dumps(again) == text
        assert mult(*again.args) == mult(*p.args)
        assert text.endswith("\n")


def test_key_order():
    doc = to_json(fixtures.genus1(1, 1, 1, 2, 1, 3))
    assert list(doc) == ["name", "rank", "vertices", "edges", "markings"]
    marking = doc["markings"][3]
    assert marking == {"index": 4, "edge": "C1", "constraint": {"span": [[1, 1]], "weight": 1}, "psi": 1}


def test_minimal_document():
    p = from_json(MINIMAL)
    assert p.curve.vertex_ids == ["V"] and p.constraints == {} and p.psi == {}
    assert to_json(p)["vertices"] == [{"id": "V", "genus": 0}]


def test_strings_rationals_and_saturation():
    doc = json.loads(json.dumps(MINIMAL))
    doc["markings"][0]["constraint"] = {"span": [["2", 0]], "translation": ["1/2", "-3"], "weight": "2"}
    p = from_json(doc)
    a = p.constraints[1]
    assert a.span.generators == ((1, 0),)
    assert a.translation == (Fraction(1, 2), Fraction(-3))
    assert a.weight == 2
    out = to_json(p)["markings"][0]["constraint"]
    assert out == {"span": [[1, 0]], "translation": ["1/2", -3], "weight": 2}


def test_big_integers_become_strings():
    assert encode_int(2 ** 63) == str(2 ** 63)
    assert encode_int(-2 ** 63) == -2 ** 63
    assert encode_rational(Fraction(2 ** 70, 3)) == f"{2 ** 70}/3"
    assert encode_rational(Fraction(-4, 2)) == -2


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.pop("rank"), "missing field 'rank'"),
    (lambda d: d["edges"][0].pop("tail"), "edges[0]: missing field 'tail'"),
    (lambda d: d["edges"][1].update(weight=True), "edges[1].weight: expected an integer"),
    (lambda d: d["edges"][2].update(direction=[1]), "edges[2].direction: expected 2 entries"),
    (lambda d: d["vertices"][0].update(colour="red"), "unknown field 'colour'"),
    (lambda d: d["markings"].append({"index": 1, "edge": "X1"}), "duplicate marking index"),
    (lambda d: d.update(rank=0), "rank: must be positive"),
    (lambda d: d["markings"][0].update(constraint={"span": [], "translation": ["x"]}), "expected 2 entries"),
    (lambda d: d["markings"][0].update(constraint={"span": [], "translation": ["x", 0]}), "translation[0]"),
    (lambda d: d["markings"][0].update(constraint={"span": [], "weight": 0}), "weight: must be positive"),
    (lambda d: d.update(edges="none"), "edges: expected a list"),
])
def test_field_diagnostics(mutate, fragment):
    doc = json.loads(json.dumps(MINIMAL))
    mutate(doc)
    with pytest.raises(MalformedInput) as exc:
        from_json(doc, "doc")
    assert fragment in str(exc.value)


def test_syntax_errors_report_position():
    with pytest.raises(MalformedInput) as exc:
        loads('{"rank": 2,\n  "vertices": [}', "bad.json")
    assert "bad.json: line 2 column" in str(exc.value)


def test_psi_survives_round_trip():
    p = fixtures.genus1(2, 1, 1, 2, 1, 3)
    q = loads(dumps(p))
    assert dict(q.psi) == dict(p.psi)
    assert q.constraints[4] == AffineConstraint.through((2, 1))
