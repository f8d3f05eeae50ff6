"""JSON curve documents: parsing with field diagnostics and canonical output.

A document looks like::

    {"rank": 2,
     "vertices": [{"id": "V", "genus": 0}],
     "edges": [{"id": "X1", "tail": "V", "head": null, "weight": 1, "direction": [-1, 0]}, ...],
     "markings": [{"index": 1, "edge": "X1",
                   "constraint": {"span": [[1, 0]], "translation": ["1/2", 0], "weight": 1},
                   "psi": 1}, ...]}

Integers may be given as JSON numbers or decimal strings, rationals as
``"p/q"`` strings.  On output, integers beyond 64 bits become strings.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .constraints import AffineConstraint
from .errors import MalformedInput, TropMultError
from .fixtures import Problem
from .lattice_core import Sublattice, saturate
from .tropical_curve import Edge, TropicalCurve, Vertex

INT64 = 2 ** 63


def _int(value: Any, where: str) -> int:
    if isinstance(value, bool):
        raise MalformedInput(f"{where}: expected an integer, got a boolean")
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        try:
            return int(value.strip())
        except ValueError:
            pass
    raise MalformedInput(f"{where}: expected an integer, got {value!r}")


def _rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise MalformedInput(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            pass
    raise MalformedInput(f"{where}: expected a rational such as 3 or \"-1/2\", got {value!r}")


def _vector(value: Any, where: str, length: int | None = None) -> tuple[int, ...]:
    if not isinstance(value, list):
        raise MalformedInput(f"{where}: expected a list of integers")
    out = tuple(_int(x, f"{where}[{k}]") for k, x in enumerate(value))
    if length is not None and len(out) != length:
        raise MalformedInput(f"{where}: expected {length} entries, got {len(out)}")
    return out


def _object(value: Any, where: str, required: tuple[str, ...], optional: tuple[str, ...] = ()) -> dict:
    if not isinstance(value, dict):
        raise MalformedInput(f"{where}: expected an object")
    missing = [k for k in required if k not in value]
    if missing:
        raise MalformedInput(f"{where}: missing field {missing[0]!r}")
    extra = sorted(set(value) - set(required) - set(optional))
    if extra:
        raise MalformedInput(f"{where}: unknown field {extra[0]!r}")
    return value


def _list(value: Any, where: str) -> list:
    if not isinstance(value, list):
        raise MalformedInput(f"{where}: expected a list")
    return value


def loads(text: str, name: str = "<document>") -> Problem:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"{name}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return from_json(raw, name)


def from_json(raw: Any, name: str = "<document>") -> Problem:
    doc = _object(raw, name, ("rank", "vertices", "edges"), ("markings", "name"))
    rank = _int(doc["rank"], f"{name}.rank")
    if rank < 1:
        raise MalformedInput(f"{name}.rank: must be positive")
    try:
        return _build(doc, rank, name)
    except MalformedInput:
        raise
    except TropMultError as exc:
        raise MalformedInput(f"{name}: {exc}") from None


def _build(doc: dict, rank: int, name: str) -> Problem:
    vertices = []
    for k, v in enumerate(_list(doc["vertices"], f"{name}.vertices")):
        where = f"{name}.vertices[{k}]"
        v = _object(v, where, ("id",), ("genus",))
        vertices.append(Vertex(str(v["id"]), _int(v.get("genus", 0), f"{where}.genus")))
    edges = []
    for k, e in enumerate(_list(doc["edges"], f"{name}.edges")):
        where = f"{name}.edges[{k}]"
        e = _object(e, where, ("id", "tail", "head", "weight", "direction"))
        head = None if e["head"] is None else str(e["head"])
        edges.append(Edge(str(e["id"]), str(e["tail"]), head, _int(e["weight"], f"{where}.weight"),
                          _vector(e["direction"], f"{where}.direction", rank)))
    markings = []
    constraints: dict[int, AffineConstraint] = {}
    psi: dict[int, int] = {}
    for k, m in enumerate(_list(doc.get("markings", []), f"{name}.markings")):
        where = f"{name}.markings[{k}]"
        m = _object(m, where, ("index", "edge"), ("constraint", "psi"))
        i = _int(m["index"], f"{where}.index")
        markings.append((i, str(m["edge"])))
        if m.get("constraint") is not None:
            constraints[i] = _constraint(m["constraint"], f"{where}.constraint", rank)
        if m.get("psi") is not None:
            psi[i] = _int(m["psi"], f"{where}.psi")
    indices = [i for i, _ in markings]
    if len(set(indices)) != len(indices):
        raise MalformedInput(f"{name}.markings: duplicate marking index")
    curve = TropicalCurve(rank, tuple(vertices), tuple(edges), tuple(markings))
    return Problem(curve, constraints, psi, str(doc.get("name", "")))


def _constraint(raw: Any, where: str, rank: int) -> AffineConstraint:
    c = _object(raw, where, ("span",), ("translation", "weight"))
    gens = tuple(_vector(v, f"{where}.span[{k}]", rank) for k, v in enumerate(_list(c["span"], f"{where}.span")))
    span = saturate(Sublattice(rank, gens))
    translation = None
    if c.get("translation") is not None:
        t = _list(c["translation"], f"{where}.translation")
        if len(t) != rank:
            raise MalformedInput(f"{where}.translation: expected {rank} entries, got {len(t)}")
        translation = tuple(_rational(x, f"{where}.translation[{k}]") for k, x in enumerate(t))
    weight = _int(c.get("weight", 1), f"{where}.weight")
    if weight < 1:
        raise MalformedInput(f"{where}.weight: must be positive")
    return AffineConstraint(span, translation, weight)


# ---------------------------------------------------------------------------
# output


def encode_int(n: int) -> int | str:
    return n if -INT64 <= n < INT64 else str(n)


def encode_rational(q: Fraction) -> int | str:
    return encode_int(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _is_trivial(a: AffineConstraint) -> bool:
    return a.codim == 0 and a.weight == 1 and a.translation is None


def to_json(problem: Problem) -> dict:
    c = problem.curve
    markings = []
    for i, eid in c.markings:
        entry: dict[str, Any] = {"index": encode_int(i), "edge": eid}
        a = problem.constraints.get(i)
        if a is not None and not _is_trivial(a):
            con: dict[str, Any] = {"span": [[encode_int(x) for x in row] for row in saturate(a.span).generators]}
            if a.translation is not None:
                con["translation"] = [encode_rational(x) for x in a.translation]
            con["weight"] = encode_int(a.weight)
            entry["constraint"] = con
        if i in problem.psi:
            entry["psi"] = encode_int(problem.psi[i])
        markings.append(entry)
    doc: dict[str, Any] = {}
    if problem.name:
        doc["name"] = problem.name
    doc["rank"] = c.rank
    doc["vertices"] = [{"id": v.id, "genus": v.genus} for v in c.vertices]
    doc["edges"] = [
        {"id": e.id, "tail": e.tail, "head": e.head, "weight": encode_int(e.weight),
         "direction": [encode_int(x) for x in e.direction]}
        for e in c.edges
    ]
    doc["markings"] = markings
    return doc


def dumps(problem: Problem) -> str:
    """Canonical text: fixed key order, two-space indent, trailing newline."""
    return json.dumps(to_json(problem), indent=2, ensure_ascii=False) + "\n"
