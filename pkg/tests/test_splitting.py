import math
import random
from pathlib import Path

import pytest
from hypothesis import assume, given, strategies as st

from corpus import genus_zero_corpus, planar_curves, random_thetas, random_trees
from transforms import random_unimodular
from tropmult import fixtures
from tropmult.constraints import AffineConstraint, weight_product
from tropmult.document import loads
from tropmult.errors import PreconditionError
from tropmult.lattice_core import matmul, unimodular_completion
from tropmult.mult_index import dfrak, edge_weight_product, mult
from tropmult.splitting import (
    edge_mult,
    mult_split,
    point_split,
    split_cor,
    split_edge,
    splitting_sum,
    splitting_terms,
    vertex_mult,
)
from tropmult.tropical_curve import make_curve

WITNESS = Path(__file__).parent / "data" / "unsigned_split_witness.json"


def tripod_with_point():
    c = make_curve(2, ["V"], [
        ("X1", "V", None, 1, (-1, 0)), ("X2", "V", None, 1, (0, -1)), ("X3", "V", None, 1, (1, 1)),
        ("P", "V", None, 0, (0, 0)),
    ])
    return fixtures.Problem(c, {4: AffineConstraint.point(2)}, {}, "tripod+point")


def product_of_mults(pieces):
    out = 1
    for p in pieces:
        out *= mult(*p.args)
    return out


def random_basis(rng, u):
    """A unimodular basis ending in ``u``, scrambled in its first vectors."""
    b = unimodular_completion(u)
    r = len(u)
    if r == 1:
        return b
    g = random_unimodular(rng, r - 1)
    head = matmul(g, b[:-1])
    # shear the first vectors by multiples of u
    shears = [rng.randint(-2, 2) for _ in head]
    head = tuple(tuple(x + k * y for x, y in zip(row, u)) for row, k in zip(head, shears))
    return head + (b[-1] if rng.random() < 0.5 else tuple(-x for x in u),)


# --- cutting edges


def test_split_e2_gives_two_one_vertex_curves():
    s = split_edge(*fixtures.e2(3).args[:2], "E")
    assert not s.connected
    assert s.tail.curve.vertex_ids == ["V1"] and s.head.curve.vertex_ids == ["V2"]
    tail_end = s.tail.curve.marked_edge(s.tail_index)
    head_end = s.head.curve.marked_edge(s.head_index)
    assert tail_end.direction == (0, 1) and head_end.direction == (0, -1)
    assert tail_end.weight == head_end.weight == 3


def test_split_segment_gives_tripod_like_pieces():
    s = split_edge(*fixtures.e1().args[:2], "a")
    assert sorted(s.head.curve.vertex_ids) == ["V1"]
    assert len(s.head.curve.ends()) == 3
    assert sorted(s.tail.curve.vertex_ids) == ["V0", "V2"]


def test_split_genus_one_at_a_cycle_edge_stays_connected():
    s = split_edge(*fixtures.genus1(1, 1, 1, 2, 1, 3).args[:2], "E12")
    assert s.connected
    ids = {e.id for e in s.tail.curve.edges}
    assert "E12" not in ids and {"E12.t", "E12.h"} <= ids
    assert len(s.tail.curve.compact_edges()) == 2


def test_split_rejects_ends():
    with pytest.raises(PreconditionError):
        split_edge(*fixtures.e2(2).args[:2], "X1")


# --- the splitting formula


@pytest.mark.parametrize("w", [1, 2, 3, 4, 5])
def test_e2_splitting(w):
    p = fixtures.e2(w)
    terms = splitting_terms(*p.args[:2], "E")
    assert len(terms) == 2
    assert [v for _, _, v in terms].count(0) == 1
    assert sorted(v for _, _, v in terms) == [0, w]
    assert splitting_sum(*p.args[:2], "E") == w * w
    assert splitting_sum(*p.args[:2], "E", signed=True) == w * w


def test_e1_left_edge():
    assert splitting_sum(*fixtures.e1().args[:2], "a") == 1


def test_unsigned_sum_on_the_planar_corpus():
    for p in genus_zero_corpus() + list(planar_curves(5)):
        m = mult(*p.args)
        for e in p.curve.compact_edges():
            assert splitting_sum(*p.args[:2], e.id) == m, (p.name, e.id)


def test_signed_sum_is_the_oracle_for_any_basis():
    rng = random.Random(17)
    for p in random_trees(40):
        m = mult(*p.args)
        for e in p.curve.compact_edges():
            assert splitting_sum(*p.args[:2], e.id, signed=True) == m
            b = random_basis(rng, e.direction)
            assert splitting_sum(*p.args[:2], e.id, basis=b, signed=True) == m
            terms = splitting_terms(*p.args[:2], e.id, basis=b)
            if sum(1 for _, _, v in terms if v) <= 1:
                assert splitting_sum(*p.args[:2], e.id, basis=b) == m


def test_unsigned_sum_fails_on_pinned_rank_three_witness():
    p = loads(WITNESS.read_text(), WITNESS.name)
    assert mult(*p.args) == 90
    terms = splitting_terms(*p.args[:2], "E2")
    assert [(s, v) for _, s, v in terms if v] == [(1, 165), (-1, 120)]
    assert splitting_sum(*p.args[:2], "E2", signed=True) == 90
    assert splitting_sum(*p.args[:2], "E2") == 570


def test_bad_bases_are_rejected():
    p = fixtures.e2(2)
    with pytest.raises(PreconditionError):
        splitting_terms(*p.args[:2], "E", basis=((2, 0), (0, 1)))
    with pytest.raises(PreconditionError):
        splitting_terms(*p.args[:2], "E", basis=((0, 1), (1, 0)))


# --- local multiplicities


def test_split_cor_is_the_lattice_index():
    for p in genus_zero_corpus() + list(random_trees(30)) + [t.problem for t in random_thetas(5)]:
        assert split_cor(*p.args) == dfrak(*p.args), p.name
        assert mult_split(*p.args) == mult(*p.args)
    for w in range(1, 6):
        assert split_cor(*fixtures.e2(w).args) == w


def test_edge_multiplicities_are_one_in_rank_two():
    problems = genus_zero_corpus() + list(planar_curves(10)) + [t.problem for t in random_thetas(5)]
    problems += [p for p in random_trees(40) if p.curve.rank == 2]
    for p in problems:
        for e in p.curve.compact_edges():
            assert edge_mult(*p.args[:2], e.id) == 1


def test_some_rank_three_edge_has_larger_multiplicity():
    assert any(edge_mult(*p.args[:2], e.id) > 1 for p in random_trees(40) if p.curve.rank == 3
               for e in p.curve.compact_edges())


def test_mikhalkin_vertex_law():
    for p in planar_curves(20) + (fixtures.conic(),):
        assert mult(*p.args) == fixtures.mikhalkin_product(p)


def pinned_vertex(u1, w1, u2, w2):
    """A trivalent vertex whose two legs end at point-pinned vertices."""
    out = tuple(-(w1 * a + w2 * b) for a, b in zip(u1, u2))
    g = math.gcd(*out)
    c = make_curve(2, ["V0", "V1", "V2"], [
        ("a", "V0", "V1", w1, u1), ("b", "V0", "V2", w2, u2),
        ("X1", "V0", None, g, tuple(x // g for x in out)),
        ("X2", "V1", None, w1, u1), ("X3", "V2", None, w2, u2),
        ("P1", "V1", None, 0, (0, 0)), ("P2", "V2", None, 0, (0, 0)),
    ])
    return fixtures.Problem(c, {4: AffineConstraint.point(2), 5: AffineConstraint.point(2)})


primitive = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).filter(lambda v: math.gcd(*v) == 1)


@given(primitive, st.integers(1, 3), primitive, st.integers(1, 3))
def test_mikhalkin_vertex(u1, w1, u2, w2):
    det = abs(u1[0] * u2[1] - u1[1] * u2[0])
    assume(det != 0)
    p = pinned_vertex(u1, w1, u2, w2)
    assert vertex_mult(*p.args[:2], "V0") == det
    assert mult(*p.args) == w1 * w2 * det == fixtures.mikhalkin_product(p)


def test_theta_vertex_product():
    for t in random_thetas(10):
        c, A, psi = t.problem.args
        value = split_cor(c, A, psi) * edge_weight_product(c) * weight_product(c, A)
        assert value == t.expected


# --- point splitting


@pytest.mark.parametrize("make, index", [
    (tripod_with_point, 4),
    (fixtures.e1, 4),
    (fixtures.e1, 5),
    (lambda: fixtures.genus1_point(1, 2), 4),
    (lambda: fixtures.genus1_point(2, 1), 4),
])
def test_point_split_preserves_mult(make, index):
    p = make()
    pieces = point_split(*p.args[:2], index, p.psi)
    assert product_of_mults(pieces) == mult(*p.args)


def test_point_split_tripod_has_three_pieces():
    pieces = point_split(*tripod_with_point().args[:2], 4)
    assert len(pieces) == 3
    for piece in pieces:
        assert len(piece.curve.vertices) == 1
        assert mult(*piece.args) == 1


def test_point_split_on_every_conic_point():
    p = fixtures.conic()
    for i, a in p.constraints.items():
        assert product_of_mults(point_split(*p.args[:2], i)) == mult(*p.args) == 1


def test_point_split_rejections():
    p = fixtures.e1()
    with pytest.raises(PreconditionError):
        point_split(*p.args[:2], 1)
    q = fixtures.genus1(1, 1, 1, 2, 1, 3)
    with pytest.raises(PreconditionError):
        point_split(*q.args[:2], 4, q.psi)
