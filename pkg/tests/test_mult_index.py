import itertools
import random

import pytest
from hypothesis import given, strategies as st

from corpus import random_thetas, random_trees
from oracles import cofactor_det, parallelepiped_count
from transforms import change_basis, random_unimodular, relabel, reverse_edges
from tropmult import fixtures
from tropmult.errors import PreconditionError
from tropmult.mult_index import build_phi, dfrak, intersection_form, mult, rank_defect, rigid

tuples = st.tuples(*[st.integers(-3, 3)] * 6).filter(
    lambda t: t[0] * t[3] * (t[4] + t[5]) != t[1] * t[4] * (t[2] + t[3])
)


def genus1_value(a, b, c, d, e, f):
    return abs(a * d * (e + f) - b * e * (c + d))


def all_problems():
    return fixtures.standard_corpus() + list(random_trees(25)) + [t.problem for t in random_thetas(5)]


def test_e1():
    p = fixtures.e1()
    phi = build_phi(p.curve, p.constraints)
    assert len(phi.matrix) == 6 and phi.domain_rank == 6
    assert abs(cofactor_det(phi.matrix)) == 1
    assert mult(*p.args) == 1


@pytest.mark.parametrize("w", [1, 2, 3, 4, 5])
def test_e2(w):
    p = fixtures.e2(w)
    assert dfrak(*p.args) == w
    assert mult(*p.args) == w * w


def test_genus_one_example():
    assert mult(*fixtures.genus1(1, 1, 1, 2, 1, 3).args) == 5


@given(tuples)
def test_genus_one_closed_form(t):
    p = fixtures.genus1(*t)
    phi = build_phi(p.curve, p.constraints)
    assert len(phi.matrix) == phi.domain_rank == 6
    from tropmult.lattice_core import primitive_index

    lattice_index = abs(cofactor_det(phi.matrix))
    weights = 1
    for k in range(0, 6, 2):
        weights *= primitive_index(t[k:k + 2])
    assert lattice_index * weights == genus1_value(*t)
    assert mult(*p.args) == genus1_value(*t)


def test_degenerate_genus_one_is_not_rigid():
    p = fixtures.genus1(1, 0, 0, 1, 1, -1)
    assert not rigid(*p.args)
    with pytest.raises(PreconditionError):
        mult(*p.args)


def test_unconstrained_tripod_is_not_rigid():
    p = fixtures.tripod()
    assert not rigid(*p.args)
    assert rank_defect(*p.args[:2]) == 2
    with pytest.raises(PreconditionError):
        mult(*p.args)


def test_phi_blocks_are_labelled():
    phi = build_phi(*fixtures.e2(2).args[:2])
    labels = [name for name, _ in phi.blocks]
    assert labels == ["edge:E", "marking:1", "marking:2", "marking:3", "marking:4"]
    assert [size for _, size in phi.blocks] == [1, 1, 1, 1, 0]


def test_phi_index_matches_oracles_on_corpus():
    for p in all_problems():
        phi = build_phi(p.curve, p.constraints)
        assert abs(cofactor_det(phi.matrix)) == dfrak(*p.args), p.name


def test_phi_index_counts_points_on_small_cases():
    for p in [fixtures.e1(), fixtures.e2(2), fixtures.e2(3)]:
        phi = build_phi(p.curve, p.constraints)
        assert parallelepiped_count(phi.matrix) == dfrak(*p.args)


def test_intersection_form_equals_mult():
    for p in all_problems():
        assert intersection_form(*p.args) == mult(*p.args), p.name


def test_invariance_under_relabelling_and_orientation():
    for p in all_problems():
        m = mult(*p.args)
        assert mult(*relabel(p).args) == m
        assert mult(*reverse_edges(p).args) == m


def test_invariance_under_change_of_basis():
    rng = random.Random(5)
    for p in all_problems():
        g = random_unimodular(rng, p.curve.rank)
        assert mult(*change_basis(p, g).args) == mult(*p.args), p.name


def test_compact_zero_edge_is_rejected():
    from tropmult.tropical_curve import make_curve

    c = make_curve(2, ["A", "B"], [
        ("Z", "A", "B", 0, (0, 0)),
        ("X1", "A", None, 1, (-1, 0)), ("X2", "A", None, 1, (1, 0)),
        ("X3", "B", None, 1, (0, 1)), ("X4", "B", None, 1, (0, -1)),
    ])
    with pytest.raises(PreconditionError):
        build_phi(c, {})
