import pytest
from hypothesis import given, settings, strategies as st

from corpus import random_thetas, random_trees
from tropmult import fixtures
from tropmult.errors import PreconditionError
from tropmult.exterior_algebra import Multivector, box, theta_box, theta_n_box, trace, wedge
from tropmult.mult_index import mult
from tropmult.trqft import (
    FrobeniusElement,
    constraint_box,
    evaluate_box,
    evaluate_midpoint,
    evaluate_tree,
    kappa,
    kappa_vee,
    mult_trqft,
    tree_terms,
)

genus1_tuples = st.tuples(*[st.integers(-3, 3)] * 6).filter(
    lambda t: t[0] * t[3] * (t[4] + t[5]) != t[1] * t[4] * (t[2] + t[3])
)


def breakdown(a, b, c, d, e, f):
    cross = -a * b * d * e * (c + d) * (e + f)
    return [b * b * e * e * (c + d) ** 2, cross, cross, a * a * d * d * (e + f) ** 2]


def test_kappa_vee_examples():
    zero = FrobeniusElement((0, 0), theta_box(2))
    got = kappa_vee((0, 1), zero)
    assert got.direction == (0, 1)
    assert got.value == box(Multivector.generator(2, 0))
    assert got.value == theta_n_box((0, 1), 2)
    one = FrobeniusElement((0, 0), Multivector.scalar(4))
    assert not kappa_vee((1, 1), one).value
    assert kappa_vee((0, 0), one) is one


def test_kappa_is_the_inclusion():
    a = FrobeniusElement((1, 2), theta_n_box((1, 2), 2))
    k = kappa((1, 2), a)
    assert k.direction == (0, 0) and k.value == a.value
    with pytest.raises(PreconditionError):
        kappa((0, 1), a)


def test_frobenius_element_membership():
    with pytest.raises(PreconditionError):
        FrobeniusElement((1, 0), theta_box(2))
    assert FrobeniusElement((1, 0), theta_n_box((1, 0), 2)).trace() == 1
    assert FrobeniusElement((0, 0), theta_box(2)).trace() == trace(theta_box(2)) == 1


def test_kappa_adjunction_spot_check():
    n = (1, -1)
    a = FrobeniusElement(n, Multivector.scalar(4))
    for blade in range(16):
        b = FrobeniusElement((0, 0), Multivector(4, {blade: 1}))
        lhs = FrobeniusElement(n, wedge(a.value, kappa_vee(n, b).value)).trace()
        assert lhs == trace(wedge(kappa(n, a).value, b.value))


def test_constraint_box_of_a_point():
    p = fixtures.e1()
    assert constraint_box(p.curve, p.constraints, 4) == theta_box(2)
    assert constraint_box(p.curve, p.constraints, 1) == Multivector.scalar(4)


def test_squared_values_on_fixtures():
    assert evaluate_midpoint(*fixtures.genus1(1, 1, 1, 2, 1, 3).args) == 25
    assert evaluate_midpoint(*fixtures.e2(3).args) == 81
    assert evaluate_tree(*fixtures.e2(3).args) == 81
    assert evaluate_midpoint(*fixtures.e1().args) == 1
    assert evaluate_box(*fixtures.e1().args) == 1
    assert evaluate_box(*fixtures.e2(2).args) == 16
    assert mult_trqft(*fixtures.genus1(1, 1, 1, 2, 1, 3).args) == 5


def test_genus_one_four_term_breakdown():
    assert tree_terms(*fixtures.genus1(1, 1, 1, 2, 1, 3).args) == [9, -24, -24, 64]


@settings(max_examples=25)
@given(genus1_tuples)
def test_genus_one_breakdown_closed_form(t):
    p = fixtures.genus1(*t)
    terms = tree_terms(*p.args)
    assert terms == breakdown(*t)
    assert sum(terms) == mult(*p.args) ** 2
    assert evaluate_midpoint(*p.args) == sum(terms)


def test_genus_zero_tree_mode_has_one_term():
    for p in [fixtures.e1(), fixtures.e2(2), fixtures.conic()]:
        assert len(tree_terms(*p.args)) == 1


def test_flow_independence_on_every_sink():
    problems = fixtures.standard_corpus() + list(random_trees(15)) + [t.problem for t in random_thetas(3)]
    for p in problems:
        mid = evaluate_midpoint(*p.args)
        assert mid == mult(*p.args) ** 2, p.name
        for v in p.curve.vertex_ids:
            assert evaluate_tree(*p.args, sink=v) == mid, (p.name, v)


def test_box_mode_agrees_and_is_genus_zero_only():
    for p in random_trees(15):
        for v in p.curve.vertex_ids:
            assert evaluate_box(*p.args, sink=v) == mult(*p.args) ** 2
    with pytest.raises(PreconditionError):
        evaluate_box(*fixtures.genus1(1, 1, 1, 2, 1, 3).args)


def test_positive_vertex_genus_is_rejected():
    from tropmult.tropical_curve import make_curve

    c = make_curve(2, [("V", 1)], [("C", "V", None, 0, (0, 0))])
    with pytest.raises(PreconditionError):
        evaluate_midpoint(c, {})


def test_unknown_mode():
    with pytest.raises(PreconditionError):
        mult_trqft(*fixtures.e1().args, mode="sideways")
