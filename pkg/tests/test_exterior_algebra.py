import itertools

import pytest
from hypothesis import given, strategies as st

from oracles import wedge_blades
from tropmult.errors import PreconditionError
from tropmult.exterior_algebra import (
    Multivector,
    alpha_from_subspace,
    annihilated_lattice,
    bits,
    box,
    box_coproduct,
    contract_blade,
    contract_vector,
    coproduct,
    cotrace_terms,
    doubled_vector_blade,
    embed_first,
    embed_second,
    frobenius_basis,
    mask_of,
    pairing,
    relative_coefficient,
    tensor_terms,
    theta,
    theta_box,
    theta_n_box,
    trace,
    wedge,
    wedge_all,
)
from tropmult.lattice_core import Sublattice, primitive_index, saturate

E = Multivector.generator


def mv(rank):
    return st.dictionaries(st.integers(0, (1 << rank) - 1), st.integers(-3, 3), max_size=6).map(
        lambda d: Multivector(rank, d)
    )


def homogeneous(rank, degree):
    blades = [mask_of(c) for c in itertools.combinations(range(rank), degree)]
    return st.dictionaries(st.sampled_from(blades), st.integers(-3, 3), max_size=4).map(
        lambda d: Multivector(rank, d)
    )


def vectors(rank):
    return st.lists(st.integers(-3, 3), min_size=rank, max_size=rank)


ranks = st.integers(1, 4)


# --- wedge


def test_wedge_examples():
    e1, e2 = E(2, 0), E(2, 1)
    e12 = Multivector.blade(2, [0, 1])
    assert wedge(e1, e2) == e12
    assert wedge(e2, e1) == -e12
    assert not wedge(e1, e1)
    assert wedge(e1 + e2, e1 - e2) == -2 * e12


@given(st.integers(1, 5).flatmap(lambda r: st.tuples(
    st.just(r), st.lists(st.integers(0, r - 1), unique=True), st.lists(st.integers(0, r - 1), unique=True))))
def test_wedge_of_blades_matches_permutation_sign(data):
    r, i, j = data
    sign, idx = wedge_blades(sorted(i), sorted(j))
    got = wedge(Multivector.blade(r, sorted(i)), Multivector.blade(r, sorted(j)))
    expected = Multivector(r, {mask_of(idx): sign}) if sign else Multivector.zero(r)
    assert got == expected


@given(ranks.flatmap(lambda r: st.tuples(mv(r), mv(r), mv(r))))
def test_wedge_is_associative_and_bilinear(abc):
    a, b, c = abc
    assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))
    assert wedge(a, b + c) == wedge(a, b) + wedge(a, c)


@given(st.integers(1, 4).flatmap(lambda r: st.tuples(
    st.integers(0, r), st.integers(0, r)).flatmap(lambda pq: st.tuples(
        st.just(pq), homogeneous(r, pq[0]), homogeneous(r, pq[1])))))
def test_graded_commutativity(data):
    (p, q), a, b = data
    assert wedge(a, b) == wedge(b, a) * (-1 if p * q % 2 else 1)


# --- contractions


def test_contraction_examples():
    e12 = Multivector.blade(2, [0, 1])
    assert contract_vector((1, 0), e12) == E(2, 1)
    assert contract_vector((0, 1), e12) == -E(2, 0)
    a = Multivector(2, {0: 2, 1: 3, 3: -1})
    assert contract_blade(Multivector.scalar(2), a) == a


def test_contraction_of_doubled_top():
    got = contract_blade(doubled_vector_blade((0, 1)), theta_box(2))
    assert got == wedge(embed_first(E(2, 0)), embed_second(E(2, 0)))
    assert got == box(E(2, 0))


@pytest.mark.parametrize("n", [(1, 0), (0, 1), (1, 1), (2, -1), (1, 2, 3), (0, 0, 1), (1, -1, 0), (2,), (1,)])
def test_contracting_theta_box_gives_theta_n_box(n):
    r = len(n)
    u = tuple(x // primitive_index(n) for x in n)
    assert contract_blade(doubled_vector_blade(u), theta_box(r)) == theta_n_box(u, r)


@given(ranks.flatmap(lambda r: st.tuples(vectors(r), mv(r))))
def test_contraction_squares_to_zero(data):
    n, a = data
    assert not contract_vector(n, contract_vector(n, a))


@given(st.integers(1, 4).flatmap(lambda r: st.integers(0, r).flatmap(
    lambda p: st.tuples(st.just(p), vectors(r), homogeneous(r, p), mv(r)))))
def test_contraction_is_an_antiderivation(data):
    p, n, a, b = data
    lhs = contract_vector(n, wedge(a, b))
    rhs = wedge(contract_vector(n, a), b) + wedge(a, contract_vector(n, b)) * (-1 if p % 2 else 1)
    assert lhs == rhs


@given(st.integers(1, 4).flatmap(lambda r: st.integers(0, r).flatmap(
    lambda p: st.tuples(homogeneous(r, p), mv(r), mv(r)))))
def test_contract_blade_is_adjoint_to_wedge(data):
    beta, a, g = data
    assert pairing(contract_blade(beta, a), g) == pairing(a, wedge(beta, g))


@given(st.integers(2, 4).flatmap(lambda r: st.tuples(vectors(r), vectors(r), mv(r))))
def test_contract_by_wedge_of_vectors_composes(data):
    x, y, a = data
    xy = wedge(Multivector.vector(x), Multivector.vector(y))
    assert contract_blade(xy, a) == contract_vector(y, contract_vector(x, a))


# --- box and trace


def test_box_examples():
    e1 = E(2, 0)
    assert box(e1) == wedge(embed_first(e1), embed_second(e1))
    assert box(Multivector.scalar(2, 5)) == Multivector.scalar(4, 25)


def test_box_is_multiplicative_on_rank_three_blades():
    for i in range(8):
        for j in range(8):
            a, b = Multivector(3, {i: 1}), Multivector(3, {j: 1})
            assert box(wedge(a, b)) == wedge(box(a), box(b))


@given(st.integers(1, 4).flatmap(lambda r: st.tuples(
    st.lists(vectors(r), max_size=2), st.lists(vectors(r), max_size=2), st.just(r))))
def test_box_is_multiplicative_on_decomposables(data):
    xs, ys, r = data
    a = wedge_all((Multivector.vector(v) for v in xs), r)
    b = wedge_all((Multivector.vector(v) for v in ys), r)
    assert box(wedge(a, b)) == wedge(box(a), box(b))


def test_box_rejects_mixed_degrees():
    with pytest.raises(PreconditionError):
        box(Multivector(2, {0: 1, 1: 1}))


def test_trace_examples():
    for r in (1, 2, 3):
        assert trace(theta_box(r)) == 1
        assert trace(Multivector.scalar(2 * r)) == 0
    assert trace(wedge(box(E(2, 0)), box(E(2, 1)))) == 1
    with pytest.raises(PreconditionError):
        trace(Multivector.scalar(3))


@given(st.integers(1, 3).flatmap(lambda r: st.lists(vectors(r), min_size=r, max_size=r)))
def test_trace_of_box_is_squared_determinant(vs):
    from oracles import cofactor_det

    r = len(vs)
    a = wedge_all((Multivector.vector(v) for v in vs), r)
    assert trace(box(a)) == cofactor_det(vs) ** 2


# --- Frobenius structure


def test_rank_one_copairing():
    basis = frobenius_basis(None, 1)
    f1, f2 = basis
    assert wedge(f1, f2) == theta_box(1)
    one = Multivector.scalar(2)
    f12 = wedge(f1, f2)
    expected = tensor_terms([(f12, one), (-f1, f2), (f2, f1), (one, f12)])
    assert tensor_terms(cotrace_terms(basis)) == expected
    assert expected == {(3, 0): 1, (1, 2): -1, (2, 1): 1, (0, 3): 1}


@pytest.mark.parametrize("r", [1, 2, 3])
def test_coproduct_of_theta_box(r):
    t = theta_box(r)
    assert tensor_terms(coproduct(t)) == tensor_terms([(t, t)])


@pytest.mark.parametrize("n", [(0, 1), (1, 1), (1, -2), (1, 0, 0), (1, 2, -1)])
def test_coproduct_of_theta_n_box(n):
    basis = frobenius_basis(n, len(n))
    t = theta_n_box(n, len(n))
    assert wedge_all(basis, 2 * len(n)) == t
    assert tensor_terms(coproduct(t, basis)) == tensor_terms([(t, t)])


def test_box_coproduct_on_the_unit_splits_the_index_set():
    basis = [E(2, 0), E(2, 1)]
    got = tensor_terms(box_coproduct([], basis))
    one = Multivector.scalar(4)
    e1, e2, e12 = box(basis[0]), box(basis[1]), box(wedge(*basis))
    assert got == tensor_terms([(one, e12), (e1, e2), (e2, e1), (e12, one)])


def test_box_coproduct_of_top_class():
    basis = [E(3, j) for j in range(3)]
    t = box(wedge_all(basis, 3))
    assert tensor_terms(box_coproduct([0, 1, 2], basis)) == tensor_terms([(t, t)])


def test_box_coproduct_is_compatible_with_products():
    # vee(x_K * e_I) = (e_K (x) 1) * vee(e_I) inside the box subalgebra
    basis = [E(3, j) for j in range(3)]
    cls = lambda idx: box(wedge_all((basis[j] for j in sorted(idx)), 3))
    for size in range(4):
        for i in itertools.combinations(range(3), size):
            for k in range(4 - size):
                for extra in itertools.combinations([j for j in range(3) if j not in i], k):
                    lhs = tensor_terms(box_coproduct(i + extra, basis))
                    rhs = tensor_terms((wedge(cls(extra), x), y) for x, y in box_coproduct(i, basis))
                    assert lhs == rhs


# --- forms attached to sublattices


def test_alpha_examples():
    assert alpha_from_subspace(Sublattice(2, ((1, 0),))) == E(2, 1)
    for w in (1, 2, 3, 5):
        assert alpha_from_subspace(Sublattice(2, ((1, -w),))) == w * E(2, 0) + E(2, 1)
    assert alpha_from_subspace(Sublattice.zero(2), 3) == 3 * theta(2)
    with pytest.raises(PreconditionError):
        alpha_from_subspace(Sublattice(2, ((2, 0),)))


@given(st.integers(1, 4).flatmap(lambda r: st.lists(vectors(r), max_size=r)), st.integers(1, 3))
def test_alpha_annihilates_exactly_its_subspace(gens, weight):
    r = len(gens[0]) if gens else 2
    w = saturate(Sublattice(r, tuple(tuple(g) for g in gens)))
    alpha = alpha_from_subspace(w, weight)
    assert alpha.degree() == w.codim
    assert alpha.index() == weight
    for g in w.generators:
        assert not contract_vector(g, alpha)
    assert saturate(annihilated_lattice(alpha)).basis() == w.basis()


def test_relative_coefficient():
    t = theta_box(2)
    assert relative_coefficient(t * -4, t) == -4
    assert relative_coefficient(Multivector.zero(4), t) == 0
    with pytest.raises(PreconditionError):
        relative_coefficient(box(E(2, 0)), t)


def test_bits_and_masks():
    assert bits(0b1011) == [0, 1, 3]
    assert mask_of([3, 0, 1]) == 0b1011
    assert Multivector.blade(3, [2, 0]) == -Multivector.blade(3, [0, 2])


def test_rank_mismatch():
    with pytest.raises(PreconditionError):
        wedge(E(2, 0), E(3, 0))
