"""Cutting genus 0 curves along edges and at point conditions.

An edge split replaces a compact edge by two new ends and sums over the ways
of distributing a basis of ``N`` between their constraints.  The local
multiplicities ``Mult(V)`` and ``Mult(E)`` come from the subspaces ``W``
swept by each flag, and their quotient recovers ``D_Gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .constraints import AffineConstraint, Constraints, constraint_for
from .errors import InvariantViolation, PreconditionError
from .exterior_algebra import Multivector, wedge_all
from .fixtures import Problem
from .lattice_core import (
    IntMatrix,
    Sublattice,
    as_matrix,
    determinant,
    index_of_map,
    matmul,
    quotient_projection,
    right_inverse,
    unimodular_completion,
)
from .mult_bracket import edge_form, w_subspace
from .mult_index import edge_weight_product, mult, require_rigid, rigid
from .tropical_curve import Edge, PsiVector, TropicalCurve, Vertex, _components, is_genus_zero_tree


@dataclass(frozen=True)
class EdgeSplit:
    """The result of cutting one compact edge.

    ``tail`` holds the new end leaving the tail vertex along ``u_E`` and
    ``head`` the one leaving the head vertex along ``-u_E``.  Both new ends
    carry trivial constraints, to be filled in by the caller.  When the edge
    lies on a cycle, ``tail`` and ``head`` are the same problem.
    """

    tail: Problem
    tail_index: int
    head: Problem
    head_index: int

    @property
    def connected(self) -> bool:
        return self.tail is self.head


def _require_genus_zero(c: TropicalCurve) -> None:
    if not is_genus_zero_tree(c):
        raise PreconditionError("splitting needs a genus 0 curve")


def _restrict(c: TropicalCurve, A: Constraints, psi: PsiVector, vids: set[str],
              name: str) -> Problem:
    vertices = tuple(v for v in c.vertices if v.id in vids)
    edges = tuple(e for e in c.edges if e.tail in vids)
    eids = {e.id for e in edges}
    markings = tuple((i, e) for i, e in c.markings if e in eids)
    keep = {i for i, _ in markings}
    curve = TropicalCurve(c.rank, vertices, edges, markings)
    return Problem(curve, {i: a for i, a in A.items() if i in keep},
                   {i: s for i, s in psi.items() if i in keep}, name)


def _next_index(c: TropicalCurve) -> int:
    return max((i for i, _ in c.markings), default=0) + 1


def split_edge(c: TropicalCurve, A: Constraints, edge: str, psi: PsiVector | None = None) -> EdgeSplit:
    """Cut ``edge`` and extend both halves to infinity.

    Works in any genus; the multiplicity formulas built on top are genus 0.
    """
    e = c.edge(edge)
    if not e.bounded:
        raise PreconditionError(f"edge {edge} is unbounded; only compact edges can be split")
    psi = dict(psi or {})
    k = _next_index(c)
    t_end = Edge(f"{e.id}.t", e.tail, None, e.weight, e.direction)
    h_end = Edge(f"{e.id}.h", e.head, None, e.weight, tuple(-x for x in e.direction))  # type: ignore[arg-type]
    edges = [x for x in c.edges if x.id != edge] + [t_end, h_end]
    cut = TropicalCurve(c.rank, c.vertices, tuple(edges), c.markings + ((k, t_end.id), (k + 1, h_end.id)))
    comps = _components(cut)
    if len(comps) == 1:
        whole = Problem(cut, dict(A), psi, f"{edge} cut")
        return EdgeSplit(whole, k, whole, k + 1)
    side = next(s for s in comps if e.tail in s)
    other = next(s for s in comps if e.head in s)
    return EdgeSplit(_restrict(cut, A, psi, side, f"{edge} tail side"), k,
                     _restrict(cut, A, psi, other, f"{edge} head side"), k + 1)


def _check_basis(basis: Sequence[Sequence[int]], u: Sequence[int]) -> IntMatrix:
    b = as_matrix(basis)
    r = len(u)
    if len(b) != r or any(len(row) != r for row in b):
        raise PreconditionError(f"basis must consist of {r} vectors of length {r}")
    if abs(determinant(b)) != 1:
        raise PreconditionError("basis is not unimodular")
    if b[-1] != tuple(u) and b[-1] != tuple(-x for x in u):
        raise PreconditionError("the last basis vector must be the edge direction")
    return b


def _piece_mult(p: Problem) -> int:
    return mult(*p.args) if rigid(*p.args) else 0


def splitting_terms(c: TropicalCurve, A: Constraints, edge: str, basis: Sequence[Sequence[int]] | None = None,
                    psi: PsiVector | None = None) -> list[tuple[int, int, int]]:
    """``(mask, sign, Mult(Gamma_1) * Mult(Gamma_2))`` for each decomposition.

    Bit ``j`` of ``mask`` puts ``e_j`` into ``I_1``.  ``sign`` is the relative
    orientation of the two cut constraints: writing the forms driven into
    the edge from both sides in the dual basis, it is the sign of the
    matching term of their wedge (0 when the term vanishes).  ``basis``
    lists ``e_1, ..., e_{r-1}`` followed by the edge direction.
    """
    _require_genus_zero(c)
    require_rigid(c, A, psi)
    e = c.edge(edge)
    split = split_edge(c, A, edge, psi)
    b = _check_basis(unimodular_completion(e.direction) if basis is None else basis, e.direction)
    r = c.rank
    u = b[-1]
    dual = right_inverse(b, r)
    f = [Multivector.vector(tuple(dual[i][j] for i in range(r))) for j in range(r)]
    full = (1 << r) - 1

    def top(items: Sequence[Multivector]) -> int:
        return wedge_all(items, r).coefficient(full)

    def f_of(mask: int) -> list[Multivector]:
        return [f[j] for j in range(r - 1) if mask >> j & 1]

    jmask = (1 << (r - 1)) - 1
    unit = top(f_of(jmask) + [f[-1]])

    def coeff(alpha: Multivector, mask: int) -> int:
        # alpha ^ F_{J-I} ^ f_u = a_I * eps * unit, and the second factor is eps * unit
        return top([alpha] + f_of(jmask ^ mask) + [f[-1]]) * top(f_of(mask) + f_of(jmask ^ mask) + [f[-1]])

    alpha1 = edge_form(c, A, edge, e.head)  # type: ignore[arg-type]
    alpha2 = edge_form(c, A, edge, e.tail)
    out = []
    for mask in range(1 << (r - 1)):
        first = [b[j] for j in range(r - 1) if mask >> j & 1]
        second = [b[j] for j in range(r - 1) if not mask >> j & 1]
        p1 = _with_constraint(split.tail, split.tail_index, AffineConstraint.spanned(first + [u], r))
        p2 = _with_constraint(split.head, split.head_index, AffineConstraint.spanned(second + [u], r))
        value = _piece_mult(p1) * _piece_mult(p2)
        orient = coeff(alpha1, mask) * coeff(alpha2, jmask ^ mask) * top(f_of(mask) + f_of(jmask ^ mask) + [f[-1]]) * unit
        sign = (orient > 0) - (orient < 0)
        if bool(value) != bool(sign):
            raise InvariantViolation(f"decomposition {mask:b}: piece multiplicities and edge forms disagree")
        out.append((mask, sign, value))
    return out


def splitting_sum(c: TropicalCurve, A: Constraints, edge: str, basis: Sequence[Sequence[int]] | None = None,
                  psi: PsiVector | None = None, signed: bool = False) -> int:
    """``w(E) * sum over I_1 + I_2 = {1..r-1}`` of ``Mult(Gamma_1) Mult(Gamma_2)``.

    The unsigned sum is exact whenever at most one decomposition
    contributes, which is always the case in rank 2.  ``signed=True`` weighs
    every term by the orientation sign from :func:`splitting_terms` and
    takes the absolute value at the end; that version is basis independent.
    """
    terms = splitting_terms(c, A, edge, basis, psi)
    w = c.edge(edge).weight
    if signed:
        return w * abs(sum(s * v for _, s, v in terms))
    return w * sum(v for _, _, v in terms)


def _with_constraint(p: Problem, i: int, a: AffineConstraint) -> Problem:
    return replace(p, constraints={**p.constraints, i: a})


# ---------------------------------------------------------------------------
# local multiplicities


def _flag_subspace(c: TropicalCurve, A: Constraints, e: Edge, at: str) -> Sublattice:
    if not e.bounded:
        return constraint_for(c, A, c.index_of_edge(e.id)).span
    return w_subspace(c, A, e.id, at)


def _stack(blocks: Sequence[IntMatrix]) -> IntMatrix:
    rows = [row for block in blocks for row in block]
    return as_matrix(rows) if rows else ()


def edge_mult(c: TropicalCurve, A: Constraints, edge: str, psi: PsiVector | None = None) -> int:
    """Index of ``N / Z u_E`` in ``N / W_1 + N / W_2`` for the two sides of ``edge``."""
    _require_genus_zero(c)
    require_rigid(c, A, psi)
    e = c.edge(edge)
    if not e.bounded:
        raise PreconditionError(f"edge {edge} is unbounded")
    r = c.rank
    section = right_inverse(quotient_projection(Sublattice(r, (e.direction,))), r)
    blocks = []
    for into in (e.head, e.tail):
        q = quotient_projection(w_subspace(c, A, edge, into))  # type: ignore[arg-type]
        if q:
            blocks.append(matmul(q, section) if r > 1 else ())
    m = _stack(blocks)
    value = index_of_map(m, r - 1) if r > 1 else 1
    if value == 0:
        raise PreconditionError(f"edge {edge} has infinite index; the curve is not rigid")
    return value


def vertex_mult(c: TropicalCurve, A: Constraints, vertex: str, psi: PsiVector | None = None) -> int:
    """Index of ``N`` in the product of ``N / W`` over the flags at ``vertex``."""
    _require_genus_zero(c)
    require_rigid(c, A, psi)
    blocks = [quotient_projection(_flag_subspace(c, A, e, vertex)) for e in c.incident(vertex)]
    value = index_of_map(_stack(blocks), c.rank)
    if value == 0:
        raise PreconditionError(f"vertex {vertex} has infinite index; the curve is not rigid")
    return value


def split_cor(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None) -> int:
    """``prod Mult(V) / prod Mult(E)``, which is ``D_Gamma`` in genus 0."""
    num = 1
    for v in c.vertex_ids:
        num *= vertex_mult(c, A, v, psi)
    den = 1
    for e in c.compact_edges():
        den *= edge_mult(c, A, e.id, psi)
    q, rem = divmod(num, den)
    if rem:
        raise InvariantViolation(f"vertex product {num} is not divisible by edge product {den}")
    return q


def mult_split(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None, edge: str | None = None) -> int:
    """Multiplicity from the splitting formula at ``edge``, or from the product formula."""
    if edge is not None:
        return splitting_sum(c, A, edge, psi=psi, signed=True)
    from .constraints import weight_product

    return split_cor(c, A, psi) * edge_weight_product(c) * weight_product(c, A)


# ---------------------------------------------------------------------------
# point splitting


def point_split(c: TropicalCurve, A: Constraints, i: int, psi: PsiVector | None = None) -> list[Problem]:
    """Remove the vertex pinned by the point on contracted end ``i``.

    Every other edge ``E`` at that vertex ``V`` is given a vertex ``V_E`` of
    its own carrying ``E``, a new end in the direction ``-u_(V,E)`` of
    weight ``w(E)`` and a new contracted end pinned at a point.  The
    multiplicity of the original curve is the product over the returned
    connected components.  The weight of the removed point moves to the
    first new point.
    """
    psi = dict(psi or {})
    require_rigid(c, A, psi)
    end = c.marked_edge(i)
    a = constraint_for(c, A, i)
    if end.weight != 0 or end.bounded:
        raise PreconditionError(f"marking {i} is not a contracted end")
    if a.codim != c.rank:
        raise PreconditionError(f"constraint {i} is not a point")
    v = end.tail
    if c.vertex(v).genus:
        raise PreconditionError(f"vertex {v} has positive genus")
    others = [x for x in c.incident(v) if x.id != end.id]
    if any(not x.bounded and x.weight == 0 for x in others):
        raise PreconditionError(f"vertex {v} carries a second contracted end")
    if any(x.tail == x.head for x in others):
        raise PreconditionError(f"vertex {v} carries a loop")
    k = _next_index(c)
    vertices = [x for x in c.vertices if x.id != v]
    edges = [x for x in c.edges if x.id != end.id and x.tail != v and x.head != v]
    markings = [(j, e) for j, e in c.markings if j != i]
    constraints = {j: x for j, x in A.items() if j != i}
    first = True
    for x in sorted(others, key=lambda x: x.id):
        new_v = f"{v}/{x.id}"
        vertices.append(Vertex(new_v))
        u = x.outward(v)[0]
        edges.append(replace(x, tail=new_v) if x.tail == v else replace(x, head=new_v))
        back = Edge(f"{x.id}/o", new_v, None, x.weight, tuple(-y for y in u))
        pin = Edge(f"{x.id}/p", new_v, None, 0, tuple(0 for _ in u))
        edges += [back, pin]
        markings += [(k, back.id), (k + 1, pin.id)]
        constraints[k + 1] = AffineConstraint(a.span, a.translation, a.weight if first else 1)
        first = False
        k += 2
    cut = TropicalCurve(c.rank, tuple(vertices), tuple(edges), tuple(markings))
    kept_psi = {j: s for j, s in psi.items() if j != i and c.marked_edge(j).tail != v}
    return [_restrict(cut, constraints, kept_psi, comp, f"point {i} piece") for comp in
            sorted(_components(cut), key=lambda s: min(cut.vertex_ids.index(x) for x in s))]
