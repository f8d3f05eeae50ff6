"""Multiplicities of rigid curves as lattice indices.

Vertex positions ``H`` live in ``N^V``.  The map ``Phi`` sends ``H`` to the
edge differences modulo the edge directions and to the positions of the
marked ends modulo the constraint spans.  Its index, times the edge and
constraint weights, is the multiplicity every other method is checked
against.
"""

from __future__ import annotations

from dataclasses import dataclass

from .constraints import Constraints, check_constraints, constraint_for, rigidity_dimension_check, weight_product
from .errors import PreconditionError
from .lattice_core import (
    IntMatrix,
    Sublattice,
    as_matrix,
    index_of_map,
    integer_kernel,
    matrix_rank,
    quotient_projection,
)
from .tropical_curve import PsiVector, TropicalCurve, require_valid


@dataclass(frozen=True)
class PhiMap:
    matrix: IntMatrix
    domain_rank: int
    blocks: tuple[tuple[str, int], ...]

    @property
    def codomain_rank(self) -> int:
        return len(self.matrix)

    def block_rows(self) -> list[IntMatrix]:
        out = []
        start = 0
        for _, size in self.blocks:
            out.append(self.matrix[start:start + size])
            start += size
        return out


def _edge_span(direction) -> Sublattice:
    return Sublattice(len(direction), (tuple(direction),))


def _forbid_zero_edges(c: TropicalCurve) -> None:
    for e in c.compact_edges():
        if e.weight == 0:
            raise PreconditionError(f"compact edge {e.id} has weight 0; contract it first")


def build_phi(c: TropicalCurve, A: Constraints) -> PhiMap:
    require_valid(c)
    check_constraints(c, A)
    _forbid_zero_edges(c)
    r = c.rank
    vids = c.vertex_ids
    ncols = r * len(vids)
    col = {v: k * r for k, v in enumerate(vids)}
    rows: list[list[int]] = []
    blocks: list[tuple[str, int]] = []
    for e in c.compact_edges():
        q = quotient_projection(_edge_span(e.direction))
        for qrow in q:
            row = [0] * ncols
            for j in range(r):
                row[col[e.head] + j] += qrow[j]  # type: ignore[index]
                row[col[e.tail] + j] -= qrow[j]
            rows.append(row)
        blocks.append((f"edge:{e.id}", len(q)))
    for i, eid in c.markings:
        q = quotient_projection(constraint_for(c, A, i).span)
        v = c.edge(eid).tail
        for qrow in q:
            row = [0] * ncols
            for j in range(r):
                row[col[v] + j] = qrow[j]
            rows.append(row)
        blocks.append((f"marking:{i}", len(q)))
    return PhiMap(as_matrix(rows) if rows else (), ncols, tuple(blocks))


def rank_defect(c: TropicalCurve, A: Constraints) -> int:
    """``dim ker Phi``; zero exactly when ``Phi`` is injective."""
    phi = build_phi(c, A)
    if not phi.matrix:
        return phi.domain_rank
    return phi.domain_rank - matrix_rank(phi.matrix, phi.domain_rank)


def rigid(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None) -> bool:
    if not rigidity_dimension_check(c, A, psi):
        return False
    phi = build_phi(c, A)
    return index_of_map(phi.matrix, phi.domain_rank) != 0


def require_rigid(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None) -> PhiMap:
    if not rigidity_dimension_check(c, A, psi):
        raise PreconditionError("curve is not rigid: constraint codimensions do not match the expected dimension")
    phi = build_phi(c, A)
    if index_of_map(phi.matrix, phi.domain_rank) == 0:
        raise PreconditionError(f"curve is not rigid: Phi has a kernel of rank {rank_defect(c, A)}")
    return phi


def dfrak(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None) -> int:
    phi = require_rigid(c, A, psi)
    return index_of_map(phi.matrix, phi.domain_rank)


def edge_weight_product(c: TropicalCurve) -> int:
    out = 1
    for e in c.compact_edges():
        out *= e.weight
    return out


def mult(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None) -> int:
    return dfrak(c, A, psi) * edge_weight_product(c) * weight_product(c, A)


def intersection_form(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None) -> int:
    """Intersect the edge diagonals with the pulled back constraints inside ``N^V``.

    Each condition is turned into its saturated subspace of ``N^V`` first and
    re-projected, so this shares no basis choices with :func:`build_phi`.
    """
    phi = require_rigid(c, A, psi)
    n = phi.domain_rank
    rows: list[tuple[int, ...]] = []
    for block in phi.block_rows():
        if not block:
            continue
        kernel = integer_kernel(block, n)
        rows.extend(integer_kernel(kernel, n) if kernel else _identity_rows(n))
    return index_of_map(as_matrix(rows), n) * edge_weight_product(c) * weight_product(c, A)


def _identity_rows(n: int) -> list[tuple[int, ...]]:
    return [tuple(int(i == j) for j in range(n)) for i in range(n)]
