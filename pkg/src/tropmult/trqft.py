"""Evaluation of the multiplicity TrQFT on a rigid curve.

Every vertex carries a copy of the doubled algebra ``C_0``.  Marked ends feed
in the squared forms of their constraints, a compact edge with primitive
direction ``u`` either splits as the copairing of ``C_u`` (a source at its
midpoint) or carries the output of a vertex through the contraction by
``(u,0) ^ (0,u)``.  Each compact edge contributes one global factor
``w(E)^2``.  The traces at the sinks multiply to ``Mult^2``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import isqrt
from typing import Sequence

from .constraints import Constraints, alpha_of, constraint_for
from .errors import InvariantViolation, PreconditionError
from .exterior_algebra import (
    Multivector,
    box,
    contract_blade,
    contract_vector,
    cotrace_terms,
    doubled_vector_blade,
    frobenius_basis,
    theta_n_box,
    trace,
    wedge,
)
from .lattice_core import IntVector, primitive_part
from .mult_index import require_rigid
from .tropical_curve import Edge, FlowMode, PsiVector, TropicalCurve, build_flow, is_genus_zero_tree


@dataclass(frozen=True)
class FrobeniusElement:
    """An element of ``C_n`` stored in doubled coordinates of ``M``."""

    direction: IntVector
    value: Multivector

    def __post_init__(self) -> None:
        if 2 * len(self.direction) != self.value.rank:
            raise PreconditionError("direction and value ranks disagree")
        if any(self.direction):
            first = tuple(x for k in self.direction for x in (k, 0))
            second = tuple(x for k in self.direction for x in (0, k))
            if contract_vector(first, self.value) or contract_vector(second, self.value):
                raise PreconditionError(f"value does not lie in C_n for n = {self.direction}")

    def trace(self) -> int:
        """Coefficient against ``Theta_n^box``."""
        unit = theta_n_box(self.direction, len(self.direction))
        if not self.value:
            return 0
        full = next(iter(unit.terms))
        top = self.value.grade(unit.degree())
        return top.coefficient(full) // unit.coefficient(full) if top else 0


def kappa(n: Sequence[int], a: FrobeniusElement) -> FrobeniusElement:
    """The inclusion ``C_n -> C_0`` (unscaled; the edge scalar is applied globally)."""
    if tuple(a.direction) != tuple(n):
        raise PreconditionError("element does not live over the given direction")
    return FrobeniusElement(tuple(0 for _ in n), a.value)


def kappa_vee(n: Sequence[int], a: FrobeniusElement) -> FrobeniusElement:
    """Contraction ``C_0 -> C_n`` by the primitive doubled blade of ``n``.

    For ``n = 0`` this is the identity.
    """
    if any(a.direction):
        raise PreconditionError("kappa_vee takes an element of C_0")
    if not any(n):
        return a
    return FrobeniusElement(tuple(n), _contract_edge(primitive_part(n), a.value))


def _contract_edge(u: Sequence[int], a: Multivector) -> Multivector:
    return contract_blade(doubled_vector_blade(u), a)


# ---------------------------------------------------------------------------
# setup shared by the evaluators


def _prepare(c: TropicalCurve, A: Constraints, psi: PsiVector | None) -> dict[str, Multivector]:
    require_rigid(c, A, psi)
    for v in c.vertices:
        if v.genus:
            raise PreconditionError(f"vertex {v.id} has positive genus; the TrQFT needs genus 0 vertices")
    local = {v: Multivector.scalar(2 * c.rank) for v in c.vertex_ids}
    for i, eid in c.markings:
        e = c.edge(eid)
        local[e.tail] = wedge(local[e.tail], constraint_box(c, A, i))
    return local


def constraint_box(c: TropicalCurve, A: Constraints, i: int) -> Multivector:
    """The squared constraint form ``alpha_i^box`` in ``C_0``."""
    return box(alpha_of(constraint_for(c, A, i), c.delta(i)))


def _edge_terms(e: Edge, rank: int) -> list[tuple[Multivector, Multivector]]:
    return [(x, y) for x, y in cotrace_terms(frobenius_basis(e.direction, rank)) if x and y]


def _koszul(pieces: Sequence[tuple[int, int]], order: Sequence[int]) -> int:
    """Sign of moving graded pieces (key, degree) from list order to ``order``."""
    pos = {k: p for p, k in enumerate(order)}
    odd = [(pos[k], d) for k, d in pieces if d & 1]
    inversions = sum(1 for a in range(len(odd)) for b in range(a + 1, len(odd)) if odd[a][0] > odd[b][0])
    return -1 if inversions & 1 else 1


# ---------------------------------------------------------------------------
# midpoint-source evaluation


def evaluate_midpoint(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None) -> int:
    """Sum over copairing terms of every compact edge of the product of vertex traces."""
    local = _prepare(c, A, psi)
    vids = c.vertex_ids
    block = {v: k for k, v in enumerate(vids)}
    edges = c.compact_edges()
    pending = {v: 0 for v in vids}
    for e in edges:
        pending[e.tail] += 1
        pending[e.head] += 1  # type: ignore[index]
    scalar = 1
    for e in edges:
        scalar *= e.weight ** 2
    closed = 1
    for v in vids:
        if pending[v] == 0:
            closed *= trace(local[v])
    if closed == 0:
        return 0
    terms = [_edge_terms(e, c.rank) for e in edges]
    products = [local[v] for v in vids]
    parity = [0] * len(vids)
    left = [pending[v] for v in vids]
    total = 0

    def later_parity(b: int) -> int:
        return sum(parity[b + 1:]) & 1

    def place(b: int, piece: Multivector) -> tuple[int, Multivector] | None:
        d = piece.degree()
        sign = -1 if (d & 1) and later_parity(b) else 1
        prod = wedge(products[b], piece)
        if not prod:
            return None
        return sign, prod

    def dfs(k: int, acc: int) -> None:
        nonlocal total
        if k == len(edges):
            total += acc
            return
        e = edges[k]
        bt, bh = block[e.tail], block[e.head]  # type: ignore[index]
        for x, y in terms[k]:
            saved = (products[bt], products[bh], parity[bt], parity[bh], left[bt], left[bh])
            got = place(bt, x)
            if got is None:
                continue
            sx, products[bt] = got
            parity[bt] ^= x.degree() & 1
            got = place(bh, y)
            if got is None:
                products[bt], products[bh], parity[bt], parity[bh], left[bt], left[bh] = saved
                continue
            sy, products[bh] = got
            parity[bh] ^= y.degree() & 1
            factor = acc * sx * sy
            left[bt] -= 1
            left[bh] -= 1
            for b in {bt, bh}:
                if left[b] == 0 and factor:
                    factor *= trace(products[b])
            if factor:
                dfs(k + 1, factor)
            products[bt], products[bh], parity[bt], parity[bh], left[bt], left[bh] = saved

    dfs(0, scalar * closed)
    return total


# ---------------------------------------------------------------------------
# single-sink evaluation


def _default_sink(c: TropicalCurve) -> str:
    return c.vertex_ids[-1]


def tree_terms(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None,
               sink: str | None = None) -> list[int]:
    """Contribution of each copairing term on the split (non-tree) edges.

    Terms are listed in the order of the cartesian product of the copairings
    of the split edges (edges sorted by id, copairing terms in blade order).
    """
    local = _prepare(c, A, psi)
    flow = build_flow(c, FlowMode.SINGLE_SINK, sink or _default_sink(c))
    split = [c.edge(eid) for eid in flow.split_edges]
    scalar = 1
    for e in c.compact_edges():
        scalar *= e.weight ** 2
    per_edge = [cotrace_terms(frobenius_basis(e.direction, c.rank)) for e in split]
    children = {v: flow.children(v) for v in c.vertex_ids}
    out = []
    for choice in itertools.product(*per_edge):
        extra: dict[str, list[tuple[int, Multivector]]] = {v: [] for v in c.vertex_ids}
        pieces = []
        for k, (e, (x, y)) in enumerate(zip(split, choice)):
            extra[e.tail].append((2 * k, x))
            extra[e.head].append((2 * k + 1, y))  # type: ignore[index]
            pieces += [(2 * k, x.degree() if x else 0), (2 * k + 1, y.degree() if y else 0)]
        if any(not x or not y for x, y in choice):
            out.append(0)
            continue

        def flat(v: str) -> list[int]:
            keys = [k for k, _ in extra[v]]
            for ch in children[v]:
                keys += flat(ch)
            return keys

        sign = _koszul(pieces, flat(flow.sink))  # type: ignore[arg-type]
        messages: dict[str, Multivector] = {}
        value = None
        for v in flow.order:
            p = local[v]
            for _, piece in extra[v]:
                p = wedge(p, piece)
            for ch in children[v]:
                p = wedge(p, messages[ch])
            parent_edge = flow.parent.get(v)
            if parent_edge is None:
                value = trace(p)
            else:
                messages[v] = _contract_edge(c.edge(parent_edge).direction, p)
        out.append(sign * scalar * (value or 0))
    return out


def evaluate_tree(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None,
                  sink: str | None = None) -> int:
    return sum(tree_terms(c, A, psi, sink))


def mult_trqft(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None,
               mode: str = "midpoint", sink: str | None = None) -> int:
    if mode == "midpoint":
        value = evaluate_midpoint(c, A, psi)
    elif mode == "tree":
        value = evaluate_tree(c, A, psi, sink)
    elif mode == "box":
        value = evaluate_box(c, A, psi, sink)
    else:
        raise PreconditionError(f"unknown evaluation mode {mode!r}")
    root = isqrt(value) if value >= 0 else -1
    if root * root != value:
        raise InvariantViolation(f"TrQFT value {value} is not a perfect square")
    return root


# ---------------------------------------------------------------------------
# box-class evaluation in genus 0


def evaluate_box(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None,
                 sink: str | None = None) -> int:
    """Tree evaluation that tracks every message as ``s * box(beta)``.

    Only genus 0 curves qualify: there the flow needs no copairings, so all
    intermediate classes stay inside the box subalgebra.
    """
    if not is_genus_zero_tree(c):
        raise PreconditionError("the box evaluation needs a genus 0 curve")
    local = _prepare(c, A, psi)
    flow = build_flow(c, FlowMode.SINGLE_SINK, sink or _default_sink(c), require_tree=True)
    r = c.rank
    forms = {v: Multivector.scalar(r) for v in c.vertex_ids}
    for i, eid in c.markings:
        v = c.edge(eid).tail
        forms[v] = wedge(forms[v], alpha_of(constraint_for(c, A, i)))
    messages: dict[str, tuple[int, Multivector, Multivector]] = {}
    for v in flow.order:
        s, beta, doubled = 1, forms[v], local[v]
        for ch in flow.children(v):
            cs, cbeta, cdoubled = messages[ch]
            s *= cs
            beta = wedge(beta, cbeta)
            doubled = wedge(doubled, cdoubled)
        _assert_box(doubled, s, beta)
        parent_edge = flow.parent.get(v)
        if parent_edge is None:
            return trace(doubled) * _edge_scalar(c)
        u = c.edge(parent_edge).direction
        beta = contract_vector(u, beta)
        doubled = _contract_edge(u, doubled)
        _assert_box(doubled, s, beta)
        messages[v] = (s, beta, doubled)
    raise PreconditionError("flow has no sink")  # pragma: no cover


def _edge_scalar(c: TropicalCurve) -> int:
    out = 1
    for e in c.compact_edges():
        out *= e.weight ** 2
    return out


def _assert_box(doubled: Multivector, s: int, beta: Multivector) -> None:
    expected = box(beta) * s if beta else Multivector.zero(doubled.rank)
    if doubled != expected:
        raise InvariantViolation("intermediate class is not the expected multiple of a box class")
