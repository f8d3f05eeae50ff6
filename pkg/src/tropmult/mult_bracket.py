"""Genus 0 multiplicities by pushing polyvector fields along a flow.

Each end ``E_i`` starts with ``z^{Delta(i)} alpha_i``.  A vertex sends the
bracket of everything flowing into it along its outgoing edge, and the sink
multiplies its inputs; the multiplicity is the absolute value of the
resulting top-degree coefficient.
"""

from __future__ import annotations

from .constraints import Constraints, alpha_of, constraint_for
from .errors import InvariantViolation, PreconditionError
from .exterior_algebra import Multivector, annihilated_lattice, contract_vector
from .lattice_core import IntVector, Sublattice
from .mult_index import require_rigid
from .polyvector import PolyvectorField, ell_k, l_k, product
from .tropical_curve import FlowMode, PsiVector, TropicalCurve, build_flow, is_genus_zero_tree


class PropagationError(PreconditionError):
    """A bracket vanished before reaching the sink."""


def _require_genus_zero(c: TropicalCurve) -> None:
    if not is_genus_zero_tree(c):
        raise PreconditionError("the bracket method needs a genus 0 curve")


def _end_field(c: TropicalCurve, A: Constraints, i: int) -> PolyvectorField:
    return PolyvectorField.monomial(c.delta(i), alpha_of(constraint_for(c, A, i), c.delta(i)))


def _propagate(c: TropicalCurve, A: Constraints, sink: str,
               bracket=ell_k) -> tuple[dict[str, PolyvectorField], list[PolyvectorField]]:
    """Fields on every edge flowing towards ``sink`` and the inputs at the sink."""
    flow = build_flow(c, FlowMode.SINGLE_SINK, sink, require_tree=True)
    fields: dict[str, PolyvectorField] = {}
    for i, eid in c.markings:
        fields[eid] = _end_field(c, A, i)
    sink_inputs: list[PolyvectorField] = []
    for v in flow.order:
        incoming = [fields[eid] for _, eid in c.markings if c.edge(eid).tail == v]
        incoming += [fields[flow.parent[ch]] for ch in flow.children(v)]
        out_edge = flow.parent.get(v)
        if out_edge is None:
            sink_inputs = incoming
            break
        e = c.edge(out_edge)
        parent = flow.parent_vertex(v)
        n_e = _outward_weighted(e, parent)  # type: ignore[arg-type]
        zeta = bracket(incoming) if incoming else PolyvectorField.zero(c.rank)
        if not zeta:
            raise PropagationError(f"the field on edge {e.id} vanished; the curve is not rigid for these constraints")
        if set(zeta.terms) != {n_e}:
            raise InvariantViolation(f"edge {e.id}: exponent {sorted(zeta.terms)} is not the weighted direction {n_e}")
        if not zeta.in_a0():
            raise InvariantViolation(f"edge {e.id}: field is not killed by l_1")
        fields[e.id] = zeta
    return fields, sink_inputs


def _outward_weighted(e, from_vertex: str) -> IntVector:
    u = e.outward(from_vertex)[0]
    return tuple(e.weight * x for x in u)


def propagate(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None,
              sink: str | None = None) -> dict[str, PolyvectorField]:
    _require_genus_zero(c)
    require_rigid(c, A, psi)
    fields, _ = _propagate(c, A, sink or c.vertex_ids[-1])
    return fields


def mult_bracket(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None,
                 sink: str | None = None, signed_brackets: bool = False) -> int:
    """``|<Omega, prod of the fields entering the sink>|``.

    ``signed_brackets`` switches from ``ell_k`` to ``l_k``; only signs change.
    """
    _require_genus_zero(c)
    require_rigid(c, A, psi)
    _, inputs = _propagate(c, A, sink or c.vertex_ids[-1], l_k if signed_brackets else ell_k)
    total = product(inputs) if inputs else PolyvectorField.constant(c.rank)
    zero = (0,) * c.rank
    if set(total.terms) - {zero}:
        raise InvariantViolation("sink product has a nonzero exponent")
    top = total.terms.get(zero, Multivector.zero(c.rank))
    full = (1 << c.rank) - 1
    if set(top.terms) - {full}:
        raise InvariantViolation("sink product is not of top degree")
    return abs(top.coefficient(full))


def edge_form(c: TropicalCurve, A: Constraints, edge: str, into: str) -> Multivector:
    """The form ``alpha_E`` carried by a compact ``edge`` flowing into ``into`` (up to sign)."""
    _require_genus_zero(c)
    e = c.edge(edge)
    if not e.bounded or into not in (e.tail, e.head):
        raise PreconditionError(f"edge {edge} is not a compact edge at vertex {into}")
    fields, _ = _propagate(c, A, into)
    field = fields[edge]
    return field.terms[next(iter(field.terms))]


def w_subspace(c: TropicalCurve, A: Constraints, edge: str, into: str) -> Sublattice:
    """Directions swept by ``edge`` when it is driven by the side away from ``into``.

    For an end this is the span of its constraint.  For a compact edge the
    subtree on the far side is propagated and ``W`` is the saturated
    annihilator of the resulting form.
    """
    _require_genus_zero(c)
    e = c.edge(edge)
    if into not in (e.tail, e.head):
        raise PreconditionError(f"edge {edge} does not meet vertex {into}")
    if not e.bounded:
        return constraint_for(c, A, c.index_of_edge(edge)).span
    alpha = edge_form(c, A, edge, into)
    if contract_vector(e.direction, alpha):  # pragma: no cover - guarded by in_a0
        raise InvariantViolation("edge direction does not lie in W")
    return annihilated_lattice(alpha)
