"""Affine incidence conditions attached to marked ends."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import PreconditionError
from .exterior_algebra import Multivector, alpha_from_subspace
from .lattice_core import (
    IntVector,
    Sublattice,
    primitive_index,
    quotient_projection,
    saturate,
)
from .tropical_curve import PsiVector, TropicalCurve, expected_dimension, psi_check, require_valid


@dataclass(frozen=True)
class AffineConstraint:
    """An affine subspace ``translation + span`` carrying an integer weight."""

    span: Sublattice
    translation: tuple[Fraction, ...] | None = None
    weight: int = 1

    def __post_init__(self) -> None:
        if not self.span.is_saturated():
            raise PreconditionError("constraint span must be saturated")
        if self.weight < 1:
            raise PreconditionError("constraint weight must be positive")
        if self.translation is not None:
            t = tuple(Fraction(x) for x in self.translation)
            if len(t) != self.span.ambient_rank:
                raise PreconditionError("translation has the wrong length")
            object.__setattr__(self, "translation", t)

    @property
    def rank(self) -> int:
        return self.span.ambient_rank

    @property
    def codim(self) -> int:
        return self.span.codim

    @classmethod
    def trivial(cls, rank: int) -> "AffineConstraint":
        return cls(Sublattice.full(rank))

    @classmethod
    def point(cls, rank: int, at: Sequence | None = None, weight: int = 1) -> "AffineConstraint":
        return cls(Sublattice.zero(rank), None if at is None else tuple(at), weight)

    @classmethod
    def spanned(cls, vectors: Sequence[Sequence[int]], rank: int, at: Sequence | None = None,
                weight: int = 1) -> "AffineConstraint":
        """The saturation of the span of ``vectors``."""
        return cls(saturate(Sublattice(rank, tuple(tuple(v) for v in vectors))),
                   None if at is None else tuple(at), weight)

    @classmethod
    def through(cls, direction: Sequence[int], at: Sequence | None = None) -> "AffineConstraint":
        """The line spanned by ``direction``, weighted by its lattice index."""
        g = primitive_index(direction)
        if g == 0:
            raise PreconditionError("a line condition needs a nonzero direction")
        return cls.spanned([direction], len(direction), at, g)


Constraints = Mapping[int, AffineConstraint]


def constraint_for(c: TropicalCurve, A: Constraints, i: int) -> AffineConstraint:
    return A.get(i) or AffineConstraint.trivial(c.rank)


def check_constraints(c: TropicalCurve, A: Constraints) -> None:
    marked = c.marking_map
    for i, a in A.items():
        if i not in marked:
            raise PreconditionError(f"constraint on unknown marking {i}")
        if a.rank != c.rank:
            raise PreconditionError(f"constraint {i} lives in rank {a.rank}, curve in rank {c.rank}")
        if not a.span.contains_rational(c.delta(i)):
            raise PreconditionError(
                f"marking {i}: the end direction {c.delta(i)} does not lie in the constraint span"
            )


def alpha_of(a: AffineConstraint, delta: IntVector | None = None) -> Multivector:
    if delta is not None and not a.span.contains_rational(delta):
        raise PreconditionError(f"direction {delta} does not lie in the constraint span")
    return alpha_from_subspace(a.span, a.weight)


def weight_product(c: TropicalCurve, A: Constraints) -> int:
    out = 1
    for i in c.marking_map:
        out *= constraint_for(c, A, i).weight
    return out


def codim_total(c: TropicalCurve, A: Constraints) -> int:
    return sum(constraint_for(c, A, i).codim for i in c.marking_map)


def rigidity_dimension_check(c: TropicalCurve, A: Constraints, psi: PsiVector | None = None) -> bool:
    """Whether the codimensions of the constraints add up to the expected dimension.

    When ``psi`` is given its inequalities must hold as well.
    """
    require_valid(c)
    check_constraints(c, A)
    if psi and not all(s.ok for s in psi_check(c, psi).values()):
        return False
    return codim_total(c, A) == expected_dimension(c)


# ---------------------------------------------------------------------------
# realizability


def _solve(rows: list[list[Fraction]], rhs: list[Fraction], n: int,
           free_value: Fraction) -> list[Fraction] | None:
    """One rational solution of ``rows @ x == rhs``; free variables get ``free_value``."""
    aug = [row[:] + [b] for row, b in zip(rows, rhs)]
    pivots: list[int] = []
    r = 0
    for col in range(n):
        p = next((i for i in range(r, len(aug)) if aug[i][col] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        piv = aug[r][col]
        aug[r] = [x / piv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(col)
        r += 1
    if any(all(x == 0 for x in row[:n]) and row[n] != 0 for row in aug):
        return None
    pivot_set = set(pivots)
    x = [Fraction(0) if j in pivot_set else free_value for j in range(n)]
    for k, col in enumerate(pivots):
        row = aug[k]
        x[col] = row[n] - sum(row[j] * x[j] for j in range(n) if j not in pivot_set)
    return x


def realizability_solve(c: TropicalCurve, A: Constraints) -> dict | None:
    """Rational vertex positions and positive edge lengths matching ``A``, if found.

    For rigid curves the linear system has a unique solution and the answer
    is exact.  Otherwise a few deterministic choices of the free parameters
    are tried, so ``None`` then only means no such choice worked.
    """
    require_valid(c)
    check_constraints(c, A)
    r = c.rank
    vids = c.vertex_ids
    compact = c.compact_edges()
    nv = r * len(vids)
    n = nv + len(compact)
    col = {v: k * r for k, v in enumerate(vids)}
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for k, e in enumerate(compact):
        for j in range(r):
            row = [Fraction(0)] * n
            row[col[e.head] + j] += 1  # type: ignore[index]
            row[col[e.tail] + j] -= 1
            row[nv + k] -= e.direction[j]
            rows.append(row)
            rhs.append(Fraction(0))
    for i, eid in c.markings:
        a = constraint_for(c, A, i)
        t = a.translation or (Fraction(0),) * r
        v = c.edge(eid).tail
        for q in quotient_projection(a.span):
            row = [Fraction(0)] * n
            for j in range(r):
                row[col[v] + j] = Fraction(q[j])
            rows.append(row)
            rhs.append(sum(Fraction(q[j]) * t[j] for j in range(r)))
    for free in (Fraction(1), Fraction(2), Fraction(1, 2), Fraction(3), Fraction(7, 3)):
        x = _solve(rows, rhs, n, free)
        if x is None:
            return None
        lengths = x[nv:]
        if all(ell > 0 for ell in lengths):
            return {
                "positions": {v: tuple(x[col[v]:col[v] + r]) for v in vids},
                "lengths": {e.id: ell for e, ell in zip(compact, lengths)},
            }
    return None
