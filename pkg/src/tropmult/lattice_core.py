"""Exact integer linear algebra over free abelian groups of small rank.

Matrices are tuples of rows of Python ints, so arithmetic never overflows.
A matrix ``m`` with ``r`` rows and ``c`` columns is read as the map
``Z^c -> Z^r`` sending a column vector ``x`` to ``m @ x``.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence

from .errors import PreconditionError

IntVector = tuple[int, ...]
IntMatrix = tuple[tuple[int, ...], ...]

DEFAULT_RANK_CAP = 8


def rank_cap() -> int:
    """Largest lattice rank accepted, overridable with ``TROPMULT_RANK_CAP``."""
    raw = os.environ.get("TROPMULT_RANK_CAP")
    if raw is None:
        return DEFAULT_RANK_CAP
    try:
        cap = int(raw)
    except ValueError as exc:
        raise PreconditionError(f"TROPMULT_RANK_CAP must be an integer, got {raw!r}") from exc
    if cap < 1:
        raise PreconditionError("TROPMULT_RANK_CAP must be positive")
    return cap


def check_rank(rank: int) -> None:
    if rank < 0:
        raise PreconditionError(f"negative lattice rank {rank}")
    if rank > rank_cap():
        raise PreconditionError(f"lattice rank {rank} exceeds the cap {rank_cap()}")


# ---------------------------------------------------------------------------
# small matrix helpers


def as_matrix(rows: Iterable[Iterable[int]]) -> IntMatrix:
    m = tuple(tuple(int(x) for x in row) for row in rows)
    if m and any(len(row) != len(m[0]) for row in m):
        raise PreconditionError("ragged matrix")
    return m


def shape(m: IntMatrix, ncols: int | None = None) -> tuple[int, int]:
    if not m:
        return 0, (ncols or 0)
    return len(m), len(m[0])


def identity(n: int) -> IntMatrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m: IntMatrix, ncols: int = 0) -> IntMatrix:
    if not m:
        return tuple(() for _ in range(ncols))
    return tuple(zip(*m))


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(m: IntMatrix, v: Sequence[int]) -> IntVector:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def determinant(m: IntMatrix) -> int:
    """Fraction-free Gaussian elimination (Bareiss)."""
    n = len(m)
    if n == 0:
        return 1
    if any(len(row) != n for row in m):
        raise PreconditionError("determinant of a non-square matrix")
    a = [list(row) for row in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith and Hermite normal forms


def _snf(m: IntMatrix, ncols: int) -> tuple[list[list[int]], list[list[int]], list[list[int]], list[list[int]]]:
    """Return ``(u, d, v, v_inv)`` with ``u @ m @ v == d``."""
    rows = len(m)
    cols = ncols
    a = [list(row) for row in m]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]
    vi = [list(r) for r in identity(cols)]

    def swap_rows(i: int, j: int) -> None:
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i: int, j: int) -> None:
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]
        vi[i], vi[j] = vi[j], vi[i]

    def add_row(dst: int, src: int, q: int) -> None:
        # row_dst += q * row_src
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst: int, src: int, q: int) -> None:
        # col_dst += q * col_src; the inverse gets row_src -= q * row_dst
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]
        vi[src] = [x - q * y for x, y in zip(vi[src], vi[dst])]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                break
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(i, t, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(j, t, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return u, a, v, vi


def smith_normal_form(m: IntMatrix, ncols: int | None = None) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form ``(u, d, v)`` with ``u @ m @ v == d``.

    ``u`` and ``v`` are unimodular, ``d`` is diagonal with non-negative
    entries and each diagonal entry divides the next.
    """
    m = as_matrix(m)
    _, c = shape(m, ncols)
    u, d, v, _ = _snf(m, c)
    return as_matrix(u), as_matrix(d), as_matrix(v)


def invariant_factors(m: IntMatrix, ncols: int | None = None) -> tuple[int, ...]:
    m = as_matrix(m)
    r, c = shape(m, ncols)
    _, d, _, _ = _snf(m, c)
    return tuple(d[i][i] for i in range(min(r, c)))


def matrix_rank(m: IntMatrix, ncols: int | None = None) -> int:
    return sum(1 for x in invariant_factors(m, ncols) if x)


def hermite_rows(vectors: Iterable[Sequence[int]], ncols: int) -> IntMatrix:
    """Row-style Hermite normal form of the lattice spanned by ``vectors``.

    Pivots are positive and the entries above each pivot are reduced into
    ``[0, pivot)``; zero rows are dropped, so the result is a basis.
    """
    a = [list(v) for v in vectors if any(v)]
    out: list[list[int]] = []
    col = 0
    while a and col < ncols:
        live = [row for row in a if row[col]]
        rest = [row for row in a if not row[col]]
        if not live:
            col += 1
            continue
        while len(live) > 1:
            live.sort(key=lambda row: abs(row[col]))
            piv = live[0]
            nxt = [piv]
            for row in live[1:]:
                q = row[col] // piv[col]
                row = [x - q * y for x, y in zip(row, piv)]
                if row[col]:
                    nxt.append(row)
                elif any(row):
                    rest.append(row)
            live = nxt
        piv = live[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        for k, row in enumerate(out):
            q = row[col] // piv[col]
            if q:
                out[k] = [x - q * y for x, y in zip(row, piv)]
        out.append(piv)
        a = rest
        col += 1
    return as_matrix(out)


def integer_kernel(m: IntMatrix, ncols: int) -> IntMatrix:
    """Hermite basis (as rows) of ``{x in Z^ncols : m @ x == 0}``; always saturated."""
    m = as_matrix(m)
    if not m:
        return identity(ncols)
    _, d, v, _ = _snf(m, ncols)
    rk = sum(1 for i in range(min(len(m), ncols)) if d[i][i])
    basis = [[v[i][j] for i in range(ncols)] for j in range(rk, ncols)]
    return hermite_rows(basis, ncols)


def right_inverse(p: IntMatrix, ncols: int) -> IntMatrix:
    """Integer ``s`` with ``p @ s == I`` for a surjective ``p``."""
    p = as_matrix(p)
    k = len(p)
    if k == 0:
        return tuple(() for _ in range(ncols))
    u, d, v, _ = _snf(p, ncols)
    if any(d[i][i] != 1 for i in range(k)):
        raise PreconditionError("map is not surjective onto the integer lattice")
    # p = u^-1 [I 0] v^-1, so s = v [I; 0] u
    top = [row[:k] for row in v]
    return matmul(as_matrix(top), as_matrix(u))


# ---------------------------------------------------------------------------
# lattice maps and sublattices


def index_of_map(m: IntMatrix, ncols: int | None = None) -> int:
    """Index of the image of ``m`` in its codomain, or 0 if not finite-index.

    Only square maps of full rank count as finite-index inclusions.
    """
    m = as_matrix(m)
    r, c = shape(m, ncols)
    if r != c:
        return 0
    if r == 0:
        return 1
    return abs(determinant(m))


def primitive_index(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def primitive_part(v: Sequence[int]) -> IntVector:
    g = primitive_index(v)
    if g == 0:
        raise PreconditionError("zero vector has no primitive part")
    return tuple(x // g for x in v)


@dataclass(frozen=True)
class Sublattice:
    """A subgroup of ``Z^ambient_rank`` given by generators."""

    ambient_rank: int
    generators: tuple[IntVector, ...] = ()

    def __post_init__(self) -> None:
        check_rank(self.ambient_rank)
        gens = tuple(tuple(int(x) for x in g) for g in self.generators)
        for g in gens:
            if len(g) != self.ambient_rank:
                raise PreconditionError(
                    f"generator {g} does not live in rank {self.ambient_rank}"
                )
        object.__setattr__(self, "generators", gens)

    @classmethod
    def full(cls, rank: int) -> "Sublattice":
        return cls(rank, identity(rank))

    @classmethod
    def zero(cls, rank: int) -> "Sublattice":
        return cls(rank, ())

    @property
    def rank(self) -> int:
        if not self.generators:
            return 0
        return matrix_rank(self.generators, self.ambient_rank)

    @property
    def codim(self) -> int:
        return self.ambient_rank - self.rank

    def is_saturated(self) -> bool:
        if not self.generators:
            return True
        return all(x in (0, 1) for x in invariant_factors(self.generators, self.ambient_rank))

    def contains_rational(self, v: Sequence[int]) -> bool:
        """Whether ``v`` lies in the rational span of the generators."""
        if not any(v):
            return True
        if not self.generators:
            return False
        return matrix_rank(self.generators + (tuple(v),), self.ambient_rank) == self.rank

    def basis(self) -> IntMatrix:
        return hermite_rows(self.generators, self.ambient_rank)


def saturate(s: Sublattice) -> Sublattice:
    """The saturation (rational span intersected with the lattice), in Hermite form."""
    n = s.ambient_rank
    if not any(any(g) for g in s.generators):
        return Sublattice(n, ())
    _, d, _, vi = _snf(as_matrix(s.generators), n)
    rk = sum(1 for i in range(min(len(s.generators), n)) if d[i][i])
    return Sublattice(n, hermite_rows(vi[:rk], n))


def quotient_projection(w: Sublattice) -> IntMatrix:
    """Matrix of ``N -> N/W`` in a Hermite-normalized basis of the quotient.

    The rows form a basis of the annihilator of ``W`` in the dual lattice.
    """
    if not w.is_saturated():
        raise PreconditionError("quotient_projection needs a saturated sublattice")
    if not w.generators:
        return identity(w.ambient_rank)
    return integer_kernel(w.generators, w.ambient_rank)


def annihilator(w: Sublattice) -> Sublattice:
    """The saturated sublattice of the dual lattice vanishing on ``w``."""
    gens = w.generators
    if not gens:
        return Sublattice.full(w.ambient_rank)
    return Sublattice(w.ambient_rank, integer_kernel(gens, w.ambient_rank))


def intersection_index(ambient_rank: int, subspaces: Sequence[Sublattice]) -> int:
    """Index of ``L -> (+)_i L/(L cap A_i)``, 0 when it is not finite-index."""
    rows: list[IntVector] = []
    for s in subspaces:
        if s.ambient_rank != ambient_rank:
            raise PreconditionError("subspace rank mismatch")
        rows.extend(quotient_projection(s))
    return index_of_map(as_matrix(rows), ambient_rank)


def unimodular_completion(u: Sequence[int]) -> IntMatrix:
    """A unimodular matrix (as rows) whose last row is the primitive vector ``u``."""
    n = len(u)
    if primitive_index(u) != 1:
        raise PreconditionError(f"{tuple(u)} is not primitive")
    # ann: N -> Z^(n-1) is onto with kernel Zu, so a section completes u
    ann = integer_kernel((tuple(u),), n)
    sec = right_inverse(ann, n) if ann else tuple(() for _ in range(n))
    basis = [tuple(sec[i][j] for i in range(n)) for j in range(n - 1)]
    basis.append(tuple(u))
    if abs(determinant(as_matrix(basis))) != 1:  # pragma: no cover - defensive
        raise PreconditionError("failed to complete vector to a basis")
    return as_matrix(basis)
