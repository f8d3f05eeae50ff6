"""Exterior algebra of a free abelian group with exact integer coefficients.

A blade is the wedge of standard generators in increasing order and is
encoded as a bitmask; bit ``i`` stands for generator ``i`` (0-based).  The
same class models both ``Lambda^* N`` and ``Lambda^* M``; contractions pair
a blade with the blade of the same mask.

The doubled algebra ``Lambda^*(L + L)`` of a rank ``r`` lattice ``L`` has
rank ``2r`` and interleaves the two copies: generator ``i`` of the first copy
sits at position ``2i`` and generator ``i`` of the second at ``2i + 1``.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import gcd
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import PreconditionError
from .lattice_core import (
    Sublattice,
    check_rank,
    integer_kernel,
    primitive_part,
    quotient_projection,
    rank_cap,
)


def reorder_sign(a: int, b: int) -> int:
    """Sign of ``e_a ^ e_b`` relative to the sorted blade ``e_{a|b}``.

    The caller guarantees ``a & b == 0``.  The sign is the parity of the
    number of pairs ``(i in a, j in b)`` with ``i > j``.
    """
    count = 0
    a >>= 1
    while a:
        count += (a & b).bit_count()
        a >>= 1
    return -1 if count & 1 else 1


def bits(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        if m >> i & 1:
            raise PreconditionError(f"repeated generator {i}")
        m |= 1 << i
    return m


@lru_cache(maxsize=None)
def _spread(mask: int, offset: int) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= 1 << (2 * i + offset)
        mask >>= 1
        i += 1
    return out


class Multivector:
    """An element of ``Lambda^* Z^rank``; immutable, zero terms never stored."""

    __slots__ = ("rank", "terms", "_hash")

    def __init__(self, rank: int, terms: Mapping[int, int] | Iterable[tuple[int, int]] = ()):
        if rank < 0 or rank > 2 * rank_cap():
            raise PreconditionError(f"exterior algebra rank {rank} outside [0, {2 * rank_cap()}]")
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[int, int] = {}
        top = 1 << rank
        for blade, c in items:
            if not 0 <= blade < top:
                raise PreconditionError(f"blade {blade:b} outside rank {rank}")
            acc[blade] = acc.get(blade, 0) + c
        self.rank = rank
        self.terms = {b: acc[b] for b in sorted(acc) if acc[b]}
        self._hash: int | None = None

    @classmethod
    def _raw(cls, rank: int, acc: dict[int, int]) -> "Multivector":
        out = object.__new__(cls)
        out.rank = rank
        out.terms = {b: acc[b] for b in sorted(acc) if acc[b]}
        out._hash = None
        return out

    # constructors -----------------------------------------------------------

    @classmethod
    def scalar(cls, rank: int, c: int = 1) -> "Multivector":
        return cls(rank, {0: c})

    @classmethod
    def zero(cls, rank: int) -> "Multivector":
        return cls(rank, {})

    @classmethod
    def generator(cls, rank: int, i: int) -> "Multivector":
        return cls(rank, {1 << i: 1})

    @classmethod
    def blade(cls, rank: int, indices: Iterable[int], c: int = 1) -> "Multivector":
        idx = list(indices)
        mask = mask_of(idx)
        sign = 1
        # sort the indices keeping track of the permutation sign
        for i in range(len(idx)):
            for j in range(i + 1, len(idx)):
                if idx[i] > idx[j]:
                    sign = -sign
        return cls(rank, {mask: sign * c})

    @classmethod
    def vector(cls, coords: Sequence[int]) -> "Multivector":
        return cls(len(coords), {1 << i: int(c) for i, c in enumerate(coords)})

    @classmethod
    def top(cls, rank: int) -> "Multivector":
        return cls(rank, {(1 << rank) - 1: 1})

    # inspection ------------------------------------------------------------

    def __iter__(self) -> Iterator[tuple[int, int]]:
        return iter(self.terms.items())

    def __len__(self) -> int:
        return len(self.terms)

    def __bool__(self) -> bool:
        return bool(self.terms)

    def coefficient(self, blade: int) -> int:
        return self.terms.get(blade, 0)

    def degrees(self) -> set[int]:
        return {b.bit_count() for b in self.terms}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        """Degree of a homogeneous element (0 for the zero element)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise PreconditionError("element is not homogeneous")
        return ds.pop() if ds else 0

    def grade(self, d: int) -> "Multivector":
        return Multivector._raw(self.rank, {b: c for b, c in self.terms.items() if b.bit_count() == d})

    def homogeneous_parts(self) -> dict[int, "Multivector"]:
        return {d: self.grade(d) for d in sorted(self.degrees())}

    def index(self) -> int:
        """The gcd of the coefficients (0 for the zero element)."""
        g = 0
        for c in self.terms.values():
            g = gcd(g, c)
        return g

    # arithmetic ------------------------------------------------------------

    def _check(self, other: "Multivector") -> None:
        if not isinstance(other, Multivector):
            raise TypeError(f"expected Multivector, got {type(other).__name__}")
        if other.rank != self.rank:
            raise PreconditionError(f"rank mismatch: {self.rank} vs {other.rank}")

    def __add__(self, other: "Multivector") -> "Multivector":
        self._check(other)
        acc = dict(self.terms)
        for b, c in other.terms.items():
            acc[b] = acc.get(b, 0) + c
        return Multivector._raw(self.rank, acc)

    def __sub__(self, other: "Multivector") -> "Multivector":
        return self + (-other)

    def __neg__(self) -> "Multivector":
        return Multivector._raw(self.rank, {b: -c for b, c in self.terms.items()})

    def __mul__(self, k: int) -> "Multivector":
        if not isinstance(k, int):
            return NotImplemented
        return Multivector._raw(self.rank, {b: k * c for b, c in self.terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "Multivector") -> "Multivector":
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Multivector):
            return NotImplemented
        return self.rank == other.rank and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.rank, tuple(self.terms.items())))
        return self._hash

    def __repr__(self) -> str:
        if not self.terms:
            return f"Multivector({self.rank}, 0)"
        parts = []
        for b, c in self.terms.items():
            name = "^".join(f"e{i}" for i in bits(b)) or "1"
            parts.append(f"{c}*{name}")
        return f"Multivector({self.rank}, {' + '.join(parts)})"


# ---------------------------------------------------------------------------
# products and contractions


def wedge(a: Multivector, b: Multivector) -> Multivector:
    a._check(b)
    acc: dict[int, int] = {}
    for ba, ca in a.terms.items():
        for bb, cb in b.terms.items():
            if ba & bb:
                continue
            key = ba | bb
            acc[key] = acc.get(key, 0) + reorder_sign(ba, bb) * ca * cb
    return Multivector._raw(a.rank, acc)


def wedge_all(items: Iterable[Multivector], rank: int) -> Multivector:
    out = Multivector.scalar(rank)
    for x in items:
        out = wedge(out, x)
    return out


def contract_blade(beta: Multivector, a: Multivector) -> Multivector:
    """Contraction of ``a`` by the homogeneous element ``beta``.

    On blades ``iota_{e_J} e_I = sign(J, I - J) e_{I - J}`` when ``J`` is a
    subset of ``I``, which is the adjoint of ``gamma -> beta ^ gamma`` for
    the standard pairing.  For vectors ``x, y`` this means
    ``iota_{x ^ y} = iota_y o iota_x``.
    """
    beta._check(a)
    if not beta.is_homogeneous():
        raise PreconditionError("contract_blade needs a homogeneous contractor")
    acc: dict[int, int] = {}
    for bj, cj in beta.terms.items():
        for bi, ci in a.terms.items():
            if bj & bi != bj:
                continue
            rest = bi & ~bj
            acc[rest] = acc.get(rest, 0) + reorder_sign(bj, rest) * cj * ci
    return Multivector._raw(a.rank, acc)


def contract_vector(n: Sequence[int], a: Multivector) -> Multivector:
    """Left contraction by a lattice vector; a degree -1 anti-derivation."""
    if len(n) != a.rank:
        raise PreconditionError(f"vector of length {len(n)} against rank {a.rank}")
    acc: dict[int, int] = {}
    nz = [(i, c) for i, c in enumerate(n) if c]
    for bi, ci in a.terms.items():
        for i, c in nz:
            bit = 1 << i
            if not bi & bit:
                continue
            below = (bi & (bit - 1)).bit_count()
            rest = bi ^ bit
            acc[rest] = acc.get(rest, 0) + (-c if below & 1 else c) * ci
    return Multivector._raw(a.rank, acc)


def pairing(a: Multivector, b: Multivector) -> int:
    """The standard pairing, making the blades an orthonormal basis."""
    a._check(b)
    return sum(c * b.terms.get(k, 0) for k, c in a.terms.items())


# ---------------------------------------------------------------------------
# doubling, squaring and the trace


def embed_first(a: Multivector) -> Multivector:
    """``a -> (a, 0)`` in the doubled algebra."""
    return Multivector._raw(2 * a.rank, {_spread(b, 0): c for b, c in a.terms.items()})


def embed_second(a: Multivector) -> Multivector:
    """``a -> (0, a)`` in the doubled algebra."""
    return Multivector._raw(2 * a.rank, {_spread(b, 1): c for b, c in a.terms.items()})


def doubled_vector_blade(n: Sequence[int]) -> Multivector:
    """The degree 2 element ``(n, 0) ^ (0, n)`` of the doubled algebra."""
    v = Multivector.vector(n)
    return wedge(embed_first(v), embed_second(v))


def box(a: Multivector) -> Multivector:
    """The squaring map, ``(-1)^{d(d-1)/2} (a, 0) ^ (0, a)`` for degree ``d``.

    Degree 0 elements are squared.  Only homogeneous inputs are accepted.
    """
    if not a.is_homogeneous():
        raise PreconditionError("box needs a homogeneous element")
    d = a.degree()
    if d == 0:
        c = a.coefficient(0)
        return Multivector.scalar(2 * a.rank, c * c)
    out = wedge(embed_first(a), embed_second(a))
    return -out if (d * (d - 1) // 2) & 1 else out


def theta(rank: int) -> Multivector:
    """The orientation ``e_1 ^ ... ^ e_rank``."""
    return Multivector.top(rank)


def theta_box(rank: int) -> Multivector:
    return box(theta(rank))


def trace(a: Multivector) -> int:
    """Coefficient of ``Theta^box`` in an element of a doubled algebra."""
    if a.rank % 2:
        raise PreconditionError("trace is only defined on a doubled algebra")
    full = (1 << a.rank) - 1
    norm = theta_box(a.rank // 2).coefficient(full)
    return a.coefficient(full) * norm


def relative_coefficient(a: Multivector, unit: Multivector) -> int:
    """The integer ``k`` with ``a == k * unit``; errors if there is none."""
    a._check(unit)
    if not unit:
        raise PreconditionError("reference element is zero")
    if not a:
        return 0
    b0, c0 = next(iter(unit.terms.items()))
    k, rem = divmod(a.coefficient(b0), c0)
    if rem or a != unit * k:
        raise PreconditionError("element is not an integer multiple of the reference")
    return k


# ---------------------------------------------------------------------------
# Frobenius structure: bases, coproducts


def frobenius_basis(n: Sequence[int] | None, rank: int) -> list[Multivector]:
    """Ordered degree 1 basis ``f_1..f_k`` of ``M_n + M_n`` with ``f_1^...^f_k = Theta_n^box``.

    For ``n`` zero (or ``None``) this is the standard basis of the doubled
    algebra.  Otherwise it is ``(m_1,0),(0,m_1),(m_2,0),...`` for a Hermite
    basis ``m_j`` of the annihilator of ``n``.
    """
    check_rank(rank)
    if n is None or not any(n):
        return [Multivector.generator(2 * rank, i) for i in range(2 * rank)]
    if len(n) != rank:
        raise PreconditionError("direction rank mismatch")
    u = primitive_part(n)
    out = []
    for m in quotient_projection(Sublattice(rank, (u,))):
        v = Multivector.vector(m)
        out.append(embed_first(v))
        out.append(embed_second(v))
    return out


def theta_n_box(n: Sequence[int] | None, rank: int) -> Multivector:
    return wedge_all(frobenius_basis(n, rank), 2 * rank)


def cotrace_terms(basis: Sequence[Multivector]) -> list[tuple[Multivector, Multivector]]:
    """The coproduct of 1 for the Frobenius algebra generated by ``basis``.

    Returns ``sum_{I1 + I2} sign(I2, I1) f_{I1} (x) f_{I2}`` as a list of pairs,
    ordered by the bitmask of ``I1`` (descending, so ``f_top (x) 1`` is first).
    """
    if not basis:
        raise PreconditionError("empty Frobenius basis")
    rank = basis[0].rank
    k = len(basis)
    full = (1 << k) - 1
    terms = []
    for i1 in range(full, -1, -1):
        i2 = full ^ i1
        sign = reorder_sign(i2, i1)
        x = wedge_all((basis[i] for i in bits(i1)), rank)
        y = wedge_all((basis[i] for i in bits(i2)), rank)
        terms.append((x * sign, y))
    return terms


def coproduct(z: Multivector, basis: Sequence[Multivector] | None = None) -> list[tuple[Multivector, Multivector]]:
    """``vee(z) = (z (x) 1) . vee(1)`` as a list of nonzero pairs.

    Without ``basis`` the ambient doubled algebra ``C_0`` is used.
    """
    if z.rank % 2:
        raise PreconditionError("coproduct is only defined on a doubled algebra")
    if basis is None:
        basis = frobenius_basis(None, z.rank // 2)
    out = []
    for x, y in cotrace_terms(basis):
        zx = wedge(z, x)
        if zx:
            out.append((zx, y))
    return out


def tensor_terms(pairs: Iterable[tuple[Multivector, Multivector]]) -> dict[tuple[int, int], int]:
    """Expand a list of pairs into coefficients on ``blade (x) blade``."""
    acc: dict[tuple[int, int], int] = {}
    for x, y in pairs:
        for bx, cx in x.terms.items():
            for by, cy in y.terms.items():
                key = (bx, by)
                acc[key] = acc.get(key, 0) + cx * cy
    return {k: v for k, v in sorted(acc.items()) if v}


def box_coproduct(index_set: Iterable[int], basis: Sequence[Multivector]) -> list[tuple[Multivector, Multivector]]:
    """Coproduct of ``e_I^box`` in the subalgebra spanned by the classes ``e_K^box``.

    ``basis`` is a degree 1 basis ``e_j`` of the undoubled lattice ``M_n``.
    Since ``e_I^box e_K^box`` is ``e_J^box`` for ``K = J - I`` and 0 otherwise,
    the result is ``sum_{I1 + I2 = J - I} e_{I u I1}^box (x) e_{I u I2}^box``.
    For ``I`` empty this is the splitting of the unit.
    """
    if not basis:
        raise PreconditionError("empty basis")
    chosen = sorted(set(index_set))
    rest = [j for j in range(len(basis)) if j not in chosen]
    rank = basis[0].rank
    out = []
    for size in range(len(rest) + 1):
        for part in combinations(rest, size):
            other = [j for j in rest if j not in part]
            x = box(wedge_all((basis[j] for j in sorted(chosen + list(part))), rank))
            y = box(wedge_all((basis[j] for j in sorted(chosen + other)), rank))
            out.append((x, y))
    return out


# ---------------------------------------------------------------------------
# forms attached to sublattices


def normalize_sign(a: Multivector) -> Multivector:
    """Flip ``a`` so that its first coefficient in blade order is positive."""
    for c in a.terms.values():
        return -a if c < 0 else a
    return a


def alpha_from_subspace(w: Sublattice, weight: int = 1) -> Multivector:
    """A form of degree ``codim w`` and index ``weight`` killed by every ``iota_v``, ``v in w``."""
    if weight < 1:
        raise PreconditionError(f"weight must be positive, got {weight}")
    if not w.is_saturated():
        raise PreconditionError("alpha_from_subspace needs a saturated sublattice")
    rank = w.ambient_rank
    rows = quotient_projection(w)
    form = wedge_all((Multivector.vector(m) for m in rows), rank)
    return normalize_sign(form) * weight


def annihilated_lattice(a: Multivector) -> Sublattice:
    """Saturated sublattice ``{v : iota_v a == 0}`` of ``Z^rank``."""
    rank = a.rank
    if not a:
        raise PreconditionError("the zero form annihilates everything")
    # column j of the matrix is iota_{e_j} a written in blade coordinates
    cols = [contract_vector(tuple(1 if i == j else 0 for i in range(rank)), a) for j in range(rank)]
    blades = sorted({b for c in cols for b in c.terms})
    if not blades:
        return Sublattice.full(rank)
    m = tuple(tuple(c.coefficient(b) for c in cols) for b in blades)
    return Sublattice(rank, integer_kernel(m, rank))
