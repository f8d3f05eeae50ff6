"""Polyvector fields ``Z[N] (x) Lambda^* M`` with their brackets.

A monomial ``z^n alpha`` has degree ``deg alpha`` and shifted degree
``|z^n alpha| = deg alpha - 1``.  Contraction ``iota_n`` pairs ``N`` with
``M`` through the standard bases.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Iterator, Mapping, Sequence

from .errors import PreconditionError
from .exterior_algebra import Multivector, contract_blade, contract_vector, reorder_sign, wedge
from .lattice_core import IntVector, Sublattice, check_rank, quotient_projection, primitive_part

MAX_ARITY = 8


class PolyvectorField:
    """A finite sum ``sum_n z^n alpha_n``; values are nonzero multivectors."""

    __slots__ = ("rank", "terms")

    def __init__(self, rank: int, terms: Mapping[IntVector, Multivector] | Iterable[tuple[IntVector, Multivector]] = ()):
        check_rank(rank)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[IntVector, Multivector] = {}
        for n, a in items:
            n = tuple(int(x) for x in n)
            if len(n) != rank or a.rank != rank:
                raise PreconditionError("polyvector term has the wrong rank")
            acc[n] = acc[n] + a if n in acc else a
        self.rank = rank
        self.terms = {n: acc[n] for n in sorted(acc) if acc[n]}

    @classmethod
    def _raw(cls, rank: int, acc: dict[IntVector, Multivector]) -> "PolyvectorField":
        """Trusted constructor: keys are int tuples of the right length."""
        out = object.__new__(cls)
        out.rank = rank
        out.terms = {n: acc[n] for n in sorted(acc) if acc[n]}
        return out

    @classmethod
    def monomial(cls, n: Sequence[int], alpha: Multivector) -> "PolyvectorField":
        return cls(alpha.rank, [(tuple(n), alpha)])

    @classmethod
    def zero(cls, rank: int) -> "PolyvectorField":
        return cls(rank)

    @classmethod
    def constant(cls, rank: int, c: int = 1) -> "PolyvectorField":
        return cls.monomial((0,) * rank, Multivector.scalar(rank, c))

    def __iter__(self) -> Iterator[tuple[IntVector, Multivector]]:
        return iter(self.terms.items())

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def _check(self, other: "PolyvectorField") -> None:
        if not isinstance(other, PolyvectorField) or other.rank != self.rank:
            raise PreconditionError("polyvector rank mismatch")

    def __add__(self, other: "PolyvectorField") -> "PolyvectorField":
        self._check(other)
        acc = dict(self.terms)
        for n, a in other.terms.items():
            acc[n] = acc[n] + a if n in acc else a
        return PolyvectorField._raw(self.rank, acc)

    def __sub__(self, other: "PolyvectorField") -> "PolyvectorField":
        return self + (-other)

    def __neg__(self) -> "PolyvectorField":
        return PolyvectorField._raw(self.rank, {n: -a for n, a in self.terms.items()})

    def __mul__(self, k: int) -> "PolyvectorField":
        if not isinstance(k, int):
            return NotImplemented
        return PolyvectorField._raw(self.rank, {n: a * k for n, a in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        return isinstance(other, PolyvectorField) and self.rank == other.rank and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.rank, tuple(self.terms.items())))

    def __repr__(self) -> str:
        if not self.terms:
            return f"PolyvectorField({self.rank}, 0)"
        parts = [f"z^{n}*({a!r})" for n, a in self.terms.items()]
        return f"PolyvectorField({self.rank}, {' + '.join(parts)})"

    def degrees(self) -> set[int]:
        return {d for a in self.terms.values() for d in a.degrees()}

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def degree(self) -> int:
        ds = self.degrees()
        if len(ds) != 1:
            raise PreconditionError("element is not homogeneous (or is zero)")
        return next(iter(ds))

    def shifted_degree(self) -> int:
        return self.degree() - 1

    def homogeneous_parts(self) -> dict[int, "PolyvectorField"]:
        out: dict[int, PolyvectorField] = {}
        for d in sorted(self.degrees()):
            out[d] = PolyvectorField._raw(self.rank, {n: a.grade(d) for n, a in self.terms.items()})
        return out

    def monomials(self) -> Iterator["PolyvectorField"]:
        """Homogeneous single-exponent pieces."""
        for n, a in self.terms.items():
            for d, part in a.homogeneous_parts().items():
                yield PolyvectorField(self.rank, [(n, part)])

    def in_a0(self) -> bool:
        """Membership in the kernel of ``l_1``, tested exponent by exponent."""
        return all(not contract_vector(n, a) for n, a in self.terms.items())


def _same_rank(items: Sequence[PolyvectorField]) -> int:
    if not items:
        raise PreconditionError("need at least one argument")
    r = items[0].rank
    for x in items:
        if x.rank != r:
            raise PreconditionError("polyvector rank mismatch")
    return r


def _check_arity(k: int) -> None:
    if k < 1 or k > MAX_ARITY:
        raise PreconditionError(f"arity {k} outside 1..{MAX_ARITY}")


def multiply(a: PolyvectorField, b: PolyvectorField) -> PolyvectorField:
    a._check(b)
    acc: dict[IntVector, Multivector] = {}
    for n1, x in a.terms.items():
        for n2, y in b.terms.items():
            n = tuple(p + q for p, q in zip(n1, n2))
            xy = wedge(x, y)
            acc[n] = acc[n] + xy if n in acc else xy
    return PolyvectorField._raw(a.rank, acc)


def product(items: Sequence[PolyvectorField]) -> PolyvectorField:
    _same_rank(items)
    out = items[0]
    for x in items[1:]:
        out = multiply(out, x)
    return out


def ell_1(a: PolyvectorField) -> PolyvectorField:
    return PolyvectorField._raw(a.rank, {n: contract_vector(n, x) for n, x in a.terms.items()})


def ell_k(args: Sequence[PolyvectorField]) -> PolyvectorField:
    """``l_1`` of the product; multilinear because ``l_1`` is linear."""
    _check_arity(len(args))
    return ell_1(product(args))


def epsilon_sign(args: Sequence[PolyvectorField]) -> int:
    k = len(args)
    e = sum((k - i) * args[i - 1].shifted_degree() for i in range(1, k + 1))
    return -1 if e & 1 else 1


def chi_sign(sigma: Sequence[int], args: Sequence[PolyvectorField]) -> int:
    """Graded signature of ``sigma``: the permuted list is ``args[sigma[0]], args[sigma[1]], ...``.

    Every pair placed out of order contributes ``(-1)^{|a||b| + 1}``.
    """
    if sorted(sigma) != list(range(len(args))):
        raise PreconditionError("sigma is not a permutation of the arguments")
    shifted = [a.shifted_degree() for a in args]
    e = 0
    for p in range(len(sigma)):
        for q in range(p + 1, len(sigma)):
            if sigma[p] > sigma[q]:
                e += shifted[sigma[p]] * shifted[sigma[q]] + 1
    return -1 if e & 1 else 1


def _homogeneous_expansion(args: Sequence[PolyvectorField]) -> Iterator[list[PolyvectorField]]:
    parts = [list(a.homogeneous_parts().values()) for a in args]
    return (list(choice) for choice in itertools.product(*parts))


def l_k(args: Sequence[PolyvectorField]) -> PolyvectorField:
    """``epsilon * ell_k``, extended multilinearly from homogeneous pieces."""
    _check_arity(len(args))
    r = _same_rank(args)
    out = PolyvectorField.zero(r)
    for pieces in _homogeneous_expansion(args):
        out = out + ell_k(pieces) * epsilon_sign(pieces)
    return out


def l_1(a: PolyvectorField) -> PolyvectorField:
    return l_k([a])


def bv_delta(a: PolyvectorField) -> PolyvectorField:
    return l_1(a)


def _schouten_monomial(n1: IntVector, alpha: Multivector, n2: IntVector, beta: Multivector) -> tuple[IntVector, Multivector]:
    k = alpha.degree() - 1
    first = wedge(contract_vector(n2, alpha), beta)
    second = wedge(alpha, contract_vector(n1, beta))
    value = first + (second if (k + 1) % 2 == 0 else -second)
    if k % 2:
        value = -value
    return tuple(p + q for p, q in zip(n1, n2)), value


def schouten(a: PolyvectorField, b: PolyvectorField) -> PolyvectorField:
    """The Schouten-Nijenhuis bracket in closed form, bilinear over monomials."""
    a._check(b)
    acc: dict[IntVector, Multivector] = {}
    for n1, x in a.terms.items():
        for alpha in x.homogeneous_parts().values():
            for n2, y in b.terms.items():
                for beta in y.homogeneous_parts().values():
                    n, v = _schouten_monomial(n1, alpha, n2, beta)
                    acc[n] = acc[n] + v if n in acc else v
    return PolyvectorField._raw(a.rank, acc)


def lie_bracket(n1: Sequence[int], m1: Sequence[int], n2: Sequence[int], m2: Sequence[int]) -> PolyvectorField:
    """Bracket of the vector fields ``z^n1 m1`` and ``z^n2 m2``."""
    v1, v2 = Multivector.vector(m1), Multivector.vector(m2)
    val = v2 * _dot(n2, m1) - v1 * _dot(n1, m2)
    return PolyvectorField.monomial(tuple(p + q for p, q in zip(n1, n2)), val)


def _dot(n: Sequence[int], m: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(n, m))


def schouten_decomposable(n1: Sequence[int], alpha: Sequence[Sequence[int]],
                          n2: Sequence[int], beta: Sequence[Sequence[int]]) -> PolyvectorField:
    """Schouten bracket of ``z^n1 a_0...a_k`` and ``z^n2 b_0...b_l`` by the sum over pairs.

    The function ``z^n`` rides on the first factor; an independent oracle for
    :func:`schouten` on decomposable arguments of positive degree.
    """
    r = len(n1)
    if not alpha or not beta:
        raise PreconditionError("the pairwise formula needs positive degrees")
    zero = (0,) * r
    fa = [(tuple(n1) if t == 0 else zero, tuple(x)) for t, x in enumerate(alpha)]
    fb = [(tuple(n2) if t == 0 else zero, tuple(x)) for t, x in enumerate(beta)]

    def field(f: tuple[IntVector, IntVector]) -> PolyvectorField:
        return PolyvectorField.monomial(f[0], Multivector.vector(f[1]))

    out = PolyvectorField.zero(r)
    for i, (p, ai) in enumerate(fa):
        for j, (q, bj) in enumerate(fb):
            rest = [field(f) for t, f in enumerate(fa) if t != i] + [field(f) for t, f in enumerate(fb) if t != j]
            term = multiply(lie_bracket(p, ai, q, bj), product(rest)) if rest else lie_bracket(p, ai, q, bj)
            out = out + (term if (i + j) % 2 == 0 else -term)
    return out


def top_form(rank: int, sign: int = 1) -> Multivector:
    return Multivector.top(rank) * sign


def geom_delta(a: PolyvectorField, omega: Multivector | None = None) -> PolyvectorField:
    """``Delta`` defined by ``iota_{Delta zeta} Omega = d(iota_zeta Omega)``.

    ``Omega`` is a primitive top-degree element of ``Lambda^r N``, and
    ``d(z^n xi) = z^n n ^ xi`` on forms.
    """
    r = a.rank
    omega = omega if omega is not None else top_form(r)
    full = (1 << r) - 1
    if set(omega.terms) != {full} or abs(omega.coefficient(full)) != 1:
        raise PreconditionError("Omega must be a primitive top-degree element")
    orient = omega.coefficient(full)
    out = []
    for n, x in a.terms.items():
        for alpha in x.homogeneous_parts().values():
            xi = contract_blade(alpha, omega) if alpha.degree() else omega * alpha.coefficient(0)
            dxi = wedge(Multivector.vector(n), xi)
            out.append((n, _uncontract(dxi, orient, r)))
    return PolyvectorField(r, out)


def _uncontract(xi: Multivector, orient: int, r: int) -> Multivector:
    """The ``eta`` with ``iota_eta Omega = xi``; blades ``e_J`` go to ``e_K`` with ``K`` the complement."""
    full = (1 << r) - 1
    acc = {}
    for k, c in xi.terms.items():
        j = full ^ k
        acc[j] = c * reorder_sign(j, k) * orient
    return Multivector(r, acc)


# ---------------------------------------------------------------------------
# L-infinity and BV identities


def unshuffles(i: int, k: int) -> Iterator[tuple[int, ...]]:
    """Permutations increasing on the first ``i`` and on the last ``k - i`` slots."""
    for first in itertools.combinations(range(k), i):
        rest = tuple(x for x in range(k) if x not in first)
        yield first + rest


def d_ij(i: int, j: int, args: Sequence[PolyvectorField]) -> PolyvectorField:
    k = len(args)
    if i < 1 or j < 1 or i + j != k + 1:
        raise PreconditionError(f"need i + j = k + 1 with i, j >= 1 (got i={i}, j={j}, k={k})")
    _check_arity(k)
    r = _same_rank(args)
    out = PolyvectorField.zero(r)
    base = -1 if (i * (k - i)) & 1 else 1
    for sigma in unshuffles(i, k):
        inner = l_k([args[s] for s in sigma[:i]])
        if not inner:
            continue
        outer = l_k([inner] + [args[s] for s in sigma[i:]])
        out = out + outer * (chi_sign(sigma, args) * base)
    return out


def jacobi_sum(k: int, args: Sequence[PolyvectorField]) -> PolyvectorField:
    if len(args) != k:
        raise PreconditionError("jacobi_sum takes exactly k arguments")
    r = _same_rank(args)
    out = PolyvectorField.zero(r)
    for i in range(1, k + 1):
        out = out + d_ij(i, k + 1 - i, args)
    return out


def _sgn(e: int) -> int:
    return -1 if e & 1 else 1


def seven_term_sides(a: PolyvectorField, b: PolyvectorField, c: PolyvectorField,
                     delta: Callable[[PolyvectorField], PolyvectorField] = l_1) -> tuple[PolyvectorField, PolyvectorField]:
    da, db = a.degree(), b.degree()
    m = multiply
    lhs = delta(m(m(a, b), c))
    rhs = (
        m(delta(m(a, b)), c)
        + m(a, delta(m(b, c))) * _sgn(da)
        + m(b, delta(m(a, c))) * _sgn(db * (da + 1))
        - m(m(delta(a), b), c)
        - m(m(a, delta(b)), c) * _sgn(da)
        - m(m(a, b), delta(c)) * _sgn(da + db)
    )
    return lhs, rhs


def seven_term_check(a: PolyvectorField, b: PolyvectorField, c: PolyvectorField) -> bool:
    lhs, rhs = seven_term_sides(a, b, c)
    return lhs == rhs


def derived_bracket(a: PolyvectorField, b: PolyvectorField,
                    delta: Callable[[PolyvectorField], PolyvectorField] = l_1) -> PolyvectorField:
    """The failure of ``delta`` to be a derivation on homogeneous ``a``."""
    s = _sgn(a.degree())
    return delta(multiply(a, b)) * s - multiply(delta(a), b) * s - multiply(a, delta(b))


def derivation_failure_check(a: PolyvectorField, b: PolyvectorField, sign: int = -1) -> bool:
    """Whether the derived bracket of ``l_1`` equals ``sign * schouten``."""
    return derived_bracket(a, b) == schouten(a, b) * sign


# ---------------------------------------------------------------------------
# bases of A_0


def kernel_basis(n: Sequence[int], degree: int) -> list[Multivector]:
    """An integer basis of ``ker iota_n`` in ``Lambda^degree M``."""
    r = len(n)
    if not any(n):
        return [Multivector.blade(r, idx) for idx in itertools.combinations(range(r), degree)]
    rows = quotient_projection(Sublattice(r, (primitive_part(n),)))
    vecs = [Multivector.vector(m) for m in rows]
    out = []
    for idx in itertools.combinations(range(len(vecs)), degree):
        x = Multivector.scalar(r)
        for t in idx:
            x = wedge(x, vecs[t])
        out.append(x)
    return out


def a0_monomials(n: Sequence[int]) -> list[PolyvectorField]:
    out = []
    for d in range(len(n) + 1):
        out += [PolyvectorField.monomial(n, x) for x in kernel_basis(n, d)]
    return out
