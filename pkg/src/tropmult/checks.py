"""Seeded property suites for the Frobenius, BV and L-infinity structures.

Each suite returns a :class:`SuiteResult` with one counter per identity.
Full-basis checks ignore ``cases``; random checks draw ``cases`` inputs from
a ``random.Random(seed)``.
"""

from __future__ import annotations

import itertools
import random
import time
from dataclasses import dataclass, field
from math import gcd
from typing import Callable, Iterable

from .errors import PreconditionError
from .exterior_algebra import (
    Multivector,
    bits,
    box,
    box_coproduct,
    coproduct,
    doubled_vector_blade,
    contract_blade,
    embed_first,
    embed_second,
    frobenius_basis,
    relative_coefficient,
    tensor_terms,
    theta_box,
    theta_n_box,
    trace,
    wedge,
    wedge_all,
)
from .lattice_core import Sublattice, quotient_projection
from .polyvector import (
    PolyvectorField,
    a0_monomials,
    chi_sign,
    d_ij,
    derivation_failure_check,
    geom_delta,
    jacobi_sum,
    kernel_basis,
    l_1,
    l_k,
    lie_bracket,
    schouten,
    schouten_decomposable,
    seven_term_check,
)
from .trqft import FrobeniusElement, kappa, kappa_vee

SUITE_NAMES = ("frobenius", "bv", "linfty", "schouten")
DEFAULT_CASES = 1000


@dataclass
class Check:
    passed: int = 0
    total: int = 0
    failures: list[str] = field(default_factory=list)

    def record(self, ok: bool, detail: Callable[[], str] | None = None) -> None:
        self.total += 1
        if ok:
            self.passed += 1
        elif len(self.failures) < 5:
            self.failures.append(detail() if detail else f"case {self.total}")

    @property
    def ok(self) -> bool:
        return self.passed == self.total


@dataclass
class SuiteResult:
    name: str
    checks: dict[str, Check] = field(default_factory=dict)
    seconds: float = 0.0

    def check(self, key: str) -> Check:
        return self.checks.setdefault(key, Check())

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks.values())

    def lines(self) -> list[str]:
        out = []
        for key, c in self.checks.items():
            out.append(f"{'PASS' if c.ok else 'FAIL'} {self.name}.{key}: {c.passed}/{c.total}")
            out += [f"    {f}" for f in c.failures]
        return out

    def to_json(self) -> dict:
        return {
            "suite": self.name,
            "ok": self.ok,
            "seconds": round(self.seconds, 3),
            "checks": {k: {"passed": c.passed, "total": c.total, "failures": c.failures}
                       for k, c in self.checks.items()},
        }


# ---------------------------------------------------------------------------
# random inputs


def random_multivector(rng: random.Random, rank: int, degree: int, bound: int = 2) -> Multivector:
    blades = list(itertools.combinations(range(rank), degree))
    while True:
        x = Multivector.zero(rank)
        for b in blades:
            x = x + Multivector.blade(rank, b, rng.randint(-bound, bound))
        if x:
            return x


def random_exponent(rng: random.Random, rank: int, bound: int = 2) -> tuple[int, ...]:
    return tuple(rng.randint(-bound, bound) for _ in range(rank))


def random_monomial(rng: random.Random, rank: int, degree: int | None = None) -> PolyvectorField:
    d = rng.randint(0, rank) if degree is None else degree
    return PolyvectorField.monomial(random_exponent(rng, rank), random_multivector(rng, rank, d))


def random_homogeneous(rng: random.Random, rank: int, degree: int | None = None) -> PolyvectorField:
    """A sum of one or two monomials of a common degree."""
    d = rng.randint(0, rank) if degree is None else degree
    out = random_monomial(rng, rank, d)
    if rng.random() < 0.5:
        out = out + random_monomial(rng, rank, d)
    return out if out else random_homogeneous(rng, rank, d)


def random_field(rng: random.Random, rank: int) -> PolyvectorField:
    out = PolyvectorField.zero(rank)
    for _ in range(rng.randint(1, 3)):
        out = out + random_monomial(rng, rank)
    return out


def random_a0(rng: random.Random, rank: int, degree: int | None = None) -> PolyvectorField:
    """A random element of ``A_0`` supported on one exponent."""
    while True:
        n = random_exponent(rng, rank)
        top = rank if not any(n) else rank - 1
        d = rng.randint(0, top) if degree is None else degree
        basis = kernel_basis(n, d) if d <= top else []
        if not basis:
            continue
        x = Multivector.zero(rank)
        for b in basis:
            x = x + b * rng.randint(-2, 2)
        if x:
            return PolyvectorField.monomial(n, x)


def random_decomposable(rng: random.Random, rank: int, degree: int) -> tuple[tuple[int, ...], list[tuple[int, ...]]]:
    n = random_exponent(rng, rank)
    return n, [random_exponent(rng, rank) for _ in range(degree)]


def primitive_directions(rank: int, bound: int = 1) -> list[tuple[int, ...]]:
    """Primitive vectors with entries in ``[-bound, bound]``, one per sign class."""
    out = []
    for n in itertools.product(range(-bound, bound + 1), repeat=rank):
        if not any(n) or gcd(*n) != 1:
            continue
        first = next(x for x in n if x)
        if first > 0:
            out.append(n)
    return out


# ---------------------------------------------------------------------------
# Frobenius suite


def _blades(basis: list[Multivector], rank: int) -> list[Multivector]:
    return [wedge_all((basis[i] for i in bits(m)), rank) for m in range(1 << len(basis))]


def _tr(x: Multivector, unit: Multivector) -> int:
    return relative_coefficient(x.grade(unit.degree()), unit) if x else 0


def _coprod_identity(z: Multivector, pairs, blades: list[Multivector], unit: Multivector) -> bool:
    """``sum_i Tr(a ^ x_i) y_i == a ^ z`` for every ``a`` in ``blades``."""
    for a in blades:
        acc = Multivector.zero(z.rank)
        for x, y in pairs:
            t = _tr(wedge(a, x), unit)
            if t:
                acc = acc + y * t
        if acc != wedge(a, z):
            return False
    return True


def _frobenius_algebras(max_rank: int) -> Iterable[tuple[int, tuple[int, ...] | None]]:
    for r in range(1, max_rank + 1):
        yield r, None
        for n in primitive_directions(r):
            yield r, n


def _m_basis(n: tuple[int, ...] | None, r: int) -> list[Multivector]:
    if n is None:
        return [Multivector.generator(r, i) for i in range(r)]
    return [Multivector.vector(m) for m in quotient_projection(Sublattice(r, (n,)))]


def frobenius_suite(seed: int = 0, cases: int = DEFAULT_CASES, max_rank: int = 3) -> SuiteResult:
    """Full-basis checks; ``seed`` and ``cases`` are accepted for a uniform interface."""
    res = SuiteResult("frobenius")
    coprod, theta_c, trk, theta_n = (res.check(k) for k in ("coproduct", "coproduct_theta", "trace_kappa", "theta_n"))
    sq, sq_trace = res.check("box_coproduct"), res.check("box_trace")

    f1, f2 = embed_first(Multivector.generator(1, 0)), embed_second(Multivector.generator(1, 0))
    one = Multivector.scalar(2)
    expected = tensor_terms([(wedge(f1, f2), one), (-f1, f2), (f2, f1), (one, wedge(f1, f2))])
    res.check("rank1_example").record(tensor_terms(coproduct(one)) == expected, lambda: "vee(1) in rank 1")

    for r, n in _frobenius_algebras(max_rank):
        R = 2 * r
        basis = frobenius_basis(n, r)
        unit = theta_n_box(n, r)
        blades = _blades(basis, R)
        label = f"r={r} n={n}"
        for z in blades:
            pairs = coproduct(z, basis) if basis else [(z, Multivector.scalar(R))]
            coprod.record(_coprod_identity(z, pairs, blades, unit), lambda: f"{label} z={z}")
        th_pairs = coproduct(unit, basis) if basis else [(unit, Multivector.scalar(R))]
        theta_c.record(tensor_terms(th_pairs) == tensor_terms([(unit, unit)]), lambda: label)

        if n is not None:
            theta_n.record(contract_blade(doubled_vector_blade(n), theta_box(r)) == unit, lambda: label)
            zero = (0,) * r
            for a in blades:
                ka = kappa(n, FrobeniusElement(n, a)).value
                for b in _blades(frobenius_basis(None, r), R):
                    lhs = FrobeniusElement(n, wedge(a, kappa_vee(n, FrobeniusElement(zero, b)).value)).trace()
                    trk.record(lhs == trace(wedge(ka, b)), lambda: f"{label} a={a} b={b}")

        # squared classes: e_I^box for a basis e_j of M_n
        m = _m_basis(n, r)
        k = len(m)
        box_blades = [box(wedge_all((m[j] for j in bits(s)), r)) for s in range(1 << k)]
        sq_trace.record(_tr(box_blades[-1], unit) == 1, lambda: label)
        for s in range(1 << k):
            pairs = box_coproduct(bits(s), m) if m else [(Multivector.scalar(R), Multivector.scalar(R))]
            sq.record(_coprod_identity(box_blades[s], pairs, box_blades, unit), lambda: f"{label} I={bits(s)}")
    return res


# ---------------------------------------------------------------------------
# BV suite

WRONG_SIGN_WITNESS = (((1, 0), (1,)), ((0, 1), (0,)))


def _pinned_monomial(n: tuple[int, ...], blade: tuple[int, ...]) -> PolyvectorField:
    return PolyvectorField.monomial(n, Multivector.blade(len(n), blade))


def bv_suite(seed: int = 0, cases: int = DEFAULT_CASES, max_rank: int = 3) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("bv")
    sq, seven, deriv, delta = (res.check(k) for k in ("l1_squared", "seven_term", "derivation_failure", "delta_formula"))
    for t in range(cases):
        r = rng.randint(1, max_rank)
        x = random_field(rng, r)
        sq.record(not l_1(l_1(x)), lambda: repr(x))
        a, b, c = (random_homogeneous(rng, r) for _ in range(3))
        seven.record(seven_term_check(a, b, c), lambda: f"{a!r}, {b!r}, {c!r}")
        deriv.record(derivation_failure_check(a, b), lambda: f"{a!r}, {b!r}")
        want = PolyvectorField.zero(r)
        for mono in x.monomials():
            for part in mono.homogeneous_parts().values():
                want = want + l_1(part) * (-1 if part.degree() % 2 == 0 else 1)
        delta.record(geom_delta(x) == want, lambda: repr(x))
    a, b = (_pinned_monomial(*w) for w in WRONG_SIGN_WITNESS)
    res.check("plus_schouten_fails").record(not derivation_failure_check(a, b, sign=1), lambda: "pinned witness")
    return res


# ---------------------------------------------------------------------------
# L-infinity suite

JACOBI_WITNESS = (((1, 0), (0,)), ((1, 0), (1,)), ((0, 1), (0,)))


def linfty_suite(seed: int = 0, cases: int = DEFAULT_CASES, max_rank: int = 3) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("linfty")
    skew, dij, closure, degree = (res.check(k) for k in ("graded_skew", "dij_on_a0", "a0_closure", "degree_law"))
    for t in range(cases):
        r = rng.randint(1, max_rank)
        k = 2 + t % 3
        args = [random_monomial(rng, r) for _ in range(k)]
        sigma = list(range(k))
        rng.shuffle(sigma)
        lhs = l_k([args[s] for s in sigma])
        skew.record(lhs == l_k(args) * chi_sign(sigma, args), lambda: f"{sigma} {args!r}")
        value = l_k(args)
        if value:
            want = sum(a.shifted_degree() for a in args) + k - 2
            degree.record(value.shifted_degree() == want, lambda: f"{args!r}")

        k = 1 + t % 4
        a0 = [random_a0(rng, r) for _ in range(k)]
        for i in range(1, k + 1):
            term = d_ij(i, k + 1 - i, a0)
            dij.record(not term, lambda: f"D_{i},{k + 1 - i} {a0!r} -> {term!r}")
        closure.record(l_k(a0).in_a0(), lambda: f"{a0!r}")
    witness = [_pinned_monomial(*w) for w in JACOBI_WITNESS]
    res.check("non_a0_witness").record(
        not all(x.in_a0() for x in witness) and bool(jacobi_sum(3, witness)), lambda: "pinned witness")
    return res


# ---------------------------------------------------------------------------
# Schouten suite


def schouten_grid(max_rank: int = 3, bound: int = 2) -> Check:
    """``l_2 == schouten`` on every pair of ``A_0`` basis monomials."""
    c = Check()
    for r in range(1, max_rank + 1):
        mons = [m for n in itertools.product(range(-bound, bound + 1), repeat=r) for m in a0_monomials(n)]
        for a in mons:
            for b in mons:
                c.record(l_k([a, b]) == schouten(a, b), lambda: f"{a!r}, {b!r}")
    return c


def schouten_suite(seed: int = 0, cases: int = DEFAULT_CASES, max_rank: int = 3, grid: bool = True) -> SuiteResult:
    rng = random.Random(seed)
    res = SuiteResult("schouten")
    if grid:
        res.checks["l2_on_a0_grid"] = schouten_grid(max_rank)
    oracle, lie, anti, jac = (res.check(k) for k in ("decomposable_oracle", "vector_fields", "antisymmetry", "jacobi"))
    for _ in range(cases):
        r = rng.randint(1, max_rank)
        n1, fa = random_decomposable(rng, r, rng.randint(1, r))
        n2, fb = random_decomposable(rng, r, rng.randint(1, r))
        a = PolyvectorField.monomial(n1, wedge_all((Multivector.vector(v) for v in fa), r))
        b = PolyvectorField.monomial(n2, wedge_all((Multivector.vector(v) for v in fb), r))
        oracle.record(schouten(a, b) == schouten_decomposable(n1, fa, n2, fb), lambda: f"{a!r}, {b!r}")
        m1, m2 = random_exponent(rng, r), random_exponent(rng, r)
        v1 = PolyvectorField.monomial(n1, Multivector.vector(m1))
        v2 = PolyvectorField.monomial(n2, Multivector.vector(m2))
        lie.record(schouten(v1, v2) == lie_bracket(n1, m1, n2, m2), lambda: f"{v1!r}, {v2!r}")
        x, y, z = (random_monomial(rng, r) for _ in range(3))
        sx, sy = x.shifted_degree(), y.shifted_degree()
        sign = -1 if (sx * sy) & 1 else 1
        anti.record(schouten(x, y) == schouten(y, x) * -sign, lambda: f"{x!r}, {y!r}")
        jac.record(schouten(x, schouten(y, z)) == schouten(schouten(x, y), z) + schouten(y, schouten(x, z)) * sign,
                   lambda: f"{x!r}, {y!r}, {z!r}")
    return res


# ---------------------------------------------------------------------------


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "frobenius": frobenius_suite,
    "bv": bv_suite,
    "linfty": linfty_suite,
    "schouten": schouten_suite,
}


def run_suites(name: str, seed: int = 0, cases: int = DEFAULT_CASES) -> list[SuiteResult]:
    if name == "all":
        names = list(SUITE_NAMES)
    elif name in SUITES:
        names = [name]
    else:
        raise PreconditionError(f"unknown suite {name!r}")
    out = []
    for n in names:
        start = time.perf_counter()
        result = SUITES[n](seed=seed, cases=cases)
        result.seconds = time.perf_counter() - start
        out.append(result)
    return out
