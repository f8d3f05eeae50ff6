"""Named curves with constraints, plus random generators of rigid curves."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from .constraints import AffineConstraint, Constraints
from .errors import PreconditionError
from .lattice_core import IntVector, Sublattice, primitive_index, primitive_part, saturate
from .mult_index import rigid
from .tropical_curve import PsiVector, TropicalCurve, expected_dimension, make_curve


@dataclass(frozen=True)
class Problem:
    """A curve together with its incidence and psi conditions."""

    curve: TropicalCurve
    constraints: Mapping[int, AffineConstraint] = field(default_factory=dict)
    psi: Mapping[int, int] = field(default_factory=dict)
    name: str = ""

    @property
    def args(self) -> tuple[TropicalCurve, Constraints, PsiVector]:
        return self.curve, self.constraints, self.psi


def _line(normal: IntVector) -> AffineConstraint:
    """The line killed by the primitive covector ``normal`` (in rank 2)."""
    a, b = normal
    return AffineConstraint.spanned([(-b, a)], 2)


def tripod() -> Problem:
    c = make_curve(2, ["V"], [("X1", "V", None, 1, (-1, 0)), ("X2", "V", None, 1, (0, -1)),
                              ("X3", "V", None, 1, (1, 1))])
    return Problem(c, {}, {}, "tripod")


def e1() -> Problem:
    """A tripod with two of its legs pinned by points on contracted ends."""
    c = make_curve(
        2,
        ["V0", "V1", "V2"],
        [
            ("a", "V0", "V1", 1, (-1, 0)),
            ("b", "V0", "V2", 1, (0, -1)),
            ("X1", "V0", None, 1, (1, 1)),
            ("X2", "V1", None, 1, (-1, 0)),
            ("X3", "V2", None, 1, (0, -1)),
            ("P1", "V1", None, 0, (0, 0)),
            ("P2", "V2", None, 0, (0, 0)),
        ],
    )
    A = {4: AffineConstraint.point(2), 5: AffineConstraint.point(2)}
    return Problem(c, A, {}, "E1")


def e2(w: int) -> Problem:
    """Two vertices joined by an edge of weight ``w`` with three line conditions."""
    if w < 1:
        raise PreconditionError("E2 needs a positive weight")
    c = make_curve(
        2,
        ["V1", "V2"],
        [
            ("E", "V1", "V2", w, (0, 1)),
            ("X1", "V1", None, 1, (-1, 0)),
            ("X2", "V1", None, 1, (1, -w)),
            ("X3", "V2", None, 1, (1, 0)),
            ("X4", "V2", None, 1, (-1, w)),
        ],
    )
    A = {1: _line((0, 1)), 2: _line((w, 1)), 3: _line((0, 1))}
    return Problem(c, A, {}, f"E2(w={w})")


def _genus1_curve(extra: list[tuple]) -> TropicalCurve:
    edges = [
        ("E12", "V1", "V2", 1, (1, 0)),
        ("E13", "V1", "V3", 1, (0, 1)),
        ("E23", "V2", "V3", 1, (1, -1)),
        ("X1", "V1", None, 1, (-1, -1)),
        ("X2", "V2", None, 1, (0, 1)),
        ("X3", "V3", None, 1, (1, 0)),
    ]
    return make_curve(2, ["V1", "V2", "V3"], edges + extra)


def genus1(a: int, b: int, c: int, d: int, e: int, f: int) -> Problem:
    """The planar genus 1 triangle with psi and line conditions at each vertex.

    The line at ``V1`` has direction ``(a, b)``, at ``V2`` ``(c, d)`` and at
    ``V3`` ``(e, f)``.  A non-primitive direction becomes a weighted line.
    """
    curve = _genus1_curve([
        ("C1", "V1", None, 0, (0, 0)),
        ("C2", "V2", None, 0, (0, 0)),
        ("C3", "V3", None, 0, (0, 0)),
    ])
    A = {4: AffineConstraint.through((a, b)), 5: AffineConstraint.through((c, d)),
         6: AffineConstraint.through((e, f))}
    return Problem(curve, A, {4: 1, 5: 1, 6: 1}, f"genus1{(a, b, c, d, e, f)}")


def genus1_point(c: int = 1, d: int = 2) -> Problem:
    """The genus 1 triangle with a point at ``V1`` and a line of direction ``(c, d)`` at ``V2``."""
    curve = _genus1_curve([
        ("C1", "V1", None, 0, (0, 0)),
        ("C2", "V2", None, 0, (0, 0)),
    ])
    A = {4: AffineConstraint.point(2), 5: AffineConstraint.through((c, d))}
    return Problem(curve, A, {}, f"genus1-point{(c, d)}")


def conic() -> Problem:
    """A planar conic with four trivalent vertices through five points on its ends."""
    edges = [
        ("AB", "A", "B", 1, (1, 1)),
        ("BC", "B", "C", 1, (1, 2)),
        ("CD", "C", "D", 1, (0, 1)),
        ("A1", "A", "PA1", 1, (-1, 0)),
        ("A2", "A", "PA2", 1, (0, -1)),
        ("B1", "B", "PB", 1, (0, -1)),
        ("C1", "C", "PC", 1, (1, 1)),
        ("D1", "D", "PD", 1, (-1, 0)),
        ("XA1", "PA1", None, 1, (-1, 0)),
        ("XA2", "PA2", None, 1, (0, -1)),
        ("XB", "PB", None, 1, (0, -1)),
        ("XC", "PC", None, 1, (1, 1)),
        ("XD1", "PD", None, 1, (-1, 0)),
        ("XD2", "D", None, 1, (1, 1)),
    ]
    pinned = ["PA1", "PA2", "PB", "PC", "PD"]
    edges += [(f"Q{p}", p, None, 0, (0, 0)) for p in pinned]
    curve = make_curve(2, ["A", "B", "C", "D"] + pinned, edges)
    marks = curve.marking_map
    A = {i: AffineConstraint.point(2) for i, e in marks.items() if e.startswith("Q")}
    return Problem(curve, A, {}, "conic")


def skew(c: int):
    """The skew form ``c * det`` on ``Z^2``."""
    return lambda n1, n2: c * (n1[0] * n2[1] - n1[1] * n2[0])


@dataclass(frozen=True)
class ThetaProblem:
    problem: Problem
    omega_scale: int
    vertex_factors: tuple[int, ...]

    @property
    def expected(self) -> int:
        out = 1
        for x in self.vertex_factors:
            out *= abs(x)
        return out


def theta(omega_scale: int, subtrees: list, leaf_vectors: Mapping[str, IntVector] | None = None,
          rng: random.Random | None = None) -> ThetaProblem:
    """A rank 2 curve with a psi-pinned sink vertex and binary subtrees.

    ``subtrees`` lists nested pairs; each leaf is ``"J"`` (trivial condition)
    or ``"I"`` (the wall ``omega(Delta, .)^perp``), and every subtree holds
    exactly one ``"J"``.  Leaf directions come from ``leaf_vectors`` (keyed by
    leaf position such as ``"0.1.0"``) or from ``rng``; the last ``J`` leaf is
    adjusted so the sink balances.
    """
    if omega_scale == 0:
        raise PreconditionError("the skew form must be nonzero")
    if len(subtrees) < 2:
        raise PreconditionError("the sink needs at least two subtrees")
    omega = skew(omega_scale)
    rng = rng or random.Random(0)
    leaves: list[tuple[str, str]] = []

    def collect(t, path: str) -> None:
        if isinstance(t, str):
            if t not in ("I", "J"):
                raise PreconditionError(f"unknown leaf kind {t!r}")
            leaves.append((path, t))
            return
        if len(t) != 2:
            raise PreconditionError("internal theta vertices must be binary")
        collect(t[0], path + ".0")
        collect(t[1], path + ".1")

    for k, t in enumerate(subtrees):
        before = len(leaves)
        collect(t, str(k))
        if sum(1 for _, kind in leaves[before:] if kind == "J") != 1:
            raise PreconditionError("each subtree needs exactly one J leaf")
    vec: dict[str, IntVector] = {}
    last_j = [p for p, kind in leaves if kind == "J"][-1]
    for p, _ in leaves:
        if p == last_j:
            continue
        if leaf_vectors and p in leaf_vectors:
            vec[p] = tuple(leaf_vectors[p])
        else:
            v = (0, 0)
            while v == (0, 0):
                v = (rng.randint(-3, 3), rng.randint(-3, 3))
            vec[p] = v
    vec[last_j] = tuple(-sum(v[k] for v in vec.values()) for k in range(2))
    if vec[last_j] == (0, 0):
        raise PreconditionError("the balancing J leaf vanished")

    edges: list[tuple] = []
    factors: list[int] = []
    constraints: dict[str, AffineConstraint] = {}

    def build(t, path: str, parent: str) -> IntVector:
        """Attach subtree ``t`` to ``parent``; returns its outward weighted direction."""
        if isinstance(t, str):
            n = vec[path]
            g = primitive_index(n)
            edges.append((f"L{path}", parent, None, g, primitive_part(n)))
            if t == "I":
                m = (-omega_scale * n[1], omega_scale * n[0])
                constraints[f"L{path}"] = AffineConstraint(
                    saturate(Sublattice(2, (n,))), None, primitive_index(m)
                )
            return n
        v = f"T{path}"
        n1 = build(t[0], path + ".0", v)
        n2 = build(t[1], path + ".1", v)
        factors.append(omega(n1, n2))
        n = (n1[0] + n2[0], n1[1] + n2[1])
        g = primitive_index(n)
        if g == 0:
            raise PreconditionError("a theta edge has zero direction")
        edges.append((f"E{path}", parent, v, g, primitive_part(n)))
        return n

    for k, t in enumerate(subtrees):
        build(t, str(k), "Vinf")
    if any(x == 0 for x in factors):
        raise PreconditionError("a theta vertex has vanishing omega")
    edges.append(("Linf", "Vinf", None, 0, (0, 0)))
    vertices = ["Vinf"] + sorted({e[2] for e in edges if e[2] is not None})
    curve = make_curve(2, vertices, edges)
    by_edge = {e: i for i, e in curve.markings}
    A = {by_edge[e]: a for e, a in constraints.items()}
    A[by_edge["Linf"]] = AffineConstraint.point(2)
    psi = {by_edge["Linf"]: len(subtrees) - 2}
    return ThetaProblem(Problem(curve, A, psi, "theta"), omega_scale, tuple(factors))


def random_theta_shape(rng: random.Random, max_leaves: int = 5) -> list:
    """Random subtrees for :func:`theta`; total leaves at most ``max_leaves``."""
    k = rng.randint(2, 3)
    budget = max_leaves - k
    trees = []
    for _ in range(k):
        extra = rng.randint(0, max(0, min(2, budget)))
        budget -= extra
        leaves = ["J"] + ["I"] * extra
        rng.shuffle(leaves)
        nodes: list = list(leaves)
        while len(nodes) > 1:
            i = rng.randrange(len(nodes) - 1)
            nodes[i:i + 2] = [(nodes[i], nodes[i + 1])]
        trees.append(nodes[0])
    return trees


def random_theta(rng: random.Random, attempts: int = 200, shape: list | None = None,
                 omega_scale: int | None = None) -> ThetaProblem:
    """A rigid theta curve; ``shape`` and ``omega_scale`` are drawn when omitted."""
    for _ in range(attempts):
        scale = omega_scale if omega_scale is not None else rng.choice([-3, -2, -1, 1, 2, 3])
        try:
            t = theta(scale, shape if shape is not None else random_theta_shape(rng), rng=rng)
        except PreconditionError:
            continue
        if rigid(*t.problem.args):
            return t
    raise PreconditionError("no rigid theta curve found for this shape")


# ---------------------------------------------------------------------------
# random rigid genus 0 trees


def _random_primitive(rng: random.Random, r: int, bound: int = 2) -> IntVector:
    while True:
        v = tuple(rng.randint(-bound, bound) for _ in range(r))
        if primitive_index(v) == 1:
            return v


def _random_span(rng: random.Random, r: int, containing: IntVector | None, dim: int) -> Sublattice | None:
    gens = [containing] if containing is not None and any(containing) else []
    while len(gens) < dim:
        gens.append(_random_primitive(rng, r))
    s = saturate(Sublattice(r, tuple(gens))) if gens else Sublattice.zero(r)
    return s if s.rank == dim else None


def random_rigid_tree(rng: random.Random, r: int, max_vertices: int = 6, max_weight: int = 3,
                      attempts: int = 500, constraint_weights: bool = False) -> Problem:
    """A random rigid genus 0 curve in rank ``r``.

    Random tree, random weighted edge directions, ends added to balance,
    optional contracted ends, and random constraint spans whose codimensions
    add up to the expected dimension.  Retries until ``Phi`` is invertible.
    """
    for _ in range(attempts):
        problem = _try_tree(rng, r, max_vertices, max_weight, constraint_weights)
        if problem is not None:
            return problem
    raise PreconditionError("failed to generate a rigid tree")  # pragma: no cover


def _try_tree(rng, r, max_vertices, max_weight, constraint_weights) -> Problem | None:
    # favour larger trees; single vertices are cheap but uninformative
    nv = rng.randint(max(1, max_vertices // 2), max_vertices) if rng.random() < 0.8 else rng.randint(1, max_vertices)
    vids = [f"V{k}" for k in range(nv)]
    edges: list[tuple] = []
    imbalance = {v: [0] * r for v in vids}
    for k in range(1, nv):
        t = vids[rng.randrange(k)]
        h = vids[k]
        u = _random_primitive(rng, r)
        w = rng.randint(1, max_weight)
        edges.append((f"E{k}", t, h, w, u))
        for j in range(r):
            imbalance[t][j] += w * u[j]
            imbalance[h][j] -= w * u[j]
    end_count = 0
    for v in vids:
        val = sum(1 for e in edges if v in (e[1], e[2]))
        extra = rng.randint(0, 1) if val >= 2 else rng.randint(1, 2)
        for _ in range(extra):
            u = _random_primitive(rng, r)
            w = rng.randint(1, max_weight)
            end_count += 1
            edges.append((f"X{end_count}", v, None, w, u))
            for j in range(r):
                imbalance[v][j] += w * u[j]
            val += 1
        rest = tuple(-x for x in imbalance[v])
        if any(rest):
            g = primitive_index(rest)
            if g > max_weight:
                return None
            end_count += 1
            edges.append((f"X{end_count}", v, None, g, primitive_part(rest)))
            val += 1
        contracted = rng.choice([0, 0, 1]) + max(0, 3 - val)
        for _ in range(contracted):
            end_count += 1
            edges.append((f"X{end_count}", v, None, 0, (0,) * r))
    curve = make_curve(r, vids, edges)
    if len(curve.markings) > 10:
        return None
    d = expected_dimension(curve)
    marks = list(curve.markings)
    caps = {i: (r if curve.edge(e).weight == 0 else r - 1) for i, e in marks}
    if sum(caps.values()) < d or d < 0:
        return None
    codim = {i: 0 for i, _ in marks}
    for _ in range(d):
        open_ = [i for i in codim if codim[i] < caps[i]]
        codim[rng.choice(open_)] += 1
    A: dict[int, AffineConstraint] = {}
    for i, eid in marks:
        if codim[i] == 0:
            continue
        delta = curve.delta(i)
        span = _random_span(rng, r, delta if any(delta) else None, r - codim[i])
        if span is None:
            return None
        weight = rng.choice([1, 1, 1, 2]) if constraint_weights else 1
        A[i] = AffineConstraint(span, None, weight)
    if not rigid(curve, A):
        return None
    return Problem(curve, A, {}, f"random-tree-r{r}")


def random_planar_trivalent(rng: random.Random, max_vertices: int = 4, max_weight: int = 2,
                            attempts: int = 500) -> Problem:
    """A planar trivalent tree through points placed on all but one of its ends."""
    for _ in range(attempts):
        nv = rng.randint(1, max_vertices)
        vids = [f"V{k}" for k in range(nv)]
        edges: list[tuple] = []
        imbalance = {v: [0, 0] for v in vids}
        degree = {v: 0 for v in vids}
        ok = True
        for k in range(1, nv):
            choices = [v for v in vids[:k] if degree[v] < 2]
            if not choices:
                ok = False
                break
            t = rng.choice(choices)
            h = vids[k]
            u = _random_primitive(rng, 2)
            w = rng.randint(1, max_weight)
            edges.append((f"E{k}", t, h, w, u))
            degree[t] += 1
            degree[h] += 1
            for j in range(2):
                imbalance[t][j] += w * u[j]
                imbalance[h][j] -= w * u[j]
        if not ok:
            continue
        ends: list[tuple[str, int, IntVector]] = []
        for v in vids:
            need = 3 - degree[v]
            for _ in range(need - 1):
                u = _random_primitive(rng, 2)
                w = rng.randint(1, max_weight)
                ends.append((v, w, u))
                for j in range(2):
                    imbalance[v][j] += w * u[j]
            rest = (-imbalance[v][0], -imbalance[v][1])
            g = primitive_index(rest)
            if g == 0 or g > max_weight:
                ok = False
                break
            ends.append((v, g, primitive_part(rest)))
        if not ok or len(ends) < 2:
            continue
        free = rng.randrange(len(ends))
        pinned: list[str] = []
        for k, (v, w, u) in enumerate(ends):
            if k == free:
                edges.append((f"X{k}", v, None, w, u))
                continue
            p = f"P{k}"
            pinned.append(p)
            edges.append((f"S{k}", v, p, w, u))
            edges.append((f"X{k}", p, None, w, u))
            edges.append((f"Q{k}", p, None, 0, (0, 0)))
        curve = make_curve(2, vids + pinned, edges)
        A = {i: AffineConstraint.point(2) for i, e in curve.markings if e.startswith("Q")}
        try:
            if rigid(curve, A):
                return Problem(curve, A, {}, "planar-trivalent")
        except PreconditionError:
            continue
    raise PreconditionError("failed to generate a planar trivalent curve")  # pragma: no cover


def mikhalkin_product(problem: Problem) -> int:
    """Product over the non-subdivision vertices of ``|det(w1 u1, w2 u2)|``."""
    c = problem.curve
    out = 1
    for v in c.vertex_ids:
        flags = [(e, u) for e, u in c.flags(v) if e.weight > 0]
        if len(flags) != 3 or any(e.weight == 0 for e in c.incident(v)):
            continue
        (e1, u1), (e2, u2) = flags[0], flags[1]
        out *= abs(e1.weight * e2.weight * (u1[0] * u2[1] - u1[1] * u2[0]))
    return out


def standard_corpus() -> list[Problem]:
    return [e1(), e2(1), e2(2), e2(3), genus1(1, 1, 1, 2, 1, 3), genus1_point(), conic()]
