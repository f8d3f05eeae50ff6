"""Combinatorial types of marked tropical curves.

Every edge stores a primitive direction from its tail to its head together
with a weight.  Unbounded edges (ends) have ``head=None`` and point away from
their only vertex.  Ends of weight 0 are contracted ends.
"""

from __future__ import annotations

import enum
from collections import defaultdict, deque
from dataclasses import dataclass, field, replace
from math import factorial
from typing import Iterable, Mapping, Sequence

from .errors import PreconditionError
from .lattice_core import IntVector, check_rank, primitive_index

AUTOMORPHISM_VERTEX_CAP = 10


@dataclass(frozen=True)
class Vertex:
    id: str
    genus: int = 0


@dataclass(frozen=True)
class Edge:
    id: str
    tail: str
    head: str | None
    weight: int
    direction: IntVector

    @property
    def bounded(self) -> bool:
        return self.head is not None

    @property
    def weighted(self) -> IntVector:
        return tuple(self.weight * x for x in self.direction)

    def outward(self, v: str) -> list[IntVector]:
        """Primitive directions of the flags of this edge at ``v``."""
        out = []
        if self.tail == v:
            out.append(self.direction)
        if self.head == v:
            out.append(tuple(-x for x in self.direction))
        return out


@dataclass(frozen=True)
class TropicalCurve:
    rank: int
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    markings: tuple[tuple[int, str], ...] = ()

    def __post_init__(self) -> None:
        check_rank(self.rank)
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))
        object.__setattr__(self, "markings", tuple(sorted((int(i), str(e)) for i, e in self.markings)))

    # lookups -------------------------------------------------------------

    def vertex(self, vid: str) -> Vertex:
        for v in self.vertices:
            if v.id == vid:
                return v
        raise PreconditionError(f"no vertex {vid!r}")

    def edge(self, eid: str) -> Edge:
        for e in self.edges:
            if e.id == eid:
                return e
        raise PreconditionError(f"no edge {eid!r}")

    @property
    def vertex_ids(self) -> list[str]:
        return [v.id for v in self.vertices]

    @property
    def marking_map(self) -> dict[int, str]:
        return dict(self.markings)

    def marked_edge(self, i: int) -> Edge:
        return self.edge(self.marking_map[i])

    def index_of_edge(self, eid: str) -> int:
        for i, e in self.markings:
            if e == eid:
                return i
        raise PreconditionError(f"edge {eid!r} is not marked")

    def compact_edges(self) -> list[Edge]:
        return sorted((e for e in self.edges if e.bounded), key=lambda e: e.id)

    def ends(self) -> list[Edge]:
        return [e for e in self.edges if not e.bounded]

    def incident(self, vid: str) -> list[Edge]:
        return [e for e in self.edges if e.tail == vid or e.head == vid]

    def flags(self, vid: str) -> list[tuple[Edge, IntVector]]:
        """Pairs ``(E, u_(V,E))``; a loop contributes two flags."""
        out = []
        for e in self.incident(vid):
            for u in e.outward(vid):
                out.append((e, u))
        return out

    def valence(self, vid: str) -> int:
        return len(self.flags(vid))

    def delta(self, i: int) -> IntVector:
        """The weighted direction of the end marked ``i``."""
        return self.marked_edge(i).weighted

    def contracted_indices(self) -> list[int]:
        return [i for i, e in self.markings if self.edge(e).weight == 0]

    def with_edges(self, edges: Iterable[Edge]) -> "TropicalCurve":
        return replace(self, edges=tuple(edges))


# ---------------------------------------------------------------------------
# validation


def _components(c: TropicalCurve) -> list[set[str]]:
    adj: dict[str, set[str]] = {v.id: set() for v in c.vertices}
    for e in c.edges:
        if e.bounded and e.tail in adj and e.head in adj:
            adj[e.tail].add(e.head)
            adj[e.head].add(e.tail)
    seen: set[str] = set()
    comps = []
    for v in c.vertex_ids:
        if v in seen:
            continue
        comp = {v}
        queue = deque([v])
        while queue:
            x = queue.popleft()
            for y in adj[x]:
                if y not in comp:
                    comp.add(y)
                    queue.append(y)
        seen |= comp
        comps.append(comp)
    return comps


def validate(c: TropicalCurve) -> list[str]:
    """List every violated invariant; the list is empty iff ``c`` is valid."""
    problems: list[str] = []
    if not c.vertices:
        problems.append("curve has no vertices (vertex-free curves are not supported)")
        return problems
    vids = c.vertex_ids
    if len(set(vids)) != len(vids):
        problems.append("duplicate vertex ids")
    eids = [e.id for e in c.edges]
    if len(set(eids)) != len(eids):
        problems.append("duplicate edge ids")
    known = set(vids)
    for v in c.vertices:
        if v.genus < 0:
            problems.append(f"vertex {v.id}: negative genus {v.genus}")
    structural = False
    for e in c.edges:
        if e.tail not in known or (e.head is not None and e.head not in known):
            problems.append(f"edge {e.id}: unknown endpoint")
            structural = True
        if len(e.direction) != c.rank:
            problems.append(f"edge {e.id}: direction has length {len(e.direction)}, expected {c.rank}")
            structural = True
            continue
        if e.weight < 0:
            problems.append(f"edge {e.id}: negative weight {e.weight}")
        g = primitive_index(e.direction)
        if e.weight == 0 and g != 0:
            problems.append(f"edge {e.id}: weight 0 requires the zero direction")
        if e.weight > 0 and g != 1:
            problems.append(f"edge {e.id}: direction {e.direction} is not primitive")
    marked = [e for _, e in c.markings]
    if len(set(i for i, _ in c.markings)) != len(c.markings):
        problems.append("duplicate marking indices")
    if len(set(marked)) != len(marked):
        problems.append("an edge carries two markings")
    for i, eid in c.markings:
        if eid not in eids:
            problems.append(f"marking {i}: unknown edge {eid}")
            structural = True
        elif c.edge(eid).bounded:
            problems.append(f"marking {i}: edge {eid} is bounded")
    for e in c.edges:
        if not e.bounded and e.id not in marked:
            problems.append(f"end {e.id} is not marked")
    if structural:
        return problems
    for v in c.vertices:
        total = [0] * c.rank
        for e, u in c.flags(v.id):
            for k in range(c.rank):
                total[k] += e.weight * u[k]
        if any(total):
            problems.append(f"vertex {v.id}: balancing fails, weighted sum {tuple(total)}")
        val = c.valence(v.id)
        if val <= 2 and v.genus == 0:
            problems.append(f"vertex {v.id}: valence {val} requires positive genus")
    if len(_components(c)) != 1:
        problems.append("curve is not connected")
    return problems


def require_valid(c: TropicalCurve) -> None:
    problems = validate(c)
    if problems:
        raise PreconditionError("invalid tropical curve: " + "; ".join(problems))


# ---------------------------------------------------------------------------
# numerical invariants


def first_betti(c: TropicalCurve) -> int:
    return len(c.compact_edges()) - len(c.vertices) + len(_components(c))


def genus(c: TropicalCurve) -> int:
    return first_betti(c) + sum(v.genus for v in c.vertices)


def overvalence(c: TropicalCurve, vid: str | None = None) -> int:
    """``val(V) + 3 g(V) - 3`` for one vertex, or the sum over all vertices."""
    if vid is not None:
        return c.valence(vid) + 3 * c.vertex(vid).genus - 3
    return sum(overvalence(c, v) for v in c.vertex_ids)


def expected_dimension(c: TropicalCurve) -> int:
    require_valid(c)
    return len(c.markings) + (c.rank - 3) * (1 - genus(c)) - overvalence(c)


def is_genus_zero_tree(c: TropicalCurve) -> bool:
    return first_betti(c) == 0 and all(v.genus == 0 for v in c.vertices)


# ---------------------------------------------------------------------------
# psi conditions


PsiVector = Mapping[int, int]


@dataclass(frozen=True)
class PsiStatus:
    vertex: str
    overvalence: int
    demand: int
    indices: tuple[int, ...]

    @property
    def ok(self) -> bool:
        return self.overvalence >= self.demand

    @property
    def equality(self) -> bool:
        return self.overvalence == self.demand


def _check_psi_indices(c: TropicalCurve, psi: PsiVector) -> None:
    contracted = set(c.contracted_indices())
    for i, s in psi.items():
        if i not in contracted:
            raise PreconditionError(f"psi condition on marking {i}, which is not a contracted end")
        if s < 0:
            raise PreconditionError(f"negative psi exponent at marking {i}")


def psi_check(c: TropicalCurve, psi: PsiVector) -> dict[str, PsiStatus]:
    require_valid(c)
    _check_psi_indices(c, psi)
    out = {}
    for v in c.vertex_ids:
        idx = tuple(sorted(i for i in psi if c.marked_edge(i).tail == v))
        out[v] = PsiStatus(v, overvalence(c, v), sum(psi[i] for i in idx), idx)
    return out


def vertex_multinomial(c: TropicalCurve, psi: PsiVector, vid: str) -> int:
    status = psi_check(c, psi)[vid]
    contracted_here = [i for i in c.contracted_indices() if c.marked_edge(i).tail == vid]
    if not contracted_here:
        return 1
    if not status.equality:
        raise PreconditionError(
            f"vertex {vid}: multinomial needs ov(V) = sum of psi exponents "
            f"({status.overvalence} vs {status.demand})"
        )
    out = factorial(status.overvalence)
    for i in status.indices:
        out //= factorial(psi[i])
    return out


# ---------------------------------------------------------------------------
# flows


class FlowMode(enum.Enum):
    MIDPOINT_CANONICAL = "midpoint"
    SINGLE_SINK = "single_sink"


@dataclass(frozen=True)
class Flow:
    """An acyclic orientation of the midpoint refinement of a curve.

    Ends always flow into their vertex.  In midpoint mode every compact edge
    is split by a source at its midpoint.  In single-sink mode the compact
    edges of a spanning tree flow towards ``sink``, and the remaining
    compact edges (if any) are split at their midpoints.
    """

    curve: TropicalCurve
    mode: FlowMode
    sink: str | None = None
    parent: Mapping[str, str] = field(default_factory=dict)
    split_edges: tuple[str, ...] = ()
    order: tuple[str, ...] = ()

    def arcs(self) -> list[tuple[str, str]]:
        """Arcs of the refined graph; nodes are ``v:<id>``, ``m:<id>``, ``x:<id>``."""
        out = []
        for e in self.curve.ends():
            out.append((f"x:{e.id}", f"v:{e.tail}"))
        tree = {eid: child for child, eid in self.parent.items()}
        for e in self.curve.compact_edges():
            if e.id in tree:
                child = tree[e.id]
                other = e.head if e.tail == child else e.tail
                out.append((f"v:{child}", f"m:{e.id}"))
                out.append((f"m:{e.id}", f"v:{other}"))
            else:
                out.append((f"m:{e.id}", f"v:{e.tail}"))
                out.append((f"m:{e.id}", f"v:{e.head}"))
        return out

    def is_acyclic(self) -> bool:
        arcs = self.arcs()
        nodes = {a for arc in arcs for a in arc} | {f"v:{v}" for v in self.curve.vertex_ids}
        indeg = {n: 0 for n in nodes}
        succ: dict[str, list[str]] = defaultdict(list)
        for a, b in arcs:
            succ[a].append(b)
            indeg[b] += 1
        queue = deque(sorted(n for n in nodes if indeg[n] == 0))
        seen = 0
        while queue:
            n = queue.popleft()
            seen += 1
            for m in succ[n]:
                indeg[m] -= 1
                if indeg[m] == 0:
                    queue.append(m)
        return seen == len(nodes)

    def children(self, vid: str) -> list[str]:
        return sorted(child for child, _ in self.parent.items() if self._parent_vertex(child) == vid)

    def _parent_vertex(self, child: str) -> str:
        e = self.curve.edge(self.parent[child])
        return e.head if e.tail == child else e.tail  # type: ignore[return-value]

    def parent_vertex(self, child: str) -> str | None:
        if child not in self.parent:
            return None
        return self._parent_vertex(child)


def build_flow(
    c: TropicalCurve,
    mode: FlowMode = FlowMode.MIDPOINT_CANONICAL,
    sink: str | None = None,
    require_tree: bool = False,
) -> Flow:
    require_valid(c)
    if mode is FlowMode.MIDPOINT_CANONICAL:
        return Flow(c, mode, None, {}, tuple(e.id for e in c.compact_edges()), tuple(c.vertex_ids))
    if sink is None:
        sink = c.vertex_ids[0]
    c.vertex(sink)
    if require_tree and first_betti(c) > 0:
        raise PreconditionError("a single-sink flow without split edges needs a tree")
    # breadth-first spanning tree from the sink, deterministic in edge ids
    parent: dict[str, str] = {}
    seen = {sink}
    queue = deque([sink])
    order = [sink]
    used: set[str] = set()
    while queue:
        x = queue.popleft()
        for e in c.compact_edges():
            if e.id in used or x not in (e.tail, e.head):
                continue
            y = e.head if e.tail == x else e.tail
            if y in seen:
                continue
            seen.add(y)
            used.add(e.id)
            parent[y] = e.id  # type: ignore[index]
            order.append(y)  # type: ignore[arg-type]
            queue.append(y)
    split = tuple(e.id for e in c.compact_edges() if e.id not in used)
    # leaves first, sink last
    return Flow(c, mode, sink, parent, split, tuple(reversed(order)))


# ---------------------------------------------------------------------------
# automorphisms and contraction


def _edge_key(e: Edge, vmap: Mapping[str, str]) -> tuple:
    t, h = vmap[e.tail], vmap[e.head]  # type: ignore[index]
    d = e.direction
    if (h, tuple(-x for x in d)) < (t, d):
        t, h, d = h, t, tuple(-x for x in d)
    return (t, h, e.weight, d)


def automorphism_order(c: TropicalCurve) -> int:
    """Number of automorphisms fixing every marked end and every flag direction."""
    require_valid(c)
    if len(c.vertices) > AUTOMORPHISM_VERTEX_CAP:
        raise PreconditionError(
            f"automorphism search is capped at {AUTOMORPHISM_VERTEX_CAP} vertices"
        )

    def local(vid: str) -> tuple:
        fl = sorted((e.weight, u, e.bounded) for e, u in c.flags(vid))
        return (c.vertex(vid).genus, tuple(fl))

    vids = c.vertex_ids
    fixed = {c.edge(e).tail for _, e in c.markings}
    sig = {v: local(v) for v in vids}
    identity_key = sorted(_edge_key(e, {v: v for v in vids}) for e in c.compact_edges())
    multiplicity: dict[tuple, int] = defaultdict(int)
    for k in identity_key:
        multiplicity[k] += 1
    edge_perms = 1
    for k, n in multiplicity.items():
        edge_perms *= factorial(n)
    for e in c.compact_edges():
        if e.tail == e.head and e.weight == 0:
            edge_perms *= 2  # a contracted loop may be reversed

    count = 0
    order = sorted(vids, key=lambda v: (v not in fixed, v))

    def extend(k: int, vmap: dict[str, str], used: set[str]) -> None:
        nonlocal count
        if k == len(order):
            if sorted(_edge_key(e, vmap) for e in c.compact_edges()) == identity_key:
                count += 1
            return
        v = order[k]
        choices = [v] if v in fixed else [w for w in vids if w not in used and sig[w] == sig[v]]
        for w in choices:
            if w in used:
                continue
            vmap[v] = w
            used.add(w)
            extend(k + 1, vmap, used)
            used.discard(w)
            del vmap[v]

    extend(0, {}, set())
    return count * edge_perms


def contract_zero_edges(c: TropicalCurve) -> TropicalCurve:
    """Contract compact weight 0 edges; a contracted loop raises the vertex genus."""
    vertices = {v.id: v.genus for v in c.vertices}
    order = c.vertex_ids
    edges = list(c.edges)
    while True:
        zero = next((e for e in edges if e.bounded and e.weight == 0), None)
        if zero is None:
            break
        edges.remove(zero)
        keep, gone = zero.tail, zero.head
        if keep == gone:
            vertices[keep] += 1
            continue
        vertices[keep] += vertices.pop(gone)  # type: ignore[arg-type]
        order = [v for v in order if v != gone]
        edges = [
            replace(
                e,
                tail=keep if e.tail == gone else e.tail,
                head=keep if e.head == gone else e.head,
            )
            for e in edges
        ]
    return TropicalCurve(
        c.rank,
        tuple(Vertex(v, vertices[v]) for v in order),
        tuple(edges),
        c.markings,
    )


def make_curve(
    rank: int,
    vertices: Sequence[tuple[str, int] | str],
    edges: Sequence[tuple],
    markings: Mapping[int, str] | Sequence[tuple[int, str]] | None = None,
) -> TropicalCurve:
    """Convenience constructor.

    ``edges`` holds tuples ``(id, tail, head, weight, direction)``.  When
    ``markings`` is omitted the ends are marked ``1, 2, ...`` in edge order.
    """
    vs = tuple(Vertex(v) if isinstance(v, str) else Vertex(v[0], v[1]) for v in vertices)
    es = tuple(Edge(str(i), str(t), None if h is None else str(h), int(w), tuple(d)) for i, t, h, w, d in edges)
    if markings is None:
        marks = tuple((k + 1, e.id) for k, e in enumerate(e for e in es if not e.bounded))
    elif isinstance(markings, Mapping):
        marks = tuple(markings.items())
    else:
        marks = tuple(markings)
    return TropicalCurve(rank, vs, es, marks)
