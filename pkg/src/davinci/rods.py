"""Rod and notch combinatorics.

A rod is a path of three edges through four notch vertices.  Its two end
notches (positions 0 and 3) are *boundary* notches, the middle two are
*interior* notches.  In a valid network every vertex is the boundary
notch of exactly one rod and an interior notch of exactly one other rod,
which forces every vertex to have degree 3.

Decomposition search works on darts: at each vertex we choose the *stem*,
the dart whose edge belongs to the rod ending there.  The other two darts
are the pass-through pair of the rod for which the vertex is interior.
A stem choice at every vertex determines the edge partition, and the
partition is valid exactly when every maximal chain of edges glued
through pass pairs has length three and visits four distinct vertices.
"""

from __future__ import annotations

import enum
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Sequence

from .errors import Disconnected, IdentityViolated, NotCubic


class Role(enum.Enum):
    BOUNDARY = "boundary"
    INTERIOR = "interior"


class Facing(enum.Enum):
    DOWN = "down"
    UP = "up"


@dataclass(frozen=True)
class Notch:
    role: Role
    depth: float = 0.0
    facing: Facing | None = None

    def __post_init__(self):
        if self.facing is None:
            object.__setattr__(
                self, "facing", Facing.DOWN if self.role is Role.BOUNDARY else Facing.UP
            )


def standard_notches(depth_boundary: float = 0.0, depth_interior: float = 0.0) -> tuple:
    b = Notch(Role.BOUNDARY, depth_boundary)
    i = Notch(Role.INTERIOR, depth_interior)
    return (b, i, i, b)


@dataclass(frozen=True)
class Rod:
    vertices: tuple
    edges: tuple
    notches: tuple = field(default_factory=standard_notches)


@dataclass(frozen=True)
class Graph:
    """Plain undirected multigraph; edge ``k`` is ``edges[k]``."""

    vertices: tuple
    edges: tuple

    @classmethod
    def of(cls, g) -> "Graph":
        return cls(tuple(g.vertices), tuple(tuple(e) for e in g.edges))

    def degree(self) -> Counter:
        deg = Counter({v: 0 for v in self.vertices})
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        adj = defaultdict(list)
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        seen = {self.vertices[0]}
        stack = [self.vertices[0]]
        while stack:
            for w in adj[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == len(self.vertices)


@dataclass(frozen=True)
class RodNetwork:
    graph: Graph
    rods: tuple

    def __post_init__(self):
        object.__setattr__(self, "graph", Graph.of(self.graph))
        object.__setattr__(self, "rods", tuple(self.rods))

    @property
    def junction(self) -> dict:
        """vertex -> (rod with a boundary notch there, rod with an interior notch there)."""
        ends, inner = {}, {}
        for r, rod in enumerate(self.rods):
            for pos, v in enumerate(rod.vertices):
                (ends if pos in (0, 3) else inner).setdefault(v, r)
        return {v: (ends.get(v), inner.get(v)) for v in self.graph.vertices}

    def edge_partition(self) -> frozenset:
        return frozenset(frozenset(rod.edges) for rod in self.rods)


@dataclass(frozen=True)
class Violation:
    kind: str
    witness: object
    detail: str = ""


class ValidationReport(list):
    """List of :class:`Violation`; empty means valid."""

    @property
    def ok(self) -> bool:
        return not self

    def kinds(self) -> set:
        return {v.kind for v in self}


def validate_network(net: RodNetwork, partial: bool = False) -> ValidationReport:
    """Every violated network invariant, each with a witness.

    ``partial`` relaxes the completeness requirements (uncovered edges,
    vertices missing a notch, degree below 3) for finite fragments cut out
    of a larger pattern; duplicated roles are still reported.
    """
    report = ValidationReport()
    g = net.graph
    nedges = len(g.edges)
    vset = set(g.vertices)
    cover = Counter()
    end_count = Counter()
    inner_count = Counter()
    rods_at = defaultdict(list)

    for r, rod in enumerate(net.rods):
        verts = tuple(rod.vertices)
        if len(verts) != 4 or len(rod.edges) != 3:
            report.append(Violation("RodNotAPath", r, "a rod needs 4 vertices and 3 edges"))
            continue
        roles = tuple(n.role for n in rod.notches)
        if roles != (Role.BOUNDARY, Role.INTERIOR, Role.INTERIOR, Role.BOUNDARY):
            report.append(Violation("NotchRoles", r, f"roles {[x.value for x in roles]}"))
        for k, n in enumerate(rod.notches):
            want = Facing.DOWN if n.role is Role.BOUNDARY else Facing.UP
            if n.facing is not want:
                report.append(Violation("NotchFacing", (r, k), f"{n.role.value} notch faces {n.facing.value}"))
            if n.depth < 0:
                report.append(Violation("DepthOrder", (r, k), "negative depth"))
        if len(rod.notches) == 4 and max(rod.notches[1].depth, rod.notches[2].depth) > min(
            rod.notches[0].depth, rod.notches[3].depth
        ):
            report.append(Violation("DepthOrder", r, "interior notch deeper than a boundary notch"))
        if len(set(verts)) != 4 or any(v not in vset for v in verts):
            report.append(Violation("RodNotAPath", r, f"vertices {verts} are not 4 distinct graph vertices"))
        for k, e in enumerate(rod.edges):
            if not 0 <= e < nedges:
                report.append(Violation("RodNotAPath", r, f"edge {e} does not exist"))
                continue
            if set(g.edges[e]) != {verts[k], verts[k + 1]} or g.edges[e][0] == g.edges[e][1]:
                report.append(
                    Violation("RodNotAPath", r, f"edge {e} does not join {verts[k]} and {verts[k + 1]}")
                )
            cover[e] += 1
        for pos, v in enumerate(verts):
            rods_at[v].append(r)
            if pos in (0, 3):
                end_count[v] += 1
            else:
                inner_count[v] += 1

    for e in range(nedges):
        if cover[e] > 1:
            report.append(Violation("EdgeMultiplyCovered", e))
        elif cover[e] == 0 and not partial:
            report.append(Violation("EdgeUncovered", e))

    deg = g.degree()
    for v in g.vertices:
        if end_count[v] > 1:
            report.append(Violation("BoundaryBoundaryJunction", v))
        if inner_count[v] > 1:
            report.append(Violation("InteriorInteriorJunction", v))
        if not partial:
            if end_count[v] == 0:
                report.append(Violation("MissingBoundaryNotch", v))
            if inner_count[v] == 0:
                report.append(Violation("MissingInteriorNotch", v))
        if len(set(rods_at[v])) < len(rods_at[v]):
            report.append(Violation("SelfJunction", v, "a rod meets itself"))
        if deg[v] != 3 and not (partial and deg[v] < 3):
            report.append(Violation("DegreeNotThree", v, f"degree {deg[v]}"))
    return report


def counting_identities(net: RodNetwork) -> tuple[int, int, int]:
    """Return ``(rods, V, E)`` after checking ``rods = V/2`` and ``E = 3 rods``."""
    rods = len(net.rods)
    V = len(net.graph.vertices)
    E = len(net.graph.edges)
    if V % 2:
        raise IdentityViolated(f"V = {V} is odd, no rod decomposition can exist")
    if 2 * rods != V or E != 3 * rods:
        raise IdentityViolated(f"rods={rods}, V={V}, E={E} break rods = V/2, E = 3*rods")
    return rods, V, E


# -- decomposition search ---------------------------------------------------


class _Search:
    def __init__(self, graph: Graph):
        self.g = graph
        self.order = {v: i for i, v in enumerate(graph.vertices)}
        self.darts = defaultdict(list)
        for k, (u, v) in enumerate(graph.edges):
            self.darts[u].append(2 * k)
            self.darts[v].append(2 * k + 1)
        self.tail = [graph.edges[d >> 1][d & 1] for d in range(2 * len(graph.edges))]
        self.stem = {}

    def _partner(self, a):
        v = self.tail[a]
        s = self.stem[v]
        return next(d for d in self.darts[v] if d != s and d != a)

    def _run(self, a, edges, verts):
        """Follow the chain through arrival dart ``a``; returns end status or None on a cycle."""
        while True:
            v = self.tail[a]
            s = self.stem.get(v)
            if s is None:
                verts.append(v)
                return "open"
            if s == a:
                verts.append(v)
                return "stem"
            verts.append(v)
            p = self._partner(a)
            e = p >> 1
            if e in edges:
                return None
            edges.append(e)
            if len(edges) > 3:
                return "long"
            a = p ^ 1

    def chain_ok(self, e) -> bool:
        edges = [e]
        fwd, bwd = [], []
        s1 = self._run(2 * e + 1, edges, fwd)
        if s1 is None or s1 == "long":
            return False
        s2 = self._run(2 * e, edges, bwd)
        if s2 is None or s2 == "long":
            return False
        if s1 == "stem" and s2 == "stem":
            if len(edges) != 3:
                return False
            verts = bwd[::-1] + fwd
            return len(set(verts)) == 4
        return True

    def consistent(self, v) -> bool:
        return all(self.chain_ok(d >> 1) for d in self.darts[v])

    def domain(self, v) -> list[int]:
        out = []
        for d in self.darts[v]:
            self.stem[v] = d
            if self.consistent(v) and all(self.consistent(w) for w in self._assigned_neighbors(v)):
                out.append(d)
            del self.stem[v]
        return out

    def _assigned_neighbors(self, v):
        seen = []
        for d in self.darts[v]:
            w = self.tail[d ^ 1]
            if w in self.stem and w not in seen:
                seen.append(w)
        return seen

    def solutions(self) -> Iterator[dict]:
        free = [v for v in self.g.vertices if v not in self.stem]
        if not free:
            yield dict(self.stem)
            return
        best, best_dom = None, None
        for v in free:
            dom = self.domain(v)
            if not dom:
                return
            if best_dom is None or len(dom) < len(best_dom):
                best, best_dom = v, dom
                if len(dom) == 1:
                    break
        for d in best_dom:
            self.stem[best] = d
            yield from self.solutions()
            del self.stem[best]

    def network(self, stem: dict) -> RodNetwork:
        rods = []
        for v in self.g.vertices:
            s = stem[v]
            verts = [v]
            edges = [s >> 1]
            a = s ^ 1
            for _ in range(2):
                w = self.tail[a]
                verts.append(w)
                p = next(d for d in self.darts[w] if d != stem[w] and d != a)
                edges.append(p >> 1)
                a = p ^ 1
            verts.append(self.tail[a])
            if self.order[verts[0]] < self.order[verts[3]]:
                rods.append(Rod(tuple(verts), tuple(edges)))
        return RodNetwork(self.g, tuple(rods))


def _check_input(graph) -> Graph:
    g = Graph.of(graph)
    deg = g.degree()
    bad = [v for v in g.vertices if deg[v] != 3]
    if bad:
        raise NotCubic(f"vertex {bad[0]!r} has degree {deg[bad[0]]}")
    if not g.is_connected():
        raise Disconnected("graph is not connected")
    return g


def decompose(graph) -> RodNetwork | None:
    """First rod decomposition in search order, or None if none exists."""
    g = _check_input(graph)
    if len(g.vertices) % 2:
        return None
    search = _Search(g)
    for stem in search.solutions():
        return search.network(stem)
    return None


def decompose_all(graph, limit: int) -> list[RodNetwork]:
    """Up to ``limit`` distinct decompositions in search order."""
    g = _check_input(graph)
    if limit <= 0 or len(g.vertices) % 2:
        return []
    search = _Search(g)
    out, seen = [], set()
    for stem in search.solutions():
        net = search.network(stem)
        key = net.edge_partition()
        if key in seen:
            continue
        seen.add(key)
        out.append(net)
        if len(out) >= limit:
            break
    return out
