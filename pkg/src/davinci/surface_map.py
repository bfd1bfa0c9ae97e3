"""Graphs cellularly embedded on closed orientable surfaces.

A map is stored as a rotation system over darts (half-edges).  Edge ``e``
joining ``u`` to ``v`` owns two darts: ``2*e`` leaving ``u`` and ``2*e + 1``
leaving ``v``.  The edge involution is therefore ``d ^ 1``.  ``rotation[d]``
is the next dart counterclockwise around the tail vertex of ``d``.

Faces are the orbits of the face-tracing permutation

    next(d) = rotation[d ^ 1]

i.e. walk along ``d``, turn around at its head and take the next dart
counterclockwise from the reversed one.  With counterclockwise rotations
taken from a planar drawing this keeps the face on the right, so bounded
faces come out clockwise and the outer face counterclockwise.
"""

from __future__ import annotations

import functools
from collections import Counter, defaultdict
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import (
    ConnectivityRequired,
    DanglingEdge,
    MalformedRotation,
    OddCharacteristic,
)

Vertex = Hashable


@dataclass(frozen=True)
class Dart:
    id: int
    vertex: Vertex


@dataclass(frozen=True)
class FaceCensus:
    histogram: dict

    @property
    def F(self) -> int:
        return sum(self.histogram.values())

    @property
    def T(self) -> int:
        return self.histogram.get(3, 0)

    @property
    def D(self) -> int:
        return self.histogram.get(12, 0)

    def degree_sum(self) -> int:
        return sum(k * c for k, c in self.histogram.items())


class SurfaceMap:
    """Immutable rotation-system map.  Build instances with :func:`build_map`."""

    __slots__ = ("vertices", "edges", "rotation", "faces", "_index", "_tails", "_first", "_degree")

    def __init__(self, vertices, edges, rotation):
        self.vertices = tuple(vertices)
        self.edges = tuple(tuple(e) for e in edges)
        self.rotation = tuple(rotation)
        self._index = {v: i for i, v in enumerate(self.vertices)}
        self._tails = tuple(self.edges[d >> 1][d & 1] for d in range(2 * len(self.edges)))
        self._first = {}
        self._degree = Counter(self._tails)
        for d, t in enumerate(self._tails):
            self._first.setdefault(t, d)
        self.faces = self._trace_faces()

    # -- basic accessors ---------------------------------------------------
    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def E(self) -> int:
        return len(self.edges)

    @property
    def F(self) -> int:
        # an isolated vertex bounds one face of its own
        return len(self.faces) + sum(1 for v in self.vertices if self.degree(v) == 0)

    @property
    def darts(self) -> list[Dart]:
        return [Dart(d, self._tails[d]) for d in range(2 * self.E)]

    @staticmethod
    def involution(d: int) -> int:
        return d ^ 1

    def tail(self, d: int) -> Vertex:
        return self._tails[d]

    def head(self, d: int) -> Vertex:
        return self._tails[d ^ 1]

    def face_next(self, d: int) -> int:
        return self.rotation[d ^ 1]

    def darts_at(self, v: Vertex) -> list[int]:
        """Darts leaving ``v`` in counterclockwise order."""
        start = self._first.get(v)
        if start is None:
            return []
        out = [start]
        d = self.rotation[start]
        while d != start:
            out.append(d)
            d = self.rotation[d]
        return out

    def degree(self, v: Vertex) -> int:
        return self._degree.get(v, 0)

    def neighbors(self, v: Vertex) -> list[Vertex]:
        return [self.head(d) for d in self.darts_at(v)]

    def face_vertices(self, face: Sequence[int]) -> list[Vertex]:
        return [self._tails[d] for d in face]

    def _trace_faces(self):
        seen = [False] * len(self.rotation)
        faces = []
        for d0 in range(len(self.rotation)):
            if seen[d0]:
                continue
            orbit = []
            d = d0
            while not seen[d]:
                seen[d] = True
                orbit.append(d)
                d = self.rotation[d ^ 1]
            faces.append(tuple(orbit))
        return tuple(faces)

    def is_connected(self) -> bool:
        if not self.vertices:
            return True
        adj = {v: [] for v in self.vertices}
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

    def relabeled(self, edge_order: Sequence[int], flips: Sequence[bool]) -> "SurfaceMap":
        """Same embedded graph with edges permuted and orientations flipped.

        ``edge_order[k]`` is the old index of new edge ``k``; ``flips[k]``
        swaps its endpoints.  Used to check that counts do not depend on
        dart labels.
        """
        new_of_old = {}
        edges = []
        for k, old in enumerate(edge_order):
            u, v = self.edges[old]
            if flips[k]:
                u, v = v, u
                new_of_old[2 * old] = 2 * k + 1
                new_of_old[2 * old + 1] = 2 * k
            else:
                new_of_old[2 * old] = 2 * k
                new_of_old[2 * old + 1] = 2 * k + 1
            edges.append((u, v))
        rotation = [0] * len(self.rotation)
        for old, new in new_of_old.items():
            rotation[new] = new_of_old[self.rotation[old]]
        return SurfaceMap(self.vertices, edges, rotation)

    def __repr__(self):
        return f"SurfaceMap(V={self.V}, E={self.E}, F={self.F})"


def build_map(
    edges: Sequence[tuple],
    rotations: Mapping[Vertex, Sequence[int]],
    vertices: Iterable[Vertex] | None = None,
) -> SurfaceMap:
    """Build a map from an edge list and per-vertex cyclic dart orders.

    ``rotations[v]`` lists the darts leaving ``v`` counterclockwise, using
    the dart numbering described in the module docstring.  When
    ``vertices`` is omitted the vertex set is inferred from the edges and
    the rotation keys.
    """
    edges = [tuple(e) for e in edges]
    if vertices is None:
        seen = {}
        for u, v in edges:
            seen.setdefault(u, None)
            seen.setdefault(v, None)
        for v in rotations:
            seen.setdefault(v, None)
        vertices = list(seen)
    else:
        vertices = list(vertices)
        declared = set(vertices)
        if len(declared) != len(vertices):
            raise MalformedRotation("duplicate vertex id")
        for k, (u, v) in enumerate(edges):
            for w in (u, v):
                if w not in declared:
                    raise DanglingEdge(f"edge {k} endpoint {w!r} is not a declared vertex")
        for v in rotations:
            if v not in declared:
                raise DanglingEdge(f"rotation given for undeclared vertex {v!r}")

    ndarts = 2 * len(edges)
    tails = [edges[d >> 1][d & 1] for d in range(ndarts)]
    rotation = [-1] * ndarts
    at = defaultdict(list)
    for d, t in enumerate(tails):
        at[t].append(d)
    for v in vertices:
        expected = at.get(v, [])
        cycle = list(rotations.get(v, ()))
        if sorted(cycle) != expected:
            missing = sorted(set(expected) - set(cycle))
            extra = [d for d, c in Counter(cycle).items() if c > 1 or d not in expected]
            raise MalformedRotation(
                f"rotation at vertex {v!r}: missing darts {missing}, unexpected/duplicated {extra}"
            )
        for i, d in enumerate(cycle):
            rotation[d] = cycle[(i + 1) % len(cycle)]
    return SurfaceMap(vertices, edges, rotation)


def _angle_cmp(a, b):
    """Exact counterclockwise comparison of direction vectors from +x axis."""

    def half(p):
        x, y = p
        return 0 if (y > 0 or (y == 0 and x > 0)) else 1

    ha, hb = half(a), half(b)
    if ha != hb:
        return ha - hb
    cross = a[0] * b[1] - a[1] * b[0]
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    return 0


def ccw_order(vectors: Mapping[int, tuple]) -> list[int]:
    """Keys of ``vectors`` sorted counterclockwise by direction.

    Works exactly for ``Fraction`` or integer components.
    """
    return sorted(vectors, key=functools.cmp_to_key(lambda i, j: _angle_cmp(vectors[i], vectors[j])))


def map_from_drawing(vertices, edges, positions, offsets=None) -> SurfaceMap:
    """Rotation system read off a straight-line drawing.

    ``positions[v]`` is a 2D point.  ``offsets[e]`` (optional) is added to
    the head of edge ``e``, which is how periodic quotients are drawn.
    """
    vectors = {}
    for k, (u, v) in enumerate(edges):
        pu, pv = positions[u], positions[v]
        off = offsets[k] if offsets is not None else (0, 0)
        dx = pv[0] + off[0] - pu[0]
        dy = pv[1] + off[1] - pu[1]
        vectors[2 * k] = (dx, dy)
        vectors[2 * k + 1] = (-dx, -dy)
    by_vertex = {v: {} for v in vertices}
    for d, vec in vectors.items():
        by_vertex[edges[d >> 1][d & 1]][d] = vec
    rotations = {v: ccw_order(ds) for v, ds in by_vertex.items()}
    return build_map(edges, rotations, vertices)


def euler_characteristic(m: SurfaceMap) -> int:
    return m.V - m.E + m.F


def face_census(m: SurfaceMap) -> FaceCensus:
    hist = Counter(len(f) for f in m.faces)
    isolated = sum(1 for v in m.vertices if m.degree(v) == 0)
    if isolated:
        hist[0] += isolated
    return FaceCensus(dict(sorted(hist.items())))


def genus(m: SurfaceMap) -> int:
    if not m.is_connected():
        raise ConnectivityRequired("genus is defined for connected maps only")
    chi = euler_characteristic(m)
    if chi % 2:
        raise OddCharacteristic(f"Euler characteristic {chi} is odd")
    return (2 - chi) // 2
