"""Angular defects of maps realized in 3D space.

An :class:`Embedding3D` places every vertex of a :class:`SurfaceMap` at a
point.  Edges are straight segments.  For periodic (torus) maps drawn in a
single fundamental domain an edge may carry an offset vector added to its
head, so ``vector(2*e) = coords[v] + offset[e] - coords[u]``.

Angles are computed as ``atan2(|a x b|, a . b)`` which stays accurate near
0 and 180 degrees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Hashable, Mapping, Sequence

import numpy as np

from .errors import DegenerateCorner, DescartesViolated, NonTriangularFace
from .surface_map import SurfaceMap, build_map, euler_characteristic

ANGLE_TOL = 1e-9  # radians
COLLINEAR_TOL = 1e-7  # radians
DESCARTES_TOL = 1e-6  # degrees


@dataclass(frozen=True)
class Embedding3D:
    map: SurfaceMap
    coords: Mapping[Hashable, np.ndarray]
    edge_offsets: Mapping[int, np.ndarray] | None = None

    def __post_init__(self):
        coords = {v: np.asarray(self.coords[v], dtype=float) for v in self.map.vertices}
        object.__setattr__(self, "coords", coords)
        if self.edge_offsets is not None:
            offs = {
                k: np.asarray(o, dtype=float)
                for k, o in self.edge_offsets.items()
                if np.any(np.asarray(o) != 0)
            }
            object.__setattr__(self, "edge_offsets", offs or None)

    def offset(self, d: int) -> np.ndarray:
        if not self.edge_offsets:
            return np.zeros(3)
        off = self.edge_offsets.get(d >> 1)
        if off is None:
            return np.zeros(3)
        return off if d & 1 == 0 else -off

    def vector(self, d: int) -> np.ndarray:
        """Displacement from the tail of dart ``d`` to its (lifted) head."""
        return self.coords[self.map.head(d)] + self.offset(d) - self.coords[self.map.tail(d)]

    def head_position(self, d: int) -> np.ndarray:
        return self.coords[self.map.tail(d)] + self.vector(d)

    @property
    def periodic(self) -> bool:
        return bool(self.edge_offsets)


@dataclass(frozen=True)
class DefectReport:
    per_vertex: dict
    total: float
    collinear_vertices: frozenset
    unit: str = "deg"


@dataclass(frozen=True)
class Verdict:
    """Outcome of :func:`polyhedron_theorem_check`.

    ``applicable`` is True when every vertex carries a collinear pair; the
    defect report is then the certificate.  ``contradiction`` flags the
    sphere-like case, where Descartes would demand a total of 720 degrees.
    """

    applicable: bool
    chi: int
    report: DefectReport | None = None
    missing: tuple = ()
    nonpositive: bool = False
    contradiction: bool = False


@dataclass(frozen=True)
class Witness:
    vertex: Hashable
    support: float
    neighbor: Hashable | None = None
    neighbor_support: float | None = None
    neighbor_position: np.ndarray | None = field(default=None, compare=False)


def corner_angle(a: np.ndarray, b: np.ndarray) -> float:
    """Unsigned angle between two vectors, in radians."""
    return math.atan2(float(np.linalg.norm(np.cross(a, b))), float(np.dot(a, b)))


def _face_of_dart(m: SurfaceMap):
    owner = {}
    for fi, f in enumerate(m.faces):
        for d in f:
            owner[d] = fi
    return owner


def _vertex_angles(e: Embedding3D, v, owner=None, check_triangles=True):
    m = e.map
    if owner is None:
        owner = _face_of_dart(m)
    darts = m.darts_at(v)
    angles = []
    for d in darts:
        nxt = m.rotation[d]
        # corner between d and its ccw successor lies in the face through d ^ 1
        if check_triangles and len(m.faces[owner[d ^ 1]]) != 3:
            raise NonTriangularFace(f"vertex {v!r} touches a face of length {len(m.faces[owner[d ^ 1]])}")
        a, b = e.vector(d), e.vector(nxt)
        if np.linalg.norm(a) == 0 or np.linalg.norm(b) == 0:
            raise DegenerateCorner(f"zero-length edge at vertex {v!r}")
        ang = corner_angle(a, b)
        if ang < ANGLE_TOL:
            raise DegenerateCorner(f"zero angle at vertex {v!r}")
        angles.append(ang)
    return angles


def angular_defect(e: Embedding3D, v, radians: bool = False) -> float:
    """360 degrees minus the sum of the triangle corners at ``v``."""
    total = math.fsum(_vertex_angles(e, v))
    defect = 2 * math.pi - total
    return defect if radians else math.degrees(defect)


def collinear_pairs(e: Embedding3D, tol: float = COLLINEAR_TOL) -> set:
    """All ``(vertex, edge_a, edge_b)`` whose edge directions are antiparallel within ``tol`` radians."""
    out = set()
    m = e.map
    for v in m.vertices:
        darts = m.darts_at(v)
        for i in range(len(darts)):
            for j in range(i + 1, len(darts)):
                a, b = e.vector(darts[i]), e.vector(darts[j])
                if np.linalg.norm(a) == 0 or np.linalg.norm(b) == 0:
                    continue
                if math.pi - corner_angle(a, b) <= tol:
                    ea, eb = sorted((darts[i] >> 1, darts[j] >> 1))
                    out.add((v, ea, eb))
    return out


def collinear_darts(e: Embedding3D, v, tol: float = COLLINEAR_TOL) -> list[tuple[int, int]]:
    m = e.map
    darts = m.darts_at(v)
    pairs = []
    for i in range(len(darts)):
        for j in range(i + 1, len(darts)):
            a, b = e.vector(darts[i]), e.vector(darts[j])
            if np.linalg.norm(a) and np.linalg.norm(b) and math.pi - corner_angle(a, b) <= tol:
                pairs.append((darts[i], darts[j]))
    return pairs


def descartes_sum(
    e: Embedding3D,
    tol: float = DESCARTES_TOL,
    radians: bool = False,
    collinear_tol: float = COLLINEAR_TOL,
    check: bool = True,
) -> DefectReport:
    """Per-vertex defects and their total.

    For sphere-like maps (chi = 2) the total is checked against 720 degrees
    unless ``check`` is False.
    """
    m = e.map
    owner = _face_of_dart(m)
    per_vertex = {}
    for v in m.vertices:
        d = 2 * math.pi - math.fsum(_vertex_angles(e, v, owner))
        per_vertex[v] = d if radians else math.degrees(d)
    total = math.fsum(per_vertex[v] for v in m.vertices)
    collinear = frozenset(v for v, _, _ in collinear_pairs(e, collinear_tol))
    report = DefectReport(per_vertex, total, collinear, "rad" if radians else "deg")
    if check and euler_characteristic(m) == 2:
        expected = 4 * math.pi if radians else 720.0
        limit = math.radians(tol) if radians else tol
        if abs(total - expected) > limit:
            raise DescartesViolated(f"total defect {total!r} differs from {expected}")
    return report


def _ear_diagonals(pts: list) -> list[tuple[int, int]]:
    """Diagonals of an ear-clipping triangulation of a simple planar polygon (3D points)."""
    P = np.array(pts)
    c = P.mean(axis=0)
    normal = np.zeros(3)
    for i in range(len(P)):
        normal += np.cross(P[i] - c, P[(i + 1) % len(P)] - c)
    normal /= np.linalg.norm(normal)
    t1 = P[1] - P[0] - np.dot(P[1] - P[0], normal) * normal
    t1 /= np.linalg.norm(t1)
    t2 = np.cross(normal, t1)
    q = [(float(np.dot(p - c, t1)), float(np.dot(p - c, t2))) for p in P]
    scale = max(math.hypot(*a) for a in q)
    eps = 1e-12 * scale * scale

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    idx = list(range(len(q)))
    diagonals = []
    while len(idx) > 3:
        for k in range(len(idx)):
            i, j, l = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            if cross(q[i], q[j], q[l]) <= eps:
                continue
            if any(
                cross(q[i], q[j], q[m]) >= -eps and cross(q[j], q[l], q[m]) >= -eps and cross(q[l], q[i], q[m]) >= -eps
                for m in idx
                if m not in (i, j, l)
            ):
                continue
            diagonals.append((i, l))
            idx.pop(k)
            break
        else:
            raise DegenerateCorner("face polygon has no ear; it is not a simple planar polygon")
    return diagonals


def triangulate(e: Embedding3D, method: str = "fan") -> Embedding3D:
    """Triangulate every face; vertices are untouched and each k-gon gains k - 3 diagonals.

    ``fan`` joins the lowest-id vertex of the face to all others.  ``ear``
    clips ears of the (planar, simple) face polygon instead, which avoids
    degenerate triangles at straight corners.
    """
    m = e.map
    if all(len(f) == 3 for f in m.faces):
        return e
    order = {v: i for i, v in enumerate(m.vertices)}
    edges = list(m.edges)
    offsets = {k: e.offset(2 * k) for k in range(len(edges))}
    # insert[d] = darts to place right after d in the rotation, in ccw order
    insert: dict[int, list[int]] = {}
    for face in m.faces:
        k = len(face)
        if k <= 3:
            continue
        start = min(range(k), key=lambda i: (order[m.tail(face[i])], i))
        f = face[start:] + face[:start]
        w = [m.tail(d) for d in f]
        # accumulated offset (and lifted displacement) from w0 to wj along the face
        acc, lift = [np.zeros(3)], [np.zeros(3)]
        for d in f[:-1]:
            acc.append(acc[-1] + e.offset(d))
            lift.append(lift[-1] + e.vector(d))
        if method == "fan":
            diagonals = [(0, j) for j in range(2, k - 1)]
        elif method == "ear":
            diagonals = _ear_diagonals([e.coords[w[0]] + x for x in lift])
        else:
            raise ValueError(f"unknown triangulation method {method!r}")
        at_corner: dict[int, list[tuple[int, int]]] = {}
        for i, j in diagonals:
            idx = len(edges)
            edges.append((w[i], w[j]))
            offsets[idx] = acc[j] - acc[i]
            at_corner.setdefault(i, []).append(((j - i) % k, 2 * idx))
            at_corner.setdefault(j, []).append(((i - j) % k, 2 * idx + 1))
        # the corner at w_i sits between f[i-1]^1 and f[i]; farther diagonals come first
        for i, lst in at_corner.items():
            insert.setdefault(f[i - 1] ^ 1, []).extend(d for _, d in sorted(lst, reverse=True))
    rotations = {}
    for v in m.vertices:
        cyc = []
        for d in m.darts_at(v):
            cyc.append(d)
            cyc.extend(insert.get(d, ()))
        rotations[v] = cyc
    new_map = build_map(edges, rotations, m.vertices)
    offs = offsets if e.periodic else None
    return Embedding3D(new_map, e.coords, offs)


def polyhedron_theorem_check(
    e: Embedding3D, tol: float = ANGLE_TOL, collinear_tol: float = COLLINEAR_TOL
) -> Verdict:
    """Certify nonpositive defects when every vertex has a collinear pair."""
    m = e.map
    chi = euler_characteristic(m)
    missing = tuple(v for v in m.vertices if not collinear_darts(e, v, collinear_tol))
    if missing:
        return Verdict(False, chi, missing=missing)
    report = descartes_sum(e, collinear_tol=collinear_tol, check=False)
    tol_deg = math.degrees(tol)
    nonpositive = all(d <= tol_deg for d in report.per_vertex.values()) and report.total <= tol_deg * m.V
    return Verdict(True, chi, report, (), nonpositive, contradiction=(chi == 2))


def support_witness(e: Embedding3D, direction: Sequence[float], tol: float = ANGLE_TOL) -> Witness:
    """Extreme vertex in ``direction`` plus, if it lies inside a straight pair, its escaping neighbor.

    Among vertices within ``tol`` of the maximum support the first in map
    order wins.  If that vertex carries a collinear pair, the neighbor along
    the pair with the larger support is returned too; convexity guarantees
    its support is at least the maximum up to rounding.
    """
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)
    m = e.map
    supports = {v: float(np.dot(u, e.coords[v])) for v in m.vertices}
    top = max(supports.values())
    best = next(v for v in m.vertices if supports[v] >= top - tol)
    pairs = collinear_darts(e, best)
    if not pairs:
        return Witness(best, supports[best])
    cand = []
    for da, db in pairs:
        for d in (da, db):
            pos = e.head_position(d)
            cand.append((float(np.dot(u, pos)), m.head(d), pos))
    s, nb, pos = max(cand, key=lambda c: c[0])
    return Witness(best, supports[best], nb, s, pos)
