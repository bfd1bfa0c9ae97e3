"""Builtin sphere-like polyhedra with coordinates.

Rotation systems are read off the geometry: neighbors are ordered
counterclockwise as seen from outside, using the vertex position relative
to the centroid as outward normal.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .embedding import Embedding3D
from .surface_map import build_map

PHI = (1 + math.sqrt(5)) / 2


def _outward_rotations(points: np.ndarray, edges):
    center = points.mean(axis=0)
    nbrs = {i: [] for i in range(len(points))}
    for k, (u, v) in enumerate(edges):
        nbrs[u].append((2 * k, v))
        nbrs[v].append((2 * k + 1, u))
    rotations = {}
    for i, lst in nbrs.items():
        n = points[i] - center
        n = n / np.linalg.norm(n)
        ref = points[lst[0][1]] - points[i]
        t1 = ref - np.dot(ref, n) * n
        t1 /= np.linalg.norm(t1)
        t2 = np.cross(n, t1)

        def ang(item):
            w = points[item[1]] - points[i]
            return math.atan2(float(np.dot(w, t2)), float(np.dot(w, t1))) % (2 * math.pi)

        rotations[i] = [d for d, _ in sorted(lst, key=ang)]
    return rotations


def embedding_from_points(points, edges) -> Embedding3D:
    points = np.asarray(points, dtype=float)
    edges = [tuple(sorted(e)) for e in edges]
    m = build_map(edges, _outward_rotations(points, edges), range(len(points)))
    return Embedding3D(m, {i: points[i] for i in range(len(points))})


def _edges_by_length(points, rel_tol=1e-6):
    pts = np.asarray(points, dtype=float)
    dist = {
        (i, j): float(np.linalg.norm(pts[i] - pts[j]))
        for i, j in itertools.combinations(range(len(pts)), 2)
    }
    shortest = min(dist.values())
    return [e for e, d in dist.items() if abs(d - shortest) <= rel_tol * shortest]


def tetrahedron() -> Embedding3D:
    pts = [(1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1)]
    return embedding_from_points(pts, _edges_by_length(pts))


def cube() -> Embedding3D:
    pts = list(itertools.product((-1, 1), repeat=3))
    return embedding_from_points(pts, _edges_by_length(pts))


def triangular_prism() -> Embedding3D:
    pts = []
    for z in (-1.0, 1.0):
        for k in range(3):
            a = 2 * math.pi * k / 3
            pts.append((math.cos(a), math.sin(a), z))
    edges = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]
    return embedding_from_points(pts, edges)


def _even_permutations(p):
    x, y, z = p
    return [(x, y, z), (y, z, x), (z, x, y)]


def _sign_variants(p):
    out = set()
    for signs in itertools.product((1, -1), repeat=3):
        out.add(tuple(s * c if c != 0 else 0.0 for s, c in zip(signs, p)))
    return out


def truncated_icosahedron() -> Embedding3D:
    """Even permutations of (0, +-1, +-3phi), (+-1, +-(2+phi), +-2phi), (+-phi, +-2, +-phi^3); edge length 2."""
    base = [(0.0, 1.0, 3 * PHI), (1.0, 2 + PHI, 2 * PHI), (PHI, 2.0, PHI**3)]
    pts = set()
    for b in base:
        for s in _sign_variants(b):
            for q in _even_permutations(s):
                pts.add(tuple(round(c, 12) for c in q))
    pts = sorted(pts)
    return embedding_from_points(pts, _edges_by_length(pts))


def icosahedron():
    pts = []
    for a, b in itertools.product((1, -1), repeat=2):
        pts += [(0, a, b * PHI), (a, b * PHI, 0), (b * PHI, 0, a)]
    pts = np.array(pts, dtype=float)
    edges = _edges_by_length(pts)
    adj = {i: set() for i in range(len(pts))}
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    faces = sorted(
        {tuple(sorted(t)) for u, v in edges for t in [(u, v, w) for w in adj[u] & adj[v]]}
    )
    return pts, faces


def goldberg_2_0() -> Embedding3D:
    """GP(2,0): dual of the frequency-2 geodesic icosahedron (80 vertices, 12 pentagons, 30 hexagons)."""
    ico, faces = icosahedron()
    pts = [p / np.linalg.norm(p) for p in ico]
    mids = {}

    def mid(i, j):
        key = (min(i, j), max(i, j))
        if key not in mids:
            m = pts[i] + pts[j]
            mids[key] = len(pts)
            pts.append(m / np.linalg.norm(m))
        return mids[key]

    tris = []
    for a, b, c in faces:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        tris += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
    centers = np.array([sum(pts[i] for i in t) / 3 for t in tris])
    centers = np.array([c / np.linalg.norm(c) for c in centers])
    owner = {}
    for k, t in enumerate(tris):
        for e in itertools.combinations(sorted(t), 2):
            owner.setdefault(e, []).append(k)
    edges = [tuple(sorted(ks)) for ks in owner.values()]
    return embedding_from_points(centers, sorted(edges))
