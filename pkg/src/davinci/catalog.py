"""Builtin inputs: the periodic pattern catalog, polyhedra and small graphs.

Names are used with an ``@`` prefix on the command line, e.g.
``davinci euler @pattern-03 --surface torus``.
"""

from __future__ import annotations

import math
from fractions import Fraction
from importlib import resources

import numpy as np

from . import polyhedra
from .embedding import Embedding3D
from .io import Document, parse
from .patterns import PeriodicPattern, sublattice, torus_quotient
from .surface_map import build_map

PATTERN_NAMES = [f"pattern-{k:02d}" for k in range(1, 12)] + ["pattern-new"]
TRIANGLE_DODECAGON = "pattern-05"


def load_pattern(name: str) -> PeriodicPattern:
    text = resources.files("davinci.data.patterns").joinpath(f"{name}.txt").read_text()
    return parse(text).pattern


def catalog() -> list[PeriodicPattern]:
    """The eleven catalog patterns followed by the "new" one."""
    return [load_pattern(n) for n in PATTERN_NAMES]


def square_grid() -> PeriodicPattern:
    return PeriodicPattern(((1, 0), (0, 1)), [(0, Fraction(1, 2), Fraction(1, 2))], [(0, 0, (1, 0)), (0, 0, (0, 1))], name="square grid")


def k4_map():
    """K4 drawn in the plane (a tetrahedron's combinatorics)."""
    return polyhedra.tetrahedron().map


def torus_embedding(p: PeriodicPattern, R: float = 3.0, r: float = 1.0, refine: int = 3) -> Embedding3D:
    """Quotient of ``p`` (refined ``refine`` times along both axes) on a torus of revolution.

    Refinement keeps every edge a chord of positive length.
    """
    q = sublattice(p, ((refine, 0), (0, refine))) if refine > 1 else p
    m = torus_quotient(q)
    coords = {}
    for vid, fx, fy in q.vertices:
        a, b = 2 * math.pi * float(fx), 2 * math.pi * float(fy)
        coords[vid] = np.array([(R + r * math.cos(b)) * math.cos(a), (R + r * math.cos(b)) * math.sin(a), r * math.sin(b)])
    return Embedding3D(m, coords)


def flat_embedding(p: PeriodicPattern, A=None) -> Embedding3D:
    """Quotient of ``p`` laid flat: Cartesian positions mapped into space by the 3x2 matrix ``A``.

    Edge offsets carry the lattice shifts, so the embedding is a closed
    flat torus in which every straight rod stays straight.
    """
    A = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]) if A is None else np.asarray(A, dtype=float)
    m = torus_quotient(p)
    B = p.basis
    coords = {vid: A @ p.position(vid) for vid, _, _ in p.vertices}
    offsets = {k: A @ (B @ np.array(s, dtype=float)) for k, (_, _, s) in enumerate(p.edges)}
    return Embedding3D(m, coords, offsets)


_POLYHEDRA = {
    "trunc-icosa": polyhedra.truncated_icosahedron,
    "cube": polyhedra.cube,
    "tetra": polyhedra.tetrahedron,
    "k4": polyhedra.tetrahedron,
    "prism": polyhedra.triangular_prism,
    "goldberg-2-0": polyhedra.goldberg_2_0,
}


def builtin_names() -> list[str]:
    return PATTERN_NAMES + ["square-grid"] + sorted(_POLYHEDRA)


def builtin(name: str) -> Document:
    """Document for a builtin name (with or without the leading ``@``)."""
    name = name.lstrip("@")
    if name in PATTERN_NAMES:
        return Document("pattern", pattern=load_pattern(name))
    if name == "square-grid":
        return Document("pattern", pattern=square_grid())
    if name in _POLYHEDRA:
        e = _POLYHEDRA[name]()
        if name == "k4":
            return Document("map", map=e.map)
        return Document("embedding", map=e.map, embedding=e)
    raise KeyError(f"unknown builtin {name!r}; known: {', '.join(builtin_names())}")
