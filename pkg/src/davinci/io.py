"""Plain-text interchange formats.

Map files (one record per line, ``#`` starts a comment)::

    v <id>                         vertex, integer id
    e <id> <v1> <v2>               edge, integer id
    rot <v> <dart> <dart> ...      darts around v, counterclockwise
    rod <id> <v0> <v1> <v2> <v3> [<e01> <e12> <e23>]

A dart is written ``<edge>+`` (leaving the edge's first endpoint ``v1``)
or ``<edge>-`` (leaving ``v2``).  Edge ids on ``rod`` lines are only
needed when two notch vertices are joined by several edges.

Embedding files are map files plus::

    coord <v> <x> <y> <z>
    offset <e> <dx> <dy> <dz>      added to the head of edge e (periodic maps)

Pattern files::

    name <text>
    note <text>
    lattice <ax> <ay> <bx> <by>
    v <id> <fx> <fy>               fractional coordinates in [0,1), e.g. 1/3
    edge <v1> <v2> <sa> <sb>       v2 translated by sa*a + sb*b
    rod <id> <v0> <v1> <v2> <v3> [<sa1> <sb1> <sa2> <sb2> <sa3> <sb3>]

Rod shifts give the cells of v1..v3 relative to v0; when omitted the rod
must be unambiguous from the edge list.  Floats are written with
``repr`` so that export followed by import is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from .embedding import Embedding3D
from .errors import DavinciError, ParseError
from .patterns import PatternRod, PeriodicPattern
from .rods import Graph, Rod, RodNetwork
from .surface_map import SurfaceMap, build_map

MAP_KEYWORDS = {"v", "e", "rot", "rod", "coord", "offset"}
PATTERN_KEYWORDS = {"name", "note", "lattice", "v", "edge", "rod"}


@dataclass
class Document:
    kind: str  # "map", "embedding" or "pattern"
    map: SurfaceMap | None = None
    embedding: Embedding3D | None = None
    pattern: PeriodicPattern | None = None
    network: RodNetwork | None = None


def _records(text):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        tokens, cols = [], []
        i = 0
        for tok in line.split():
            i = line.index(tok, i)
            tokens.append(tok)
            cols.append(i + 1)
            i += len(tok)
        yield lineno, tokens, cols


def _int(tok, lineno, col):
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected an integer, got {tok!r}", lineno, col) from None


def _float(tok, lineno, col):
    try:
        return float(tok)
    except ValueError:
        raise ParseError(f"expected a number, got {tok!r}", lineno, col) from None


def _fraction(tok, lineno, col):
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"expected a rational number, got {tok!r}", lineno, col) from None


def _arity(tokens, cols, lineno, counts):
    if len(tokens) - 1 not in counts:
        want = " or ".join(str(c) for c in sorted(counts))
        raise ParseError(f"'{tokens[0]}' takes {want} fields, got {len(tokens) - 1}", lineno, cols[0])


def parse(text: str) -> Document:
    records = list(_records(text))
    if not records:
        raise ParseError("empty input", 1, 1)
    heads = {t[0] for _, t, _ in records}
    if "lattice" in heads or "edge" in heads:
        return Document("pattern", pattern=_parse_pattern(records))
    return _parse_map(records)


def load(path) -> Document:
    return parse(Path(path).read_text())


def _parse_map(records) -> Document:
    vertices, edges, edge_ids = [], [], {}
    rot_lines, rod_lines = [], []
    coords, offsets = {}, {}
    for lineno, tokens, cols in records:
        key = tokens[0]
        if key not in MAP_KEYWORDS:
            raise ParseError(f"unknown record {key!r}", lineno, cols[0])
        if key == "v":
            _arity(tokens, cols, lineno, {1})
            vertices.append(_int(tokens[1], lineno, cols[1]))
        elif key == "e":
            _arity(tokens, cols, lineno, {3})
            eid = _int(tokens[1], lineno, cols[1])
            if eid in edge_ids:
                raise ParseError(f"duplicate edge id {eid}", lineno, cols[1])
            edge_ids[eid] = len(edges)
            edges.append((_int(tokens[2], lineno, cols[2]), _int(tokens[3], lineno, cols[3])))
        elif key == "rot":
            if len(tokens) < 2:
                raise ParseError("'rot' needs a vertex", lineno, cols[0])
            rot_lines.append((lineno, tokens, cols))
        elif key == "rod":
            _arity(tokens, cols, lineno, {5, 8})
            rod_lines.append((lineno, tokens, cols))
        elif key == "coord":
            _arity(tokens, cols, lineno, {4})
            v = _int(tokens[1], lineno, cols[1])
            coords[v] = np.array([_float(tokens[k], lineno, cols[k]) for k in (2, 3, 4)])
        elif key == "offset":
            _arity(tokens, cols, lineno, {4})
            offsets[(lineno, cols[1], _int(tokens[1], lineno, cols[1]))] = np.array(
                [_float(tokens[k], lineno, cols[k]) for k in (2, 3, 4)]
            )
    rotations = {}
    for lineno, tokens, cols in rot_lines:
        v = _int(tokens[1], lineno, cols[1])
        darts = []
        for tok, col in zip(tokens[2:], cols[2:]):
            if len(tok) < 2 or tok[-1] not in "+-":
                raise ParseError(f"dart must look like '<edge>+' or '<edge>-', got {tok!r}", lineno, col)
            eid = _int(tok[:-1], lineno, col)
            if eid not in edge_ids:
                raise ParseError(f"unknown edge {eid}", lineno, col)
            darts.append(2 * edge_ids[eid] + (0 if tok[-1] == "+" else 1))
        rotations[v] = darts
    try:
        m = build_map(edges, rotations, vertices or None)
    except DavinciError as exc:
        raise ParseError(str(exc)) from exc
    doc = Document("map", map=m)
    if rod_lines:
        doc.network = _parse_map_rods(rod_lines, m, edge_ids)
    if coords:
        missing = [v for v in m.vertices if v not in coords]
        if missing:
            raise ParseError(f"vertex {missing[0]} has no coordinates")
        offs = {}
        for (lineno, col, eid), vec in offsets.items():
            if eid not in edge_ids:
                raise ParseError(f"unknown edge {eid}", lineno, col)
            offs[edge_ids[eid]] = vec
        doc.kind = "embedding"
        doc.embedding = Embedding3D(m, coords, offs or None)
    return doc


def _parse_map_rods(rod_lines, m, edge_ids) -> RodNetwork:
    rods = []
    for lineno, tokens, cols in rod_lines:
        verts = tuple(_int(tokens[k], lineno, cols[k]) for k in range(2, 6))
        if len(tokens) == 9:
            eids = []
            for k in range(6, 9):
                e = _int(tokens[k], lineno, cols[k])
                if e not in edge_ids:
                    raise ParseError(f"unknown edge {e}", lineno, cols[k])
                eids.append(edge_ids[e])
        else:
            eids = []
            for k in range(3):
                cands = [i for i, e in enumerate(m.edges) if set(e) == {verts[k], verts[k + 1]}]
                if len(cands) != 1:
                    # leave the gap for validation to report as a non-path
                    eids.append(cands[0] if cands else -1)
                else:
                    eids.append(cands[0])
        rods.append(Rod(verts, tuple(eids)))
    return RodNetwork(Graph.of(m), tuple(rods))


def _parse_pattern(records) -> PeriodicPattern:
    lattice = None
    name = ""
    notes = []
    verts, edges, rod_lines = [], [], []
    for lineno, tokens, cols in records:
        key = tokens[0]
        if key not in PATTERN_KEYWORDS:
            raise ParseError(f"unknown record {key!r}", lineno, cols[0])
        if key == "name":
            name = " ".join(tokens[1:])
        elif key == "note":
            notes.append(" ".join(tokens[1:]))
        elif key == "lattice":
            _arity(tokens, cols, lineno, {4})
            vals = [_float(tokens[k], lineno, cols[k]) for k in range(1, 5)]
            lattice = ((vals[0], vals[1]), (vals[2], vals[3]))
        elif key == "v":
            _arity(tokens, cols, lineno, {3})
            verts.append(
                (_int(tokens[1], lineno, cols[1]), _fraction(tokens[2], lineno, cols[2]), _fraction(tokens[3], lineno, cols[3]))
            )
        elif key == "edge":
            _arity(tokens, cols, lineno, {4})
            edges.append(
                (
                    _int(tokens[1], lineno, cols[1]),
                    _int(tokens[2], lineno, cols[2]),
                    (_int(tokens[3], lineno, cols[3]), _int(tokens[4], lineno, cols[4])),
                )
            )
        elif key == "rod":
            _arity(tokens, cols, lineno, {5, 11})
            rod_lines.append((lineno, tokens, cols))
    if lattice is None:
        raise ParseError("pattern file lacks a 'lattice' record", records[0][0], 1)
    rods = []
    for lineno, tokens, cols in rod_lines:
        rid = _int(tokens[1], lineno, cols[1])
        rv = tuple(_int(tokens[k], lineno, cols[k]) for k in range(2, 6))
        if len(tokens) == 12:
            sh = [_int(tokens[k], lineno, cols[k]) for k in range(6, 12)]
            shifts = ((0, 0), (sh[0], sh[1]), (sh[2], sh[3]), (sh[4], sh[5]))
        else:
            shifts = _infer_shifts(rv, edges, lineno, cols)
        rods.append(PatternRod(rid, rv, shifts))
    try:
        return PeriodicPattern(lattice, verts, edges, tuple(rods), name, tuple(notes))
    except DavinciError as exc:
        raise ParseError(str(exc)) from exc


def _infer_shifts(rv, edges, lineno, cols):
    shifts = [(0, 0)]
    for k in range(3):
        a, b = rv[k], rv[k + 1]
        steps = [s for u, v, s in edges if (u, v) == (a, b)]
        steps += [(-s[0], -s[1]) for u, v, s in edges if (u, v) == (b, a) and a != b]
        if len(set(steps)) != 1:
            raise ParseError(f"rod step {a}->{b} is ambiguous or missing; give explicit shifts", lineno, cols[0])
        s = steps[0]
        shifts.append((shifts[-1][0] + s[0], shifts[-1][1] + s[1]))
    return tuple(shifts)


# -- writers ------------------------------------------------------------------


def _dart_token(d):
    return f"{d >> 1}{'+' if d & 1 == 0 else '-'}"


def format_map(m: SurfaceMap, network: RodNetwork | None = None, embedding: Embedding3D | None = None) -> str:
    """Map (or embedding) file text.  Vertex ids must be integers; edges are numbered by index."""
    lines = []
    for v in m.vertices:
        lines.append(f"v {v}")
    for k, (u, v) in enumerate(m.edges):
        lines.append(f"e {k} {u} {v}")
    for v in m.vertices:
        darts = m.darts_at(v)
        if darts:
            lines.append("rot " + " ".join([str(v)] + [_dart_token(d) for d in darts]))
    if network is not None:
        for r, rod in enumerate(network.rods):
            lines.append("rod " + " ".join(str(x) for x in (r, *rod.vertices, *rod.edges)))
    if embedding is not None:
        for v in m.vertices:
            x, y, z = (float(c) for c in embedding.coords[v])
            lines.append(f"coord {v} {x!r} {y!r} {z!r}")
        if embedding.edge_offsets:
            for k in sorted(embedding.edge_offsets):
                dx, dy, dz = (float(c) for c in embedding.edge_offsets[k])
                lines.append(f"offset {k} {dx!r} {dy!r} {dz!r}")
    return "\n".join(lines) + "\n"


def format_embedding(e: Embedding3D, network: RodNetwork | None = None) -> str:
    return format_map(e.map, network, e)


def format_pattern(p: PeriodicPattern) -> str:
    lines = []
    if p.name:
        lines.append(f"name {p.name}")
    for note in p.notes:
        lines.append(f"note {note}")
    (ax, ay), (bx, by) = p.lattice
    lines.append(f"lattice {ax!r} {ay!r} {bx!r} {by!r}")
    for vid, fx, fy in p.vertices:
        lines.append(f"v {vid} {fx} {fy}")
    for u, v, (sa, sb) in p.edges:
        lines.append(f"edge {u} {v} {sa} {sb}")
    for rod in p.rods:
        sh = " ".join(f"{a} {b}" for a, b in rod.shifts[1:])
        lines.append("rod " + " ".join(str(x) for x in (rod.id, *rod.vertices)) + " " + sh)
    return "\n".join(lines) + "\n"
