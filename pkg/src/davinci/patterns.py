"""Doubly periodic rod patterns, their torus quotients and finite replicas.

A :class:`PeriodicPattern` is given on a fundamental domain: vertices carry
fractional coordinates in ``[0, 1)^2`` with respect to two lattice vectors
``a`` and ``b``; an edge ``(u, v, (sa, sb))`` joins ``u`` to the copy of
``v`` translated by ``sa*a + sb*b``.  Rods list their four notch vertices
together with the cell shift of each one relative to the first.

All combinatorics (rotation systems, clipping, face tracing) run on exact
``Fraction`` fractional coordinates; Cartesian floats are only used for
drawing, symmetry detection and form finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import EmptyPatch, FitFailed, InvalidPattern, QuotientNotCellular
from .rods import Graph, Rod, RodNetwork, validate_network
from .surface_map import SurfaceMap, ccw_order, build_map, euler_characteristic, map_from_drawing


@dataclass(frozen=True)
class PatternRod:
    id: int
    vertices: tuple  # 4 vertex ids
    shifts: tuple  # 4 cell shifts, shifts[0] == (0, 0)


@dataclass(frozen=True)
class PeriodicPattern:
    lattice: tuple  # ((ax, ay), (bx, by))
    vertices: tuple  # (id, Fraction fx, Fraction fy)
    edges: tuple  # (u, v, (sa, sb))
    rods: tuple = ()
    name: str = ""
    notes: tuple = ()

    def __post_init__(self):
        lat = tuple(tuple(float(c) for c in vec) for vec in self.lattice)
        object.__setattr__(self, "lattice", lat)
        verts = tuple((vid, Fraction(fx), Fraction(fy)) for vid, fx, fy in self.vertices)
        object.__setattr__(self, "vertices", verts)
        edges = tuple((u, v, (int(s[0]), int(s[1]))) for u, v, s in self.edges)
        object.__setattr__(self, "edges", edges)
        rods = tuple(
            r if isinstance(r, PatternRod) else PatternRod(r[0], tuple(r[1]), tuple(tuple(s) for s in r[2]))
            for r in self.rods
        )
        object.__setattr__(self, "rods", rods)
        check_pattern(self)

    @property
    def basis(self) -> np.ndarray:
        """2x2 matrix whose columns are the lattice vectors."""
        return np.array(self.lattice, dtype=float).T

    @property
    def frac(self) -> dict:
        return {vid: (fx, fy) for vid, fx, fy in self.vertices}

    def position(self, v, cell=(0, 0)) -> np.ndarray:
        fx, fy = self.frac[v]
        return self.basis @ np.array([float(fx) + cell[0], float(fy) + cell[1]])

    @property
    def orientation(self) -> int:
        return 1 if np.linalg.det(self.basis) > 0 else -1


def check_pattern(p: PeriodicPattern) -> None:
    B = p.basis
    if abs(np.linalg.det(B)) < 1e-12:
        raise InvalidPattern("lattice vectors are linearly dependent")
    ids = [v[0] for v in p.vertices]
    if len(set(ids)) != len(ids):
        raise InvalidPattern("duplicate vertex id")
    coords = set()
    for vid, fx, fy in p.vertices:
        if not (0 <= fx < 1 and 0 <= fy < 1):
            raise InvalidPattern(f"vertex {vid} has fractional coordinates outside [0,1)")
        if (fx, fy) in coords:
            raise InvalidPattern(f"vertex {vid} coincides with another vertex")
        coords.add((fx, fy))
    known = set(ids)
    keys = set()
    for u, v, s in p.edges:
        if u not in known or v not in known:
            raise InvalidPattern(f"edge {u}-{v} references an unknown vertex")
        if u == v and s == (0, 0):
            raise InvalidPattern(f"edge {u}-{v} has zero length")
        key = _edge_key(u, v, s)
        if key in keys:
            raise InvalidPattern(f"duplicate edge {u}-{v} shift {s}")
        keys.add(key)
    if p.rods:
        deg = {vid: 0 for vid in ids}
        for u, v, _ in p.edges:
            deg[u] += 1
            deg[v] += 1
        bad = [vid for vid, d in deg.items() if d != 3]
        if bad:
            raise InvalidPattern(f"vertex {bad[0]} has quotient degree {deg[bad[0]]}, expected 3")
        for rod in p.rods:
            if len(rod.vertices) != 4 or len(rod.shifts) != 4 or tuple(rod.shifts[0]) != (0, 0):
                raise InvalidPattern(f"rod {rod.id} must list 4 vertices with the first shift (0, 0)")
            for k in range(3):
                s = _sub(rod.shifts[k + 1], rod.shifts[k])
                if _edge_key(rod.vertices[k], rod.vertices[k + 1], s) not in keys:
                    raise InvalidPattern(f"rod {rod.id} step {k} is not an edge of the pattern")


def _sub(a, b):
    return (a[0] - b[0], a[1] - b[1])


def _add(a, b):
    return (a[0] + b[0], a[1] + b[1])


def _edge_key(u, v, s):
    s = (int(s[0]), int(s[1]))
    a = (u, v, s)
    b = (v, u, (-s[0], -s[1]))
    return min(a, b, key=repr)


def edge_index(p: PeriodicPattern) -> dict:
    return {_edge_key(u, v, s): k for k, (u, v, s) in enumerate(p.edges)}


# -- torus quotient ----------------------------------------------------------


def _oriented(p: PeriodicPattern, vec):
    # a negatively oriented basis mirrors fractional space; undo it for ccw order
    return vec if p.orientation > 0 else (vec[0], -vec[1])


def torus_quotient(p: PeriodicPattern) -> SurfaceMap:
    """The finite map on the torus obtained by identifying lattice translates."""
    if not p.vertices or not p.edges:
        raise QuotientNotCellular("a cellular torus map needs at least one vertex and one edge")
    verts = [v[0] for v in p.vertices]
    frac = p.frac
    edges = [(u, v) for u, v, _ in p.edges]
    positions = {v: _oriented(p, frac[v]) for v in verts}
    offsets = [_oriented(p, s) for _, _, s in p.edges]
    m = map_from_drawing(verts, edges, positions, offsets)
    for face in m.faces:
        total = (0, 0)
        for d in face:
            s = p.edges[d >> 1][2]
            total = _add(total, s if d & 1 == 0 else (-s[0], -s[1]))
        if total != (0, 0):
            raise QuotientNotCellular(f"face through dart {face[0]} wraps around the torus {total}")
    chi = euler_characteristic(m)
    if chi != 0:
        raise QuotientNotCellular(f"quotient has Euler characteristic {chi}, expected 0")
    return m


def quotient_network(p: PeriodicPattern, m: SurfaceMap | None = None) -> RodNetwork:
    """The pattern's rod assignment as a network over the quotient graph."""
    if m is None:
        m = torus_quotient(p)
    index = edge_index(p)
    rods = []
    for rod in p.rods:
        edges = tuple(
            index[_edge_key(rod.vertices[k], rod.vertices[k + 1], _sub(rod.shifts[k + 1], rod.shifts[k]))]
            for k in range(3)
        )
        rods.append(Rod(tuple(rod.vertices), edges))
    return RodNetwork(Graph.of(m), tuple(rods))


def strip_rods(p: PeriodicPattern) -> PeriodicPattern:
    return replace(p, rods=())


def unimodular(p: PeriodicPattern, M) -> PeriodicPattern:
    """Same pattern on the basis ``(a', b') = (a, b) @ M`` for an integer matrix with det +-1.

    Fractional coordinates are re-expressed and wrapped back into the unit
    square; edge and rod shifts absorb the wrapping.
    """
    M = [[int(M[0][0]), int(M[0][1])], [int(M[1][0]), int(M[1][1])]]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    if det not in (1, -1):
        raise InvalidPattern("re-parameterization matrix must be unimodular")
    inv = [[Fraction(M[1][1], det), Fraction(-M[0][1], det)], [Fraction(-M[1][0], det), Fraction(M[0][0], det)]]

    def apply(x):
        return (inv[0][0] * x[0] + inv[0][1] * x[1], inv[1][0] * x[0] + inv[1][1] * x[1])

    B = p.basis @ np.array(M, dtype=float)
    lattice = (tuple(B[:, 0]), tuple(B[:, 1]))
    new_frac, cell = {}, {}
    for vid, fx, fy in p.vertices:
        x = apply((fx, fy))
        c = (math.floor(x[0]), math.floor(x[1]))
        new_frac[vid] = (x[0] - c[0], x[1] - c[1])
        cell[vid] = c

    def shift(u, v, s):
        ns = apply(s)
        ns = (int(ns[0]), int(ns[1]))
        return _sub(_add(ns, cell[v]), cell[u])

    verts = tuple((vid, *new_frac[vid]) for vid, _, _ in p.vertices)
    edges = tuple((u, v, shift(u, v, s)) for u, v, s in p.edges)
    rods = []
    for rod in p.rods:
        v0 = rod.vertices[0]
        shifts = tuple(shift(v0, v, s) for v, s in zip(rod.vertices, rod.shifts))
        rods.append(PatternRod(rod.id, rod.vertices, shifts))
    return PeriodicPattern(lattice, verts, edges, tuple(rods), p.name, p.notes)


def rebase(p: PeriodicPattern, L) -> PeriodicPattern:
    """Same pattern on the lattice with basis ``(a, b) @ L`` for a rational 2x2 ``L``.

    ``L`` may describe a sublattice (the new cell holds several copies of a
    vertex) or a superlattice of the current one; in the latter case the
    pattern must be invariant under the finer translations.  New vertices
    are numbered ``0, 1, ...`` in order of (old vertex, cell).
    """
    L = [[Fraction(L[0][0]), Fraction(L[0][1])], [Fraction(L[1][0]), Fraction(L[1][1])]]
    det = L[0][0] * L[1][1] - L[0][1] * L[1][0]
    if det == 0:
        raise InvalidPattern("new lattice basis is degenerate")
    inv = [[L[1][1] / det, -L[0][1] / det], [-L[1][0] / det, L[0][0] / det]]

    def to_new(x):
        return (inv[0][0] * x[0] + inv[0][1] * x[1], inv[1][0] * x[0] + inv[1][1] * x[1])

    def split(y):
        c = (math.floor(y[0]), math.floor(y[1]))
        return (y[0] - c[0], y[1] - c[1]), c

    span = math.ceil(sum(abs(L[i][j]) for i in range(2) for j in range(2))) + 1
    frac = p.frac
    ids: dict = {}
    copies = []  # (new id, old vertex, old cell)
    for vid, fx, fy in p.vertices:
        for i in range(-span, span + 1):
            for j in range(-span, span + 1):
                y = to_new((fx + i, fy + j))
                if 0 <= y[0] < 1 and 0 <= y[1] < 1 and y not in ids:
                    ids[y] = len(ids)
                    copies.append((vid, (i, j)))

    def locate(v, cell):
        f, c = split(to_new((frac[v][0] + cell[0], frac[v][1] + cell[1])))
        if f not in ids:
            raise InvalidPattern("pattern is not invariant under the requested lattice")
        return ids[f], c

    verts = tuple((k, *y) for y, k in ids.items())
    edges, seen = [], set()
    for old, c0 in copies:
        for u, v, s in p.edges:
            for x, y, t in ((u, v, s), (v, u, (-s[0], -s[1]))):
                if x != old:
                    continue
                a, ca = locate(x, c0)
                b, cb = locate(y, _add(c0, t))
                key = _edge_key(a, b, _sub(cb, ca))
                if key not in seen:
                    seen.add(key)
                    edges.append((a, b, _sub(cb, ca)))
    rods, seen = [], set()
    for old, c0 in copies:
        for rod in p.rods:
            if rod.vertices[0] != old:
                continue
            loc = [locate(v, _add(c0, s)) for v, s in zip(rod.vertices, rod.shifts)]
            key = (tuple(k for k, _ in loc), tuple(_sub(c, loc[0][1]) for _, c in loc))
            back = loc[::-1]
            rkey = (tuple(k for k, _ in back), tuple(_sub(c, back[0][1]) for _, c in back))
            if key in seen or rkey in seen:
                continue
            seen.add(key)
            rods.append(PatternRod(len(rods), *key))
    B = p.basis @ np.array([[float(c) for c in row] for row in L])
    return PeriodicPattern((tuple(B[:, 0]), tuple(B[:, 1])), verts, tuple(edges), tuple(rods), p.name, p.notes)


def sublattice(p: PeriodicPattern, M) -> PeriodicPattern:
    """Same pattern on the sublattice with basis ``(a, b) @ M`` (integer matrix)."""
    if any(int(c) != c for row in M for c in row):
        raise InvalidPattern("sublattice matrix must be integral")
    return rebase(p, M)


def translations(p: PeriodicPattern) -> list:
    """Exact fractional translations in ``[0, 1)^2`` that map the decorated pattern to itself."""
    from .wallpaper import _Structure

    st = _Structure(p)
    frac = p.frac
    v0 = p.vertices[0][0]
    out = []
    I2 = np.eye(2)
    for w in frac:
        tau = ((frac[w][0] - frac[v0][0]) % 1, (frac[w][1] - frac[v0][1]) % 1)
        if st.is_symmetry(I2, np.array([float(tau[0]), float(tau[1])])):
            out.append(tau)
    return out


def _lattice_basis(vectors):
    """Basis of the integer lattice generated by 2D integer ``vectors``."""
    rows = [list(v) for v in vectors if any(v)]
    basis = []
    for col in range(2):
        # gcd elimination on this coordinate among remaining rows
        while sum(1 for r in rows if r[col] != 0) > 1:
            rows.sort(key=lambda r: (r[col] == 0, abs(r[col])))
            piv = rows[0]
            for r in rows[1:]:
                if r[col]:
                    q = r[col] // piv[col]
                    r[0] -= q * piv[0]
                    r[1] -= q * piv[1]
            rows = [r for r in rows if any(r)]
        piv = [r for r in rows if r[col] != 0]
        if piv:
            basis.append(piv[0])
            rows = [r for r in rows if r is not piv[0]]
    return basis


def primitive_cell(p: PeriodicPattern) -> PeriodicPattern:
    """Re-express ``p`` on the full translation lattice of its decoration, with a reduced basis."""
    taus = translations(p)
    if len(taus) == 1:
        return p
    den = 1
    for t in taus:
        den = math.lcm(den, t[0].denominator, t[1].denominator)
    gens = [(den, 0), (0, den)] + [(int(t[0] * den), int(t[1] * den)) for t in taus]
    b1, b2 = _lattice_basis(gens)
    B = p.basis
    # Lagrange reduction in the Cartesian metric
    def norm2(v):
        w = B @ np.array(v, dtype=float)
        return float(w @ w)

    def dot(u, v):
        return float((B @ np.array(u, dtype=float)) @ (B @ np.array(v, dtype=float)))

    while True:
        if norm2(b1) > norm2(b2):
            b1, b2 = b2, b1
        q = round(dot(b1, b2) / norm2(b1))
        if q == 0:
            break
        b2 = [b2[0] - q * b1[0], b2[1] - q * b1[1]]
    if b1[0] * b2[1] - b1[1] * b2[0] < 0:
        b2 = [-b2[0], -b2[1]]
    L = [[Fraction(b1[0], den), Fraction(b2[0], den)], [Fraction(b1[1], den), Fraction(b2[1], den)]]
    return rebase(p, L)


# -- replication ---------------------------------------------------------------


@dataclass(frozen=True)
class Replica:
    n: int
    points: dict  # exact fractional point -> index
    segments: tuple  # (i, j) point indices
    map: SurfaceMap
    V: int
    E: int
    F: int  # bounded faces only
    components: int


def _clip(P, Q, lo, hi):
    """Liang-Barsky clip of segment PQ to the closed box [lo, hi]^2; exact."""
    if lo <= P[0] <= hi and lo <= P[1] <= hi and lo <= Q[0] <= hi and lo <= Q[1] <= hi:
        return (P, Q) if P != Q else None
    t0, t1 = Fraction(0), Fraction(1)
    d = (Q[0] - P[0], Q[1] - P[1])
    for axis in (0, 1):
        for pk, qk in ((-d[axis], P[axis] - lo), (d[axis], hi - P[axis])):
            if pk == 0:
                if qk < 0:
                    return None
            else:
                r = Fraction(qk) / pk
                if pk < 0:
                    t0 = max(t0, r)
                else:
                    t1 = min(t1, r)
    if t0 >= t1:
        return None
    return (
        (P[0] + t0 * d[0], P[1] + t0 * d[1]),
        (P[0] + t1 * d[0], P[1] + t1 * d[1]),
    )


def replicate(p: PeriodicPattern, n: int) -> Replica:
    """The planar figure of ``n x n`` copies of the fundamental domain.

    Vertices inside the closed patch ``[0, n]^2`` (fractional units) are
    kept; edges are clipped to the patch and a crossing edge ends in a new
    degree-1 vertex on the border.  ``F`` excludes the outer face.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    # work in integer units of 1/L so only border crossings need fractions
    L = math.lcm(*(c.denominator for _, fx, fy in p.vertices for c in (fx, fy)))
    grid = {vid: (int(fx * L), int(fy * L)) for vid, fx, fy in p.vertices}
    reach = 1 + max([max(abs(s[0]), abs(s[1])) for _, _, s in p.edges] + [0])
    points: dict = {}

    def pid(pt):
        if pt not in points:
            points[pt] = len(points)
        return points[pt]

    N = n * L
    for i in range(n + 1):
        for j in range(n + 1):
            for x, y in grid.values():
                pt = (x + i * L, y + j * L)
                if pt[0] <= N and pt[1] <= N:
                    pid(pt)
    segments = []
    for i in range(-reach, n + reach):
        for j in range(-reach, n + reach):
            for u, v, s in p.edges:
                P = (grid[u][0] + i * L, grid[u][1] + j * L)
                Q = (grid[v][0] + (i + s[0]) * L, grid[v][1] + (j + s[1]) * L)
                if max(P[0], Q[0]) < 0 or max(P[1], Q[1]) < 0 or min(P[0], Q[0]) > N or min(P[1], Q[1]) > N:
                    continue
                c = _clip(P, Q, 0, N)
                if c is None:
                    continue
                segments.append((pid(c[0]), pid(c[1])))
    points = {(Fraction(x, L), Fraction(y, L)): k for (x, y), k in points.items()}
    pts = {k: pt for pt, k in points.items()}
    positions = {k: _oriented(p, pt) for k, pt in pts.items()}
    m = map_from_drawing(list(range(len(pts))), segments, positions)
    # each component has one outer boundary: its face of largest signed area
    # (bounded faces are negative, a tree's lone face has area 0)
    labels = _components(len(pts), segments)
    best: dict = {}
    for face in m.faces:
        area = Fraction(0)
        for d in face:
            a, b = positions[m.tail(d)], positions[m.head(d)]
            area += a[0] * b[1] - a[1] * b[0]
        c = labels[m.tail(face[0])]
        best[c] = max(best.get(c, area), area)
    components = len(set(labels.values()))
    F = m.F - len(best)
    return Replica(n, points, tuple(segments), m, m.V, m.E, F, components)


def _components(nv, segments):
    parent = list(range(nv))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in segments:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    return {x: find(x) for x in range(nv)}


@dataclass(frozen=True)
class LinearFit:
    intercept: Fraction
    slope: Fraction
    max_error: Fraction


@dataclass(frozen=True)
class ReplicationSeries:
    samples: tuple  # (n, V_n, E_n, F_n)
    torus: tuple  # (V, E, F) of the quotient
    chi_estimate: Fraction
    residual_fits: dict  # "V"/"E"/"F" -> LinearFit of X_n - n^2 X
    bound: Fraction  # C with |X_n - n^2 X| <= C n for all three counts


def _exact_lstsq(rows, ys):
    """Exact rational least squares via the normal equations."""
    k = len(rows[0])
    A = [[sum(Fraction(r[i]) * r[j] for r in rows) for j in range(k)] for i in range(k)]
    b = [sum(Fraction(r[i]) * y for r, y in zip(rows, ys)) for i in range(k)]
    # Gauss-Jordan on the k x k system
    for c in range(k):
        piv = next((r for r in range(c, k) if A[r][c] != 0), None)
        if piv is None:
            raise FitFailed("degenerate fit: not enough distinct samples")
        A[c], A[piv] = A[piv], A[c]
        b[c], b[piv] = b[piv], b[c]
        for r in range(k):
            if r != c and A[r][c] != 0:
                f = A[r][c] / A[c][c]
                A[r] = [x - f * y for x, y in zip(A[r], A[c])]
                b[r] -= f * b[c]
    return [b[i] / A[i][i] for i in range(k)]


def fit_replication(samples: Sequence[tuple], torus_counts: tuple) -> ReplicationSeries:
    """Check a replication experiment and extract the Euler characteristic.

    Each sample must close to a sphere (``V - E + (F + 1) = 2``).  The
    residuals ``X_n - n^2 X`` of the three counts must be exactly affine in
    ``n`` from n = 2 on (n = 1 may carry corner effects) and the quadratic
    coefficient of ``V_n - E_n + F_n`` is the characteristic estimate.
    """
    samples = tuple(tuple(int(x) for x in s) for s in samples)
    if len(samples) < 3:
        raise FitFailed("need at least three samples")
    for n, Vn, En, Fn in samples:
        if Vn - En + (Fn + 1) != 2:
            raise FitFailed(f"n={n}: V-E+(F+1) = {Vn - En + Fn + 1}, the replica does not close to a sphere")
    V, E, F = torus_counts
    fits = {}
    bound = Fraction(0)
    tail = [s for s in samples if s[0] >= 2]
    for name, idx, X in (("V", 1, V), ("E", 2, E), ("F", 3, F)):
        res = [s[idx] - s[0] ** 2 * X for s in samples]
        bound = max([bound] + [Fraction(abs(r), s[0]) for r, s in zip(res, samples)])
        tres = [s[idx] - s[0] ** 2 * X for s in tail]
        a, b = _exact_lstsq([(1, s[0]) for s in tail], tres)
        err = max(abs(r - (a + b * s[0])) for r, s in zip(tres, tail))
        if err != 0:
            raise FitFailed(f"{name}_n - n^2 {name} is not affine in n (misfit {err})")
        fits[name] = LinearFit(a, b, err)
    q = [s[1] - s[2] + s[3] for s in samples]
    chi, _, _ = _exact_lstsq([(s[0] ** 2, s[0], 1) for s in samples], q)
    return ReplicationSeries(samples, (V, E, F), chi, fits, bound)


def replication_series(p: PeriodicPattern, n_max: int = 8) -> ReplicationSeries:
    if n_max < 3:
        raise ValueError("n_max must be >= 3")
    m = torus_quotient(p)
    samples = []
    for n in range(1, n_max + 1):
        r = replicate(p, n)
        samples.append((n, r.V, r.E, r.F))
    series = fit_replication(samples, (m.V, m.E, m.F))
    if series.chi_estimate != 0:
        raise FitFailed(f"chi estimate {series.chi_estimate} is not 0")
    return series


# -- finite patches ----------------------------------------------------------------


@dataclass(frozen=True)
class Patch:
    """Whole rods near the origin, with planar coordinates.

    Vertex keys are ``(vertex_id, cell_a, cell_b)``.
    """

    pattern: PeriodicPattern
    rings: int
    network: RodNetwork
    positions: dict
    rod_cells: tuple = field(default=())

    @property
    def rods(self):
        return self.network.rods

    def junctions(self) -> list[tuple]:
        """``(vertex, boundary_rod, boundary_pos, interior_rod, interior_pos)`` where both rods are present."""
        ends, inner = {}, {}
        for r, rod in enumerate(self.network.rods):
            for k, v in enumerate(rod.vertices):
                (ends if k in (0, 3) else inner)[v] = (r, k)
        out = []
        for v in self.network.graph.vertices:
            if v in ends and v in inner:
                out.append((v, *ends[v], *inner[v]))
        return out


def patch(p: PeriodicPattern, rings: int) -> Patch:
    """Every rod whose four notch vertices lie in cells within ``rings`` of the origin cell."""
    if rings < 1:
        raise EmptyPatch("rings must be >= 1")
    if not p.rods:
        raise EmptyPatch("pattern carries no rod assignment")
    reach = rings + 4
    keys: dict = {}
    rods = []
    cells = []
    for i in range(-reach, reach + 1):
        for j in range(-reach, reach + 1):
            for rod in p.rods:
                verts = [(v, i + s[0], j + s[1]) for v, s in zip(rod.vertices, rod.shifts)]
                if all(max(abs(a), abs(b)) <= rings for _, a, b in verts):
                    rods.append(verts)
                    cells.append((rod.id, i, j))
                    for v in verts:
                        keys.setdefault(v, None)
    if not rods:
        raise EmptyPatch(f"no whole rod fits within {rings} rings")
    positions = {k: p.position(k[0], (k[1], k[2])) for k in keys}
    edge_ids: dict = {}
    edges = []
    net_rods = []
    for verts in rods:
        eids = []
        for k in range(3):
            key = frozenset((verts[k], verts[k + 1]))
            if key not in edge_ids:
                edge_ids[key] = len(edges)
                edges.append((verts[k], verts[k + 1]))
            eids.append(edge_ids[key])
        net_rods.append(Rod(tuple(verts), tuple(eids)))
    vertices = sorted(keys, key=lambda k: (k[1], k[2], str(k[0])))
    net = RodNetwork(Graph(tuple(vertices), tuple(edges)), tuple(net_rods))
    return Patch(p, rings, net, positions, tuple(cells))


def patch_is_valid(pt: Patch) -> bool:
    return validate_network(pt.network, partial=True).ok
