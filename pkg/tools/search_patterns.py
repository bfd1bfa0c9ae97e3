"""Search for periodic Da Vinci rod patterns with prescribed symmetries.

Rods are straight runs of three unit edges along square-lattice or
triangular-lattice lines on a P x P torus.  A 0/1 program picks rods so
that every lattice point is either unused or the end of exactly one rod
and an interior point of exactly one other rod, no unit edge is used
twice, and the chosen rod set is invariant under the given affine maps.

Found patterns are reduced to their primitive cell (or a small supercell
when single-cell replicas fall apart), moved off the cell
boundary and printed in the pattern file format.  This is how the shipped
catalog in ``src/davinci/data/patterns`` was produced:

    python tools/search_patterns.py --trials 400 --seed 1 --out /tmp/found
"""

from __future__ import annotations

import argparse
import itertools
import math
import random
from fractions import Fraction
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp

from davinci.errors import DavinciError
from davinci.io import format_pattern
from davinci.patterns import PeriodicPattern, quotient_network, replicate, sublattice, torus_quotient, unimodular
from davinci.rods import validate_network
from davinci.surface_map import face_census
from davinci.wallpaper import classify_wallpaper

SQUARE = {
    "dirs": [(1, 0), (0, 1)],
    "cart": np.array([[1.0, 0.0], [0.0, 1.0]]),
    "point_group": [np.array(m) for m in ([[1, 0], [0, 1]], [[0, -1], [1, 0]], [[-1, 0], [0, -1]], [[0, 1], [-1, 0]],
                                          [[1, 0], [0, -1]], [[-1, 0], [0, 1]], [[0, 1], [1, 0]], [[0, -1], [-1, 0]])],
}
_R60 = np.array([[0, -1], [1, 1]])
_S = np.array([[0, 1], [1, 0]])
TRIANGULAR = {
    "dirs": [(1, 0), (0, 1), (-1, 1)],
    "cart": np.array([[1.0, 0.5], [0.0, math.sqrt(3) / 2]]),
    "point_group": [np.linalg.matrix_power(_R60, k) for k in range(6)]
    + [np.linalg.matrix_power(_R60, k) @ _S for k in range(6)],
}


STEPS = [(1, 1, 1), (1, 2, 1), (2, 1, 2), (1, 1, 2), (2, 1, 1), (1, 3, 1)]


def candidate_rods(P, dirs, steps):
    """Rods as (notch points, points passed without a notch, unit segments covered)."""
    rods = []
    for a in range(P):
        for b in range(P):
            for d in dirs:
                for st in steps:
                    offs = [0, st[0], st[0] + st[1], sum(st)]
                    if sum(st) >= P:
                        continue
                    notches = tuple((a + k * d[0], b + k * d[1]) for k in offs)
                    passes = tuple((a + k * d[0], b + k * d[1]) for k in range(sum(st) + 1) if k not in offs)
                    segs = tuple(((a + k * d[0], b + k * d[1]), (a + (k + 1) * d[0], b + (k + 1) * d[1])) for k in range(sum(st)))
                    rods.append((notches, passes, segs))
    return rods


def wrap(x, P):
    return (x[0] % P, x[1] % P)


def rod_key(rod, P):
    pts = [wrap(x, P) for x in rod]
    return min(tuple(pts), tuple(pts[::-1]))


def solve(P, lattice, gens, rng, dense, steps=((1, 1, 1),)):
    cands = candidate_rods(P, lattice["dirs"], steps)
    rods = [c[0] for c in cands]
    keys = [rod_key(r, P) for r in rods]
    index = {k: i for i, k in enumerate(keys)}
    n = len(rods)
    if n == 0:
        return None
    pts = {}
    segs = {}
    for i, (r, passes, covered) in enumerate(cands):
        for k, x in enumerate(r):
            role = "end" if k in (0, 3) else "int"
            pts.setdefault(wrap(x, P), {"end": [], "int": [], "pass": []})[role].append(i)
        for x in passes:
            pts.setdefault(wrap(x, P), {"end": [], "int": [], "pass": []})["pass"].append(i)
        for u, v in covered:
            segs.setdefault(frozenset((wrap(u, P), wrap(v, P))), []).append(i)
    rows, lo, hi = [], [], []
    for roles in pts.values():
        row = np.zeros(n)
        for i in roles["end"]:
            row[i] += 1
        for i in roles["int"]:
            row[i] -= 1
        rows.append(row), lo.append(0), hi.append(0)
        # at most one interior notch; a point passed over is touched by nothing else
        row = np.zeros(n)
        for i in roles["int"]:
            row[i] += 1
        for i in roles["pass"]:
            row[i] += 2
        rows.append(row), lo.append(0), hi.append(2)
        row = np.zeros(n)
        for i in roles["end"]:
            row[i] += 1
        for i in roles["pass"]:
            row[i] += 1
        rows.append(row), lo.append(0), hi.append(1)
    for users in segs.values():
        row = np.zeros(n)
        row[users] = 1
        rows.append(row), lo.append(0), hi.append(1)
    for M, t in gens:
        for i, r in enumerate(rods):
            img = [tuple(M @ np.array(x) + t) for x in r]
            j = index.get(rod_key(img, P))
            row = np.zeros(n)
            if j is None:
                row[i] = 1
                rows.append(row), lo.append(0), hi.append(0)
            elif j != i:
                row[i], row[j] = 1, -1
                rows.append(row), lo.append(0), hi.append(0)
    rows.append(np.ones(n)), lo.append(1), hi.append(np.inf)
    c = np.array([rng.random() for _ in range(n)])
    if dense:
        c = -(1 + 0.1 * c)
    res = milp(c, constraints=LinearConstraint(np.array(rows), lo, hi), integrality=np.ones(n), bounds=Bounds(0, 1),
               options={"time_limit": 20})
    if res.x is None:
        return None
    return [rods[i] for i in range(n) if res.x[i] > 0.5]


def to_pattern(chosen, P, lattice, name):
    """Primitive-cell pattern from a rod set on the P x P torus (grid coordinates)."""
    pts = {wrap(x, P) for r in chosen for x in r}
    keys = {rod_key(r, P) for r in chosen}
    trans = []
    for t in itertools.product(range(P), repeat=2):
        if {rod_key([(x[0] + t[0], x[1] + t[1]) for x in k], P) for k in keys} == keys:
            trans.append(t)
    # primitive sublattice of Z^2 generated by P e1, P e2 and the translations
    gens = [np.array((P, 0)), np.array((0, P))] + [np.array(t) for t in trans if t != (0, 0)]
    G = lattice["cart"]
    cands = sorted(
        {tuple(a * g + b * h) for g, h in itertools.combinations(gens, 2) for a, b in itertools.product(range(-3, 4), repeat=2)}
        - {(0, 0)},
        key=lambda v: (float(np.linalg.norm(G @ np.array(v))), v),
    )
    area = P * P // len(trans)
    L1 = None
    basis = None
    for v in cands:
        if L1 is None:
            L1 = v
            continue
        det = L1[0] * v[1] - L1[1] * v[0]
        if abs(det) == area:
            basis = (L1, v) if det > 0 else (L1, (-v[0], -v[1]))
            break
    L = np.array(basis).T  # columns
    Linv = [[Fraction(int(L[1, 1]), area), Fraction(-int(L[0, 1]), area)], [Fraction(-int(L[1, 0]), area), Fraction(int(L[0, 0]), area)]]

    def frac(x):
        return (Linv[0][0] * x[0] + Linv[0][1] * x[1], Linv[1][0] * x[0] + Linv[1][1] * x[1])

    reps = {}

    def locate(x):
        f = frac(x)
        cell = (math.floor(f[0]), math.floor(f[1]))
        key = (f[0] - cell[0], f[1] - cell[1])
        if key not in reps:
            reps[key] = len(reps)
        return reps[key], cell

    edges = {}
    rods = {}
    for r in chosen:
        loc = [locate(x) for x in r]
        base = loc[0][1]
        shifts = tuple((c[0] - base[0], c[1] - base[1]) for _, c in loc)
        verts = tuple(v for v, _ in loc)
        fwd = (verts, shifts)
        rev_base = loc[3][1]
        bwd = (verts[::-1], tuple((c[0] - rev_base[0], c[1] - rev_base[1]) for _, c in loc[::-1]))
        rods.setdefault(min(fwd, bwd), None)
        for k in range(3):
            (u, cu), (v, cv) = loc[k], loc[k + 1]
            s = (cv[0] - cu[0], cv[1] - cu[1])
            key = min((u, v, s), (v, u, (-s[0], -s[1])))
            edges.setdefault(key, None)
    cart = G @ L
    lattice_vecs = (tuple(cart[:, 0]), tuple(cart[:, 1]))
    verts = [(vid, f[0], f[1]) for f, vid in sorted(reps.items(), key=lambda kv: kv[1])]
    rod_list = [(i, r[0], r[1]) for i, r in enumerate(sorted(rods))]
    return PeriodicPattern(lattice_vecs, verts, list(edges), rod_list, name)


def shift_off_boundary(p: PeriodicPattern, delta):
    """Translate every vertex by ``delta`` (fractional) and re-wrap into the unit cell."""
    frac = {}
    cell = {}
    for vid, fx, fy in p.vertices:
        x = (fx + delta[0], fy + delta[1])
        c = (math.floor(x[0]), math.floor(x[1]))
        frac[vid] = (x[0] - c[0], x[1] - c[1])
        cell[vid] = c

    def sh(u, v, s):
        return (s[0] + cell[v][0] - cell[u][0], s[1] + cell[v][1] - cell[u][1])

    verts = [(vid, *frac[vid]) for vid, _, _ in p.vertices]
    edges = [(u, v, sh(u, v, s)) for u, v, s in p.edges]
    rods = [(r.id, r.vertices, tuple(sh(r.vertices[0], v, s) for v, s in zip(r.vertices, r.shifts))) for r in p.rods]
    return PeriodicPattern(p.lattice, verts, edges, rods, p.name)


def _unimodular_candidates():
    mats = [((1, 0), (0, 1))]
    for a, b, c, d in itertools.product(range(-2, 3), repeat=4):
        if a * d - b * c == 1 and ((a, b), (c, d)) not in mats:
            mats.append(((a, b), (c, d)))
    return mats


SUPERCELLS = [((2, 0), (0, 1)), ((1, 0), (0, 2)), ((2, 0), (0, 2)), ((1, 1), (-1, 1)), ((2, 1), (-1, 1)), ((3, 0), (0, 3))]


def polish(p: PeriodicPattern, n_max=8):
    """Pick a cell and offset keeping vertices off the cell boundary with connected replicas.

    The primitive cell is tried first under small changes of basis; when
    single cells always split into pieces, small supercells are tried.
    """
    mats = _unimodular_candidates()
    bases = [p] + [sublattice(p, M) for M in SUPERCELLS] + [unimodular(p, M) for M in mats[1:]]
    for base in bases:
        for i, j in itertools.product(range(7), repeat=2):
            delta = (Fraction(i, 7) + Fraction(1, 97), Fraction(j, 7) + Fraction(1, 89))
            q = shift_off_boundary(base, delta)
            if any(fx == 0 or fy == 0 for _, fx, fy in q.vertices):
                continue
            if replicate(q, 1).components != 1 or replicate(q, 2).components != 1:
                continue
            if all(replicate(q, n).components == 1 for n in range(3, n_max + 1)):
                return q
    return None


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--lattice", choices=["square", "triangular", "any"], default="any")
    ap.add_argument("--unit-steps", action="store_true", help="only rods with three unit steps")
    ap.add_argument("--ops", help="comma-separated point-group indices to use as generators")
    args = ap.parse_args(argv)
    rng = random.Random(args.seed)
    found = {}
    for trial in range(args.trials):
        kind = rng.choice(["square", "triangular"]) if args.lattice == "any" else args.lattice
        lattice = SQUARE if kind == "square" else TRIANGULAR
        P = rng.choice([4, 6, 8, 12] if kind == "square" else [4, 6, 12])
        if args.ops:
            mats = [lattice["point_group"][int(k)] for k in args.ops.split(",")]
        else:
            mats = [rng.choice(lattice["point_group"]) for _ in range(rng.choice([1, 2, 2, 3]))]
        gens = [(M, np.array([rng.randrange(P), rng.randrange(P)])) for M in mats]
        steps = [(1, 1, 1)] if args.unit_steps else rng.sample(STEPS, rng.randint(1, 3))
        steps = sorted(set(steps) | {st[::-1] for st in steps})
        chosen = solve(P, lattice, gens, rng, dense=rng.random() < 0.7, steps=steps)
        if not chosen:
            continue
        try:
            p = to_pattern(chosen, P, lattice, f"{kind}-{trial}")
            m = torus_quotient(p)
        except DavinciError:
            continue
        if not validate_network(quotient_network(p, m)).ok:
            continue
        cls = classify_wallpaper(p).name
        census = tuple(sorted(face_census(m).histogram.items()))
        key = (cls, kind, m.V, census)
        if key in found:
            continue
        found[key] = p
        print(trial, kind, cls, "V=%d" % m.V, census, flush=True)
        if args.out:
            q = polish(p)
            if q is None:
                print("   (no connected offset found)")
                continue
            args.out.mkdir(parents=True, exist_ok=True)
            fname = f"{cls}_{kind}_V{m.V}_{trial}.txt"
            (args.out / fname).write_text(format_pattern(q))


if __name__ == "__main__":
    main()
