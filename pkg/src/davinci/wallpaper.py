"""Wallpaper group of a decorated periodic pattern.

Symmetries are searched directly: every candidate linear part (rotations
by multiples of 30 degrees, reflections in lines at multiples of 15
degrees) that preserves the lattice is combined with every translation
that sends a reference vertex onto some vertex.  An operation is kept when
it maps vertices, edges and rods onto themselves.  Rods are compared as
notch sequences, so rod roles are respected.

The group name then follows the usual decision tree on the highest
rotation order, the presence of mirrors and genuine glides, and whether
the highest-order rotation centres lie on mirrors.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .patterns import PeriodicPattern, primitive_cell

TOL = 1e-6


@dataclass(frozen=True)
class WallpaperClass:
    name: str
    evidence: dict


def _candidate_linear_parts():
    out = []
    for k in range(12):
        t = math.radians(30 * k)
        out.append(np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]]))
    for k in range(12):
        t = math.radians(30 * k)  # reflection across the line at angle 15k degrees
        out.append(np.array([[math.cos(t), math.sin(t)], [math.sin(t), -math.cos(t)]]))
    return out


def _rounded(x):
    return tuple(int(round(c / TOL)) for c in x)


def _wrap(x):
    y = np.asarray(x, dtype=float) % 1.0
    y[np.abs(y - 1.0) < TOL] = 0.0
    y[np.abs(y) < TOL] = 0.0
    return y


class _Structure:
    def __init__(self, p: PeriodicPattern):
        self.p = p
        self.B = p.basis
        self.Binv = np.linalg.inv(self.B)
        self.ids = [v[0] for v in p.vertices]
        self.f = {vid: np.array([float(fx), float(fy)]) for vid, fx, fy in p.vertices}
        self.lookup = {_rounded(_wrap(x)): vid for vid, x in self.f.items()}
        self.edges = {self._edge_key(u, v, s) for u, v, s in p.edges}
        self.rods = {self._rod_key(r.vertices, r.shifts) for r in p.rods}

    @staticmethod
    def _edge_key(u, v, s):
        s = (int(s[0]), int(s[1]))
        return min((u, v, s), (v, u, (-s[0], -s[1])), key=repr)

    @staticmethod
    def _rod_key(verts, shifts):
        def norm(vs, ss):
            base = ss[0]
            return tuple((v, (int(s[0] - base[0]), int(s[1] - base[1]))) for v, s in zip(vs, ss))

        return min(norm(verts, shifts), norm(verts[::-1], shifts[::-1]), key=repr)

    def vertex_image(self, M, tau):
        """vertex -> (image vertex, integer cell shift) or None."""
        img = {}
        for vid in self.ids:
            y = M @ self.f[vid] + tau
            w = self.lookup.get(_rounded(_wrap(y)))
            if w is None:
                return None
            k = np.round(y - self.f[w])
            if np.max(np.abs(y - self.f[w] - k)) > 1e-5:
                return None
            img[vid] = (w, (int(k[0]), int(k[1])))
        return img

    def is_symmetry(self, M, tau):
        img = self.vertex_image(M, tau)
        if img is None:
            return False
        Mi = np.round(M).astype(int)
        for u, v, s in self.p.edges:
            (wu, ku), (wv, kv) = img[u], img[v]
            ms = Mi @ np.array(s)
            ns = (kv[0] + ms[0] - ku[0], kv[1] + ms[1] - ku[1])
            if self._edge_key(wu, wv, ns) not in self.edges:
                return False
        for r in self.p.rods:
            verts, shifts = [], []
            for v, s in zip(r.vertices, r.shifts):
                w, k = img[v]
                ms = Mi @ np.array(s)
                verts.append(w)
                shifts.append((k[0] + ms[0], k[1] + ms[1]))
            if self._rod_key(verts, shifts) not in self.rods:
                return False
        return True


def symmetry_operations(p: PeriodicPattern):
    """All ``(A, t)`` (Cartesian) with ``x -> A x + t`` a symmetry, translations mod the lattice."""
    st = _Structure(p)
    ops = []
    v0 = st.ids[0]
    for A in _candidate_linear_parts():
        M = st.Binv @ A @ st.B
        if np.max(np.abs(M - np.round(M))) > 1e-6:
            continue
        M = np.round(M)
        if abs(abs(np.linalg.det(M)) - 1) > 1e-9:
            continue
        for w in st.ids:
            tau = _wrap(st.f[w] - M @ st.f[v0])
            if st.is_symmetry(M, tau):
                ops.append((A, st.B @ tau))
    return ops


def _reduce_basis(vectors):
    """Shortest basis of the lattice spanned by ``vectors`` (2D, Gauss reduction on candidates)."""
    cands = []
    for v in vectors:
        if np.linalg.norm(v) > TOL:
            cands.append(np.asarray(v, dtype=float))
    combos = []
    for a, b in itertools.product(range(-3, 4), repeat=2):
        for i, j in itertools.combinations(range(len(cands)), 2):
            w = a * cands[i] + b * cands[j]
            if np.linalg.norm(w) > TOL:
                combos.append(w)
    combos += cands
    combos.sort(key=lambda w: (round(float(np.linalg.norm(w)), 9), -w[0], -w[1]))
    t1 = combos[0]
    for w in combos[1:]:
        if abs(t1[0] * w[1] - t1[1] * w[0]) > TOL:
            return t1, w
    raise ValueError("vectors do not span the plane")


def _lattice_vectors(T, r=4):
    t1, t2 = T
    return [a * t1 + b * t2 for a, b in itertools.product(range(-r, r + 1), repeat=2)]


def _order(A):
    if np.linalg.det(A) < 0:
        return None
    ang = math.degrees(math.atan2(A[1, 0], A[0, 0])) % 360
    ang = min(ang, 360 - ang)
    if ang < 1e-6:
        return 1
    return int(round(360 / ang))


def _axis(A):
    # reflection matrix [[c, s], [s, -c]] fixes the line at angle atan2(s, c) / 2
    phi = math.atan2(A[1, 0], A[0, 0]) / 2
    return np.array([math.cos(phi), math.sin(phi)]), math.degrees(phi) % 180


def _mod_T(x, T):
    Tm = np.column_stack(T)
    c = np.linalg.solve(Tm, x)
    c = c - np.floor(c + 1e-9)
    return Tm @ c


def classify_wallpaper(p: PeriodicPattern) -> WallpaperClass:
    # point symmetries need not preserve a non-primitive cell, so work on the primitive one
    p = primitive_cell(p)
    ops = symmetry_operations(p)
    B = p.basis
    I2 = np.eye(2)
    trans = [t for A, t in ops if np.allclose(A, I2)]
    T = _reduce_basis([B[:, 0], B[:, 1]] + trans)
    lat = _lattice_vectors(T)

    rotations = [(A, t) for A, t in ops if np.linalg.det(A) > 0 and not np.allclose(A, I2)]
    reflections = [(A, t) for A, t in ops if np.linalg.det(A) < 0]
    order = max([1] + [_order(A) for A, _ in rotations])

    mirrors = []  # (axis unit, normal, offset along normal) mirror lines
    mirror_dirs, glide_dirs = set(), set()
    seen_dirs = set()
    for A, t in reflections:
        u, ang = _axis(A)
        key = round(ang, 6) % 180
        nrm = np.array([-u[1], u[0]])
        for l in lat:
            g = float(np.dot(t + l, u))
            if abs(g) < 1e-6:
                mirror_dirs.add(key)
                mirrors.append((u, nrm, float(np.dot(t + l, nrm)) / 2))
            else:
                # glide by g along u is genuine unless g*u is a lattice translation
                gv = g * u
                if not any(np.linalg.norm(gv - m) < 1e-6 for m in lat):
                    glide_dirs.add(key)
        seen_dirs.add(key)

    def on_mirror(x):
        for u, nrm, off in mirrors:
            for l in lat:
                if abs(float(np.dot(x + l, nrm)) - off) < 1e-6:
                    return True
        return False

    centers = []
    if order > 1:
        for A, t in rotations:
            if _order(A) != order:
                continue
            for l in lat:
                c = np.linalg.solve(I2 - A, t + l)
                c = _mod_T(c, T)
                if not any(np.linalg.norm(c - d) < 1e-6 for d in centers):
                    centers.append(c)
    all_centers_on_mirrors = all(on_mirror(c) for c in centers) if centers else False

    has_refl = bool(reflections)
    has_mirror = bool(mirror_dirs)
    has_glide = bool(glide_dirs)
    if order == 1:
        if not has_refl:
            name = "p1"
        elif has_mirror:
            name = "cm" if has_glide else "pm"
        else:
            name = "pg"
    elif order == 2:
        if not has_refl:
            name = "p2"
        elif not has_mirror:
            name = "pgg"
        elif len(mirror_dirs) == 1:
            name = "pmg"
        else:
            name = "cmm" if has_glide else "pmm"
    elif order == 3:
        if not has_refl:
            name = "p3"
        else:
            name = "p3m1" if all_centers_on_mirrors else "p31m"
    elif order == 4:
        if not has_refl:
            name = "p4"
        else:
            name = "p4m" if all_centers_on_mirrors else "p4g"
    else:
        name = "p6m" if has_refl else "p6"

    evidence = {
        "rotation_order": order,
        "rotation_orders": sorted({_order(A) for A, _ in rotations}),
        "mirror_directions": sorted(mirror_dirs),
        "glide_directions": sorted(glide_dirs),
        "reflection_directions": sorted(seen_dirs),
        "translations_per_cell": len(trans),
        "max_order_centers_on_mirrors": all_centers_on_mirrors,
    }
    return WallpaperClass(name, evidence)
