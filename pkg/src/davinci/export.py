"""SVG drawings of patterns and patches, OBJ meshes of embeddings and form-found rods."""

from __future__ import annotations

import numpy as np

from .embedding import Embedding3D, triangulate
from .patterns import Patch, PeriodicPattern, patch, replicate

_STYLE = (
    ".rod{stroke:#8a5a2b;stroke-width:%(w)s;fill:none;stroke-linecap:round}"
    ".edge{stroke:#555;stroke-width:%(w)s;fill:none}"
    ".boundary{fill:#c0392b}.interior{fill:#2c7fb8}"
)


def _svg(elements, lo, hi, width):
    span = hi - lo
    pad = 0.05 * float(max(span))
    x0, y0 = lo - pad
    w, h = span + 2 * pad
    stroke = 0.006 * float(max(w, h))
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{width * h / w:.1f}" '
        f'viewBox="{x0:.6g} {-(y0 + h):.6g} {w:.6g} {h:.6g}">\n'
        f"<style>{_STYLE % {'w': f'{stroke:.4g}'}}</style>\n"
        '<g transform="scale(1,-1)">\n'
    )
    return head + "\n".join(elements) + "\n</g>\n</svg>\n", stroke


def patch_svg(pt: Patch, width: int = 800) -> str:
    """One ``<polyline class="rod">`` per rod plus a dot per notch, colored by role."""
    pos = pt.positions
    pts = np.array([pos[k] for k in pos])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    elements = []
    for r, rod in enumerate(pt.rods):
        coords = " ".join(f"{pos[v][0]:.6g},{pos[v][1]:.6g}" for v in rod.vertices)
        elements.append(f'<polyline class="rod" data-rod="{r}" points="{coords}"/>')
    body, stroke = _svg(elements, lo, hi, width)
    dots = []
    for rod in pt.rods:
        for k, v in enumerate(rod.vertices):
            cls = "boundary" if k in (0, 3) else "interior"
            dots.append(f'<circle class="{cls}" cx="{pos[v][0]:.6g}" cy="{pos[v][1]:.6g}" r="{1.5 * stroke:.4g}"/>')
    return body.replace("\n</g>", "\n" + "\n".join(dots) + "\n</g>", 1)


def pattern_svg(p: PeriodicPattern, rings: int = 2, width: int = 800) -> str:
    """Rods of ``p`` within ``rings`` cells of the origin (whole rods only)."""
    return patch_svg(patch(p, rings), width)


def replica_svg(p: PeriodicPattern, n: int, width: int = 800) -> str:
    """The clipped ``n x n`` replica as plain edges."""
    rep = replicate(p, n)
    B = p.basis
    xy = {k: B @ np.array([float(c) for c in pt]) for pt, k in rep.points.items()}
    pts = np.array(list(xy.values()))
    elements = [
        f'<line class="edge" x1="{xy[a][0]:.6g}" y1="{xy[a][1]:.6g}" x2="{xy[b][0]:.6g}" y2="{xy[b][1]:.6g}"/>'
        for a, b in rep.segments
    ]
    return _svg(elements, pts.min(axis=0), pts.max(axis=0), width)[0]


def embedding_svg(e: Embedding3D, width: int = 800) -> str:
    """Top view (x, y) of an embedding's edges."""
    m = e.map
    elements = []
    ends = []
    for k in range(m.E):
        a = e.coords[m.tail(2 * k)]
        b = e.head_position(2 * k)
        ends += [a[:2], b[:2]]
        elements.append(f'<line class="edge" x1="{a[0]:.6g}" y1="{a[1]:.6g}" x2="{b[0]:.6g}" y2="{b[1]:.6g}"/>')
    pts = np.array(ends) if ends else np.array([e.coords[v][:2] for v in m.vertices])
    return _svg(elements, pts.min(axis=0), pts.max(axis=0), width)[0]


def embedding_obj(e: Embedding3D, method: str = "fan") -> str:
    """Wavefront OBJ of the triangulated embedding (closed, non-periodic maps only)."""
    if e.periodic:
        raise ValueError("OBJ export needs a closed embedding without edge offsets")
    t = triangulate(e, method)
    m = t.map
    index = {v: i + 1 for i, v in enumerate(m.vertices)}
    lines = [f"v {x!r} {y!r} {z!r}" for x, y, z in (t.coords[v] for v in m.vertices)]
    for face in m.faces:
        if len(face) < 3:
            continue
        # faces trace clockwise around bounded regions; reverse for outward normals
        lines.append("f " + " ".join(str(index[m.tail(d)]) for d in reversed(face)))
    return "\n".join(lines) + "\n"


def solution_obj(solution) -> str:
    """Rod centerlines of a form-finding solution as OBJ polylines (one ``l`` per rod)."""
    lines = []
    count = 0
    for pose in solution.poses:
        for k in range(4):
            x, y, z = pose.notch(k)
            lines.append(f"v {x!r} {y!r} {z!r}")
        lines.append("l " + " ".join(str(count + k + 1) for k in range(4)))
        count += 4
    return "\n".join(lines) + "\n"
