import math

import numpy as np
import pytest

from oracles import corner_sum_deg
from davinci.catalog import catalog, flat_embedding, load_pattern, torus_embedding
from davinci.embedding import (
    Embedding3D,
    angular_defect,
    collinear_pairs,
    corner_angle,
    descartes_sum,
    polyhedron_theorem_check,
    support_witness,
    triangulate,
)
from davinci.errors import DegenerateCorner, NonTriangularFace
from davinci.polyhedra import cube, goldberg_2_0, tetrahedron, truncated_icosahedron
from davinci.surface_map import build_map, euler_characteristic, face_census


def polygon(k, radius=1.0):
    """A planar k-cycle: two k-gon faces."""
    edges = [(i, (i + 1) % k) for i in range(k)]
    rot = {i: [2 * i, 2 * ((i - 1) % k) + 1] for i in range(k)}
    m = build_map(edges, rot)
    coords = {i: (radius * math.cos(2 * math.pi * i / k), radius * math.sin(2 * math.pi * i / k), 0.0) for i in range(k)}
    return Embedding3D(m, coords)


def test_corner_angle_is_accurate_near_straight():
    a = np.array([1.0, 0.0, 0.0])
    b = np.array([-1.0, 1e-12, 0.0])
    assert math.pi - corner_angle(a, b) == pytest.approx(1e-12, rel=1e-6)


def test_fan_on_a_dodecagon_gives_ten_triangles_per_face():
    e = polygon(12)
    assert face_census(e.map).histogram == {12: 2}
    t = triangulate(e, "fan")
    assert face_census(t.map).histogram == {3: 20}
    assert t.map.E == 12 + 2 * 9
    assert euler_characteristic(t.map) == 2


def test_triangulation_keeps_triangles():
    e = tetrahedron()
    assert triangulate(e) is e


@pytest.mark.parametrize("build", [cube, tetrahedron, truncated_icosahedron, goldberg_2_0])
def test_descartes_on_convex_solids(build):
    t = triangulate(build())
    rep = descartes_sum(t)
    assert rep.total == pytest.approx(720.0, abs=1e-9)
    assert all(d > 0 for d in rep.per_vertex.values())


@pytest.mark.parametrize("build", [cube, truncated_icosahedron])
def test_defect_agrees_with_an_independent_corner_sum(build):
    e = build()
    t = triangulate(e)
    for v in e.map.vertices:
        ring = [e.coords[u] for u in e.map.neighbors(v)]
        assert angular_defect(t, v) == pytest.approx(360 - corner_sum_deg(e.coords[v], ring), abs=1e-9)


def test_radians_and_degrees_agree():
    t = triangulate(cube())
    v = t.map.vertices[0]
    assert math.degrees(angular_defect(t, v, radians=True)) == pytest.approx(angular_defect(t, v))


def test_untriangulated_map_is_rejected():
    with pytest.raises(NonTriangularFace):
        descartes_sum(cube())


def test_zero_length_edge_is_degenerate():
    t = tetrahedron()
    coords = dict(t.coords)
    coords[1] = coords[0].copy()
    with pytest.raises(DegenerateCorner):
        angular_defect(Embedding3D(t.map, coords), 0)


def test_descartes_holds_for_a_folded_sphere():
    # push one tetrahedron vertex through the opposite face: every triangle still sums to 180
    t = tetrahedron()
    coords = dict(t.coords)
    centroid = sum(coords[v] for v in (1, 2, 3)) / 3
    coords[0] = centroid + 0.5 * (centroid - coords[0])
    rep = descartes_sum(Embedding3D(t.map, coords))
    assert rep.total == pytest.approx(720.0, abs=1e-9)
    assert rep.per_vertex[0] == pytest.approx(90.0)


def test_verdict_on_a_cube_is_not_applicable():
    v = polyhedron_theorem_check(triangulate(cube()))
    assert not v.applicable
    assert len(v.missing) == 8
    assert v.chi == 2


def test_verdict_on_flat_tori():
    for p in catalog():
        t = triangulate(flat_embedding(p), "ear")
        v = polyhedron_theorem_check(t)
        assert v.applicable and v.nonpositive and not v.contradiction
        assert v.chi == 0
        assert abs(v.report.total) < 1e-6


def test_every_catalog_vertex_sits_inside_a_straight_rod():
    p = load_pattern("pattern-03")
    e = flat_embedding(p)
    verts = {v for v, _, _ in collinear_pairs(e)}
    assert verts == set(e.map.vertices)


def test_torus_of_revolution_totals_zero():
    for p in catalog():
        rep = descartes_sum(triangulate(torus_embedding(p)))
        assert abs(rep.total) < 1e-9


def test_ear_and_fan_agree_on_flat_tori():
    e = flat_embedding(load_pattern("pattern-05"))
    ear = descartes_sum(triangulate(e, "ear"), check=False)
    assert face_census(triangulate(e, "fan").map).histogram == face_census(triangulate(e, "ear").map).histogram
    assert max(abs(x) for x in ear.per_vertex.values()) < 1e-9


def test_unknown_triangulation_method():
    with pytest.raises(ValueError):
        triangulate(cube(), "strip")


def test_support_witness_without_straight_pairs():
    w = support_witness(cube(), (1, 1, 1))
    assert w.neighbor is None
    assert w.support == pytest.approx(max(np.dot([1, 1, 1], c) / math.sqrt(3) for c in cube().coords.values()))


def test_support_witness_escapes_along_a_rod():
    e = flat_embedding(load_pattern("pattern-01"), np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]]))
    w = support_witness(e, (0.3, 0.9, 0.0))
    assert w.neighbor is not None
    assert w.neighbor_support >= w.support - 1e-9
