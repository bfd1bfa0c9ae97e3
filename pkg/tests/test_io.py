import numpy as np
import pytest

from davinci.catalog import catalog, flat_embedding, load_pattern
from davinci.errors import ParseError
from davinci.io import format_embedding, format_map, format_pattern, parse
from davinci.patterns import quotient_network, torus_quotient
from davinci.polyhedra import truncated_icosahedron
from davinci.rods import Graph, decompose
from davinci.surface_map import face_census


def test_pattern_round_trip_is_exact():
    for p in catalog():
        q = parse(format_pattern(p)).pattern
        assert q == p


def test_embedding_round_trip_keeps_coordinates():
    e = truncated_icosahedron()
    net = decompose(Graph.of(e.map))
    doc = parse(format_embedding(e, net))
    assert doc.kind == "embedding"
    assert (doc.map.V, doc.map.E, doc.map.F) == (60, 90, 32)
    assert all(np.array_equal(doc.embedding.coords[v], e.coords[v]) for v in e.map.vertices)
    assert [r.vertices for r in doc.network.rods] == [r.vertices for r in net.rods]


def test_periodic_embedding_round_trip_keeps_offsets():
    e = flat_embedding(load_pattern("pattern-02"))
    doc = parse(format_embedding(e))
    assert doc.embedding.periodic
    for d in range(2 * e.map.E):
        assert np.array_equal(doc.embedding.vector(d), e.vector(d))


def test_map_round_trip_preserves_faces():
    m = torus_quotient(load_pattern("pattern-08"))
    net = quotient_network(load_pattern("pattern-08"), m)
    doc = parse(format_map(m, net))
    assert doc.kind == "map"
    assert face_census(doc.map).histogram == face_census(m).histogram
    assert len(doc.network.rods) == len(net.rods)


def test_comments_and_blank_lines_are_ignored():
    doc = parse("# K2\n\nv 0\nv 1   # two ends\ne 0 0 1\nrot 0 0+\nrot 1 0-\n")
    assert (doc.map.V, doc.map.E, doc.map.F) == (2, 1, 1)


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("", 1, 1),
        ("v 0\nv x\n", 2, 3),
        ("v 0\ne 0 0 0\nrot 0 0+ 7-\n", 3, 10),
        ("v 0\ne 0 0 0\nrot 0 0+ 0*\n", 3, 10),
        ("v 0\nbogus 1\n", 2, 1),
        ("lattice 1 0 0 1\nv 0 1/0 0\n", 2, 5),
        ("lattice 1 0 0\n", 1, 1),
        ("v 0 0 0\nedge 0 0 1 0\n", 1, 1),
        ("lattice 1 0 0 1\nv 0 1/2 1/2\nedge 0 0 1 0\nedge 0 0 0 1\nrod 0 0 0 0 0\n  rod 1 0 0", 6, 3),
    ],
)
def test_parse_errors_carry_positions(text, line, column):
    with pytest.raises(ParseError) as info:
        parse(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert f"line {line}" in str(info.value)


def test_invalid_pattern_content_becomes_a_parse_error():
    with pytest.raises(ParseError):
        parse("lattice 1 0 2 0\nv 0 0 0\nedge 0 0 1 0\n")
