import pytest

from oracles import brute_force_partitions, connected_cubic_graphs
from davinci.catalog import load_pattern
from davinci.errors import Disconnected, IdentityViolated, NotCubic
from davinci.patterns import quotient_network, strip_rods, torus_quotient
from davinci.polyhedra import cube, triangular_prism, truncated_icosahedron
from davinci.rods import (
    Facing,
    Graph,
    Rod,
    RodNetwork,
    counting_identities,
    decompose,
    decompose_all,
    standard_notches,
    validate_network,
)


def prism():
    return Graph.of(triangular_prism().map)


def test_notch_facing_follows_role():
    b, i, _, _ = standard_notches(4, 2)
    assert b.facing is Facing.DOWN and i.facing is Facing.UP
    assert (b.depth, i.depth) == (4, 2)


def test_truncated_icosahedron_decomposes_into_thirty_rods():
    net = decompose(Graph.of(truncated_icosahedron().map))
    assert net is not None
    assert validate_network(net).ok
    assert counting_identities(net) == (30, 60, 90)


def test_decomposition_is_deterministic():
    g = Graph.of(truncated_icosahedron().map)
    assert decompose(g).edge_partition() == decompose(g).edge_partition()


def test_prism_matches_brute_force():
    g = prism()
    brute = brute_force_partitions(g)
    found = decompose_all(g, 10)
    assert len(found) == len(brute) > 0
    assert {n.edge_partition() for n in found} == set(brute)


def test_limit_zero_is_empty():
    assert decompose_all(prism(), 0) == []


def test_every_output_has_one_end_and_one_interior_per_vertex():
    for n in (6, 8):
        for g in connected_cubic_graphs(n):
            for net in decompose_all(g, 50):
                assert validate_network(net).ok
                ends, inner = {}, {}
                for r, rod in enumerate(net.rods):
                    for k, v in enumerate(rod.vertices):
                        (ends if k in (0, 3) else inner).setdefault(v, []).append(r)
                assert all(len(ends[v]) == 1 and len(inner[v]) == 1 for v in g.vertices)
                assert all(ends[v] != inner[v] for v in g.vertices)


def test_cube_decompositions_agree_with_brute_force():
    g = Graph.of(cube().map)
    assert {n.edge_partition() for n in decompose_all(g, 1000)} == set(brute_force_partitions(g))


def test_stripped_catalog_quotient_recovers_an_assignment():
    p = load_pattern("pattern-01")
    g = Graph.of(torus_quotient(strip_rods(p)))
    net = decompose(g)
    assert net is not None and validate_network(net).ok


def test_shipped_assignment_validates():
    p = load_pattern("pattern-01")
    assert validate_network(quotient_network(p)).ok


def test_boundary_boundary_junction_reported():
    edges = ((0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3), (0, 3), (1, 4), (2, 5))
    g = Graph(tuple(range(6)), edges)
    # both rods end at 2 and at 3
    rods = (Rod((3, 0, 1, 2), (6, 0, 1)), Rod((2, 5, 4, 3), (8, 4, 3)))
    report = validate_network(RodNetwork(g, rods), partial=True)
    found = {(x.kind, x.witness) for x in report}
    assert ("BoundaryBoundaryJunction", 2) in found
    assert ("BoundaryBoundaryJunction", 3) in found


def test_rod_not_a_path():
    g = prism()
    net = decompose(g)
    r = net.rods[0]
    broken = Rod(r.vertices, (r.edges[0], r.edges[0], r.edges[2]))
    report = validate_network(RodNetwork(g, (broken,) + net.rods[1:]))
    assert "RodNotAPath" in report.kinds()
    assert "EdgeMultiplyCovered" in report.kinds() or "EdgeUncovered" in report.kinds()


def test_interior_deeper_than_boundary_is_reported():
    net = decompose(prism())
    r = net.rods[0]
    deep = Rod(r.vertices, r.edges, standard_notches(1, 2))
    report = validate_network(RodNetwork(net.graph, (deep,) + net.rods[1:]))
    assert "DepthOrder" in report.kinds()


def test_validation_never_raises_on_garbage():
    g = Graph((0, 1), ((0, 1),))
    report = validate_network(RodNetwork(g, (Rod((0, 1, 0, 9), (0, 7, 0)),)))
    assert not report.ok


def test_counting_identities_reject_odd_vertex_count():
    g = Graph((0, 1, 2), ((0, 1), (1, 2)))
    with pytest.raises(IdentityViolated):
        counting_identities(RodNetwork(g, ()))


def test_decompose_input_checks():
    with pytest.raises(NotCubic):
        decompose(Graph((0, 1), ((0, 1),)))
    k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    two = k4 + [(a + 4, b + 4) for a, b in k4]
    with pytest.raises(Disconnected):
        decompose(Graph(tuple(range(8)), tuple(two)))


def test_k4_brute_force_finds_hamiltonian_path_pairs():
    # the complement of a Hamiltonian path in K4 is another one, with ends and middles swapped
    g = Graph(tuple(range(4)), ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)))
    assert len(brute_force_partitions(g)) == 6
