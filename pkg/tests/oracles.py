"""Independent reference implementations used as test oracles."""

from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np

from davinci.rods import Graph, Rod, RodNetwork, validate_network

# connected simple cubic graphs up to isomorphism, by vertex count
CUBIC_COUNTS = {4: 1, 6: 2, 8: 5, 10: 19}


def three_edge_paths(g: Graph):
    """Every path of three distinct edges through four distinct vertices, once per direction pair."""
    adj = {v: [] for v in g.vertices}
    for k, (u, v) in enumerate(g.edges):
        adj[u].append((k, v))
        adj[v].append((k, u))
    seen = set()
    out = []
    for a in g.vertices:
        for e1, b in adj[a]:
            for e2, c in adj[b]:
                for e3, d in adj[c]:
                    verts = (a, b, c, d)
                    edges = (e1, e2, e3)
                    if len(set(verts)) != 4 or len(set(edges)) != 3:
                        continue
                    key = frozenset(edges), frozenset((a, d))
                    if key in seen:
                        continue
                    seen.add(key)
                    out.append((verts, edges))
    return out


def brute_force_partitions(g: Graph) -> list[frozenset]:
    """All rod decompositions by exhaustive edge-partition enumeration.

    Partitions the edge set into three-edge paths in every possible way and
    keeps those that pass the full network validation.
    """
    paths = three_edge_paths(g)
    by_edge = {k: [] for k in range(len(g.edges))}
    for p in paths:
        for e in p[1]:
            by_edge[e].append(p)
    found = set()

    def rec(used, chosen):
        free = next((k for k in range(len(g.edges)) if k not in used), None)
        if free is None:
            net = RodNetwork(g, tuple(Rod(v, e) for v, e in chosen))
            if validate_network(net).ok:
                found.add(frozenset(frozenset(e) for _, e in chosen))
            return
        for p in by_edge[free]:
            if used.isdisjoint(p[1]):
                rec(used | set(p[1]), chosen + [p])

    if len(g.edges) % 3 == 0:
        rec(frozenset(), [])
    return sorted(found, key=lambda s: sorted(sorted(x) for x in s))


def _grow(h, x, y):
    """All cubic multigraphs on two more vertices obtained from ``h`` by one insertion."""
    edges = sorted(tuple(sorted(e)) for e in h.edges())
    for i, j in itertools.combinations(range(len(edges)), 2):
        (a, b), (c, d) = edges[i], edges[j]
        g = nx.MultiGraph(h)
        g.remove_edge(a, b)
        g.remove_edge(c, d)
        g.add_edges_from([(a, x), (x, b), (c, y), (y, d), (x, y)])
        yield g
    for a, b in sorted(set(edges)):
        g = nx.MultiGraph(h)
        g.remove_edge(a, b)
        g.add_edges_from([(a, x), (x, y), (x, y), (y, b)])
        yield g
        g = nx.MultiGraph(h)
        g.remove_edge(a, b)
        g.add_edges_from([(a, x), (x, b), (x, y), (y, y)])
        yield g


def connected_cubic_graphs(n: int) -> list[Graph]:
    """Connected simple cubic graphs on ``n`` vertices, one per isomorphism class.

    Every connected cubic multigraph (loops allowed) shrinks to one with two
    fewer vertices by deleting a cycle edge or a pendant loop and smoothing
    the degree-2 vertices left behind.  Running that backwards from the two
    2-vertex multigraphs (theta and dumbbell) reaches every class; the
    simple graphs are kept at the end.  ``CUBIC_COUNTS`` holds the known
    class counts as a completeness check.
    """
    level = [nx.MultiGraph([(0, 1)] * 3), nx.MultiGraph([(0, 0), (0, 1), (1, 1)])]
    for size in range(4, n + 1, 2):
        reps: dict[str, list] = {}
        for h in level:
            for g in _grow(h, size - 2, size - 1):
                key = nx.weisfeiler_lehman_graph_hash(nx.Graph(g)) + f"/{g.number_of_edges() - nx.Graph(g).number_of_edges()}"
                bucket = reps.setdefault(key, [])
                if not any(nx.is_isomorphic(g, r) for r in bucket):
                    bucket.append(g)
        level = [g for key in sorted(reps) for g in reps[key]]
    simple = [h for h in level if nx.number_of_selfloops(h) == 0 and nx.Graph(h).number_of_edges() == h.number_of_edges()]
    return [Graph(tuple(sorted(h.nodes())), tuple(sorted(tuple(sorted(e)) for e in h.edges()))) for h in simple]


def corner_sum_deg(center, ring) -> float:
    """Sum of the angles at ``center`` of the triangles (center, ring[i], ring[i+1])."""
    total = 0.0
    c = np.asarray(center, dtype=float)
    for a, b in zip(ring, ring[1:] + ring[:1]):
        u, v = np.asarray(a) - c, np.asarray(b) - c
        cos = np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v))
        total += math.acos(max(-1.0, min(1.0, cos)))
    return math.degrees(total)

