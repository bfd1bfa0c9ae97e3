import math
from fractions import Fraction as Fr

import pytest

from davinci.catalog import PATTERN_NAMES, load_pattern
from davinci.patterns import PeriodicPattern, sublattice, unimodular
from davinci.wallpaper import classify_wallpaper

S3 = math.sqrt(3)


def lattice_graph(lattice, steps):
    return PeriodicPattern(lattice, [(0, 0, 0)], [(0, 0, s) for s in steps])


def honeycomb():
    return PeriodicPattern(
        ((1, 0), (0.5, S3 / 2)),
        [(0, Fr(1, 3), Fr(1, 3)), (1, Fr(2, 3), Fr(2, 3))],
        [(0, 1, (0, 0)), (0, 1, (-1, 0)), (0, 1, (0, -1))],
    )


def lopsided():
    """A decorated oblique lattice with no symmetry beyond translations."""
    return PeriodicPattern(
        ((1, 0), (0.3, 1.1)),
        [(0, 0, 0), (1, Fr(1, 5), Fr(1, 7)), (2, Fr(1, 2), Fr(3, 5))],
        [(0, 0, (1, 0)), (0, 0, (0, 1)), (0, 1, (0, 0)), (1, 2, (0, 0))],
    )


@pytest.mark.parametrize(
    "pattern, name",
    [
        (lattice_graph(((1, 0), (0, 1)), [(1, 0), (0, 1)]), "p4m"),
        (lattice_graph(((2, 0), (0, 1)), [(1, 0), (0, 1)]), "pmm"),
        (lattice_graph(((1, 0.4), (1, -0.4)), [(1, 0), (0, 1)]), "cmm"),
        (lattice_graph(((1, 0), (0.3, 1.1)), [(1, 0), (0, 1)]), "p2"),
        (lattice_graph(((1, 0), (0.5, S3 / 2)), [(1, 0), (0, 1), (1, -1)]), "p6m"),
        (honeycomb(), "p6m"),
        (lopsided(), "p1"),
    ],
)
def test_reference_groups(pattern, name):
    assert classify_wallpaper(pattern).name == name


def test_evidence_for_the_honeycomb():
    ev = classify_wallpaper(honeycomb()).evidence
    assert ev["rotation_order"] == 6
    assert len(ev["mirror_directions"]) == 6


@pytest.mark.parametrize("name", PATTERN_NAMES)
def test_supercells_do_not_change_the_group(name):
    p = load_pattern(name)
    base = classify_wallpaper(p).name
    assert classify_wallpaper(sublattice(p, ((2, 0), (0, 1)))).name == base
    assert classify_wallpaper(unimodular(p, ((1, 2), (0, 1)))).name == base
