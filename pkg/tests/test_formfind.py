import numpy as np
import pytest

from davinci import formfind as ff
from davinci.catalog import load_pattern
from davinci.errors import InvalidDepths, NoConvergence
from davinci.patterns import Patch, patch
from davinci.rods import Graph, Rod, RodNetwork


def toy_patch(with_b=True):
    """Rod A along x starts (boundary) where rod B, along y, has its first interior notch."""
    pos = {
        "v": (0.0, 0.0),
        "a1": (1.0, 0.0),
        "a2": (2.0, 0.0),
        "a3": (3.0, 0.0),
        "b0": (0.0, -1.0),
        "b2": (0.0, 1.0),
        "b3": (0.0, 2.0),
    }
    edges = [("v", "a1"), ("a1", "a2"), ("a2", "a3")]
    rods = [Rod(("v", "a1", "a2", "a3"), (0, 1, 2))]
    if with_b:
        edges += [("b0", "v"), ("v", "b2"), ("b2", "b3")]
        rods.append(Rod(("b0", "v", "b2", "b3"), (3, 4, 5)))
    else:
        pos = {k: pos[k] for k in ("v", "a1", "a2", "a3")}
    g = Graph(tuple(pos), tuple(edges))
    return Patch(None, 1, RodNetwork(g, tuple(rods)), {k: np.array(v) for k, v in pos.items()})


def line_distance(pa, da, pb, db):
    c = np.cross(da, db)
    return abs(np.dot(pb - pa, c)) / np.linalg.norm(c)


@pytest.fixture(scope="module")
def patch2():
    return patch(load_pattern("pattern-01"), 2)


def solve_anyway(prob):
    try:
        return ff.solve(prob)
    except NoConvergence as exc:
        return exc.solution


@pytest.mark.parametrize("t, deep, shallow", [(0, 0, 0), (10, 2, 4), (10, -1, 0), (10, 6, 5)])
def test_invalid_depths(t, deep, shallow):
    with pytest.raises(InvalidDepths):
        ff.build_problem(toy_patch(), t, deep, shallow)


def test_every_junction_gets_the_same_offset(patch2):
    prob = ff.build_problem(patch2, 10.0, 4.0, 2.0)
    assert len(prob.constraints) == len(patch2.junctions()) > 0
    assert all(c.delta == 4.0 for c in prob.constraints)
    assert prob.n_vars == 5 * len(patch2.rods)


def test_flat_start_residual_equals_offset(patch2):
    prob = ff.build_problem(patch2, 10.0, 4.0, 2.0)
    assert ff.residual(prob).total == pytest.approx(4.0, abs=1e-12)
    assert ff.residual(prob).pin_violation == 0.0


def test_zero_offset_keeps_the_flat_layout(patch2):
    prob = ff.build_problem(patch2, 10.0, 5.0, 5.0)
    sol = ff.solve(prob)
    assert sol.residual <= 1e-12
    assert abs(sol.elevation) <= 1e-12
    assert sol.iterations == 0


def test_single_junction_separates_the_axes_by_delta():
    prob = ff.build_problem(toy_patch(), 10.0, 4.0, 2.0, edge_length=10.0, config=ff.SolverConfig(residual_tol=1e-13))
    assert len(prob.constraints) == 1 and len(prob.pins) == 3
    sol = ff.solve(prob)
    a, b = sol.poses
    assert line_distance(a.anchor, a.direction, b.anchor, b.direction) == pytest.approx(4.0, abs=1e-9)
    c = prob.constraints[0]
    p, q = sol.poses[c.rod_a].notch(c.notch_a), sol.poses[c.rod_b].notch(c.notch_b)
    assert np.linalg.norm(q - p) == pytest.approx(4.0, abs=1e-9)
    assert p[2] > q[2]  # the rod end rests on top
    assert sol.residual <= 1e-9


def test_lone_rod_has_nothing_to_satisfy():
    prob = ff.build_problem(toy_patch(with_b=False), 10.0, 4.0, 2.0)
    assert prob.constraints == [] and len(prob.pins) == 2
    assert ff.residual(prob).total == 0.0
    assert ff.gradient_check(prob).max_rel_error <= 1e-9
    assert ff.solve(prob).elevation == 0.0


def test_gradient_matches_finite_differences(patch2):
    prob = ff.build_problem(patch2, 10.0, 4.0, 2.0)
    rng = np.random.default_rng(3)
    x = ff.pack(prob.poses)
    x[4::5] += rng.normal(scale=0.05, size=len(prob.poses))
    x[2::5] += rng.normal(scale=1.0, size=len(prob.poses))
    rep = ff.gradient_check(prob, ff.unpack(prob, x), samples=80)
    assert rep.checked and not rep.skipped
    assert rep.max_rel_error <= 1e-5


def test_parallel_rods_are_skipped_by_the_gradient_check():
    prob = ff.build_problem(toy_patch(), 10.0, 4.0, 2.0)
    a, b = prob.poses
    parallel = [a, ff.RodPose(b.anchor, a.direction.copy(), b.notch_params)]
    rep = ff.gradient_check(prob, parallel, samples=10)
    assert rep.skipped and not rep.checked


def test_objective_never_increases(patch2):
    sol = solve_anyway(ff.build_problem(patch2, 10.0, 4.0, 2.0))
    assert all(b <= a for a, b in zip(sol.history, sol.history[1:]))
    assert sol.history[-1] < sol.history[0]


def test_elevation_grows_with_the_offset(patch2):
    heights = []
    for deep, shallow in ((4.5, 4.5), (4.0, 4.0), (3.0, 3.0)):
        sol = solve_anyway(ff.build_problem(patch2, 10.0, deep, shallow))
        prof = ff.elevation_profile(sol)
        assert prof.center_height > prof.rim_height
        assert prof.slope < 0
        heights.append(sol.elevation)
    assert 0 < heights[0] < heights[1] < heights[2]


def test_leftover_residual_scales_with_offset_squared(patch2):
    # the patch carries more junction equations than rod unknowns; the misfit is second order
    r = [solve_anyway(ff.build_problem(patch2, 10.0, 5 - d / 2, 5 - d / 2)).residual for d in (0.5, 0.25)]
    assert r[0] / r[1] == pytest.approx(4.0, rel=0.02)


def test_flat_profile_for_zero_offset(patch2):
    prof = ff.elevation_profile(ff.solve(ff.build_problem(patch2, 10.0, 5.0, 5.0)))
    assert prof.center_height == prof.rim_height == 0.0
    assert prof.slope == 0.0
