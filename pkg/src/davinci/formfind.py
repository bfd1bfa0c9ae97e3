"""Form finding for a finite patch of straight notched rods.

Each rod is a rigid straight segment described by an anchor point and a
unit direction; its four notch points sit at fixed arclengths ``t`` read
off the flat layout.  A junction pairs the boundary notch ``p`` of one rod
with the interior notch ``q`` of another and asks for

    p - q = delta * n,    n = s * (d_A x d_B) / |d_A x d_B|

where ``delta = thickness - depth_boundary - depth_interior`` and the sign
``s`` is fixed on the flat layout so that ``n`` points up there.  The
boundary notch is cut in the underside of its rod, so a rod end rests on
top of its partner's middle.  The residual vector of a junction therefore
carries both the separation error along the joint normal and the lateral
mismatch.  Boundary notches with no partner inside the patch rest on the
ground (``z = 0``), which removes the vertical gauge freedom.

Directions are parameterized by heading ``theta`` and elevation ``phi``,
``d = (cos phi cos theta, cos phi sin theta, sin phi)``, so the flat start
(``phi = 0``) is far from the parameterization's poles.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateJoint, InvalidDepths, NoConvergence

PARALLEL_TOL = 1e-4  # radians
DEFAULT_EDGE_LENGTH = 100.0


@dataclass(frozen=True)
class RodPose:
    anchor: np.ndarray
    direction: np.ndarray
    notch_params: tuple

    def notch(self, k: int) -> np.ndarray:
        return self.anchor + self.notch_params[k] * self.direction


@dataclass(frozen=True)
class JunctionConstraint:
    vertex: object
    rod_a: int  # carries the boundary notch
    notch_a: int
    rod_b: int  # carries the interior notch
    notch_b: int
    delta: float
    sign: float  # fixed orientation of d_A x d_B; boundary notch cut from below


@dataclass(frozen=True)
class Pin:
    rod: int
    notch: int
    height: float = 0.0


@dataclass
class SolverConfig:
    max_iter: int = 500
    step_tol: float = 1e-14
    residual_tol: float | None = None  # default 1e-7 * thickness
    damping: float = 1e-3
    seed: int | None = None
    restarts: int = 0


@dataclass
class FormFindProblem:
    poses: list  # initial RodPose per rod
    constraints: list
    pins: list
    config: SolverConfig
    thickness: float
    vertices: dict  # rod index -> 4 patch vertex keys
    planar: dict  # patch vertex key -> scaled planar 2D position
    scale: float

    @property
    def n_vars(self) -> int:
        return 5 * len(self.poses)


@dataclass
class Solution:
    poses: list
    residual: float
    elevation: float
    heights: dict  # vertex -> height of its interior notch point
    iterations: int
    converged: bool
    history: list = field(default_factory=list)  # objective (sum of squares) per accepted iterate
    problem: FormFindProblem | None = None


def _direction(theta, phi):
    cp, sp, ct, st = math.cos(phi), math.sin(phi), math.cos(theta), math.sin(theta)
    d = np.array([cp * ct, cp * st, sp])
    d_theta = np.array([-cp * st, cp * ct, 0.0])
    d_phi = np.array([-sp * ct, -sp * st, cp])
    return d, d_theta, d_phi


def pack(poses) -> np.ndarray:
    x = np.empty(5 * len(poses))
    for r, pose in enumerate(poses):
        d = pose.direction
        x[5 * r : 5 * r + 3] = pose.anchor
        x[5 * r + 3] = math.atan2(d[1], d[0])
        x[5 * r + 4] = math.asin(max(-1.0, min(1.0, d[2])))
    return x


def unpack(p: FormFindProblem, x) -> list:
    out = []
    for r, pose in enumerate(p.poses):
        d, _, _ = _direction(x[5 * r + 3], x[5 * r + 4])
        out.append(RodPose(np.array(x[5 * r : 5 * r + 3]), d, pose.notch_params))
    return out


def build_problem(
    patch,
    thickness: float,
    depth_boundary: float,
    depth_interior: float,
    edge_length: float = DEFAULT_EDGE_LENGTH,
    config: SolverConfig | None = None,
) -> FormFindProblem:
    """Flat start and junction constraints for a patch.

    Planar coordinates are scaled so that the mean edge length of the patch
    equals ``edge_length`` (same length unit as ``thickness``).
    """
    if thickness <= 0:
        raise InvalidDepths("thickness must be positive")
    if depth_interior < 0 or depth_boundary < 0:
        raise InvalidDepths("notch depths must be nonnegative")
    if depth_boundary < depth_interior:
        raise InvalidDepths("boundary notches must be at least as deep as interior notches")
    delta = thickness - depth_boundary - depth_interior
    if delta < 0:
        raise InvalidDepths("depth_boundary + depth_interior exceeds the thickness")
    net = patch.network
    pos = {k: np.asarray(v, dtype=float)[:2] for k, v in patch.positions.items()}
    lengths = [np.linalg.norm(pos[u] - pos[v]) for u, v in net.graph.edges]
    scale = edge_length / float(np.mean(lengths))
    planar = {k: scale * v for k, v in pos.items()}

    poses, verts = [], {}
    for r, rod in enumerate(net.rods):
        pts = [planar[v] for v in rod.vertices]
        axis = pts[3] - pts[0]
        axis = axis / np.linalg.norm(axis)
        t = tuple(float(np.dot(q - pts[0], axis)) for q in pts)
        anchor = np.array([pts[0][0], pts[0][1], 0.0])
        poses.append(RodPose(anchor, np.array([axis[0], axis[1], 0.0]), t))
        verts[r] = tuple(rod.vertices)

    where_b, where_i = {}, {}
    for r, rod in enumerate(net.rods):
        for k, v in enumerate(rod.vertices):
            (where_b if k in (0, 3) else where_i)[v] = (r, k)
    constraints, pins = [], []
    for v in net.graph.vertices:
        if v in where_b and v in where_i:
            (ra, ka), (rb, kb) = where_b[v], where_i[v]
            c = np.cross(poses[ra].direction, poses[rb].direction)
            if np.linalg.norm(c) < math.sin(PARALLEL_TOL):
                raise DegenerateJoint(f"rods {ra} and {rb} are parallel at vertex {v}")
            constraints.append(JunctionConstraint(v, ra, ka, rb, kb, delta, 1.0 if c[2] > 0 else -1.0))
        elif v in where_b:
            pins.append(Pin(*where_b[v]))
    return FormFindProblem(poses, constraints, pins, config or SolverConfig(), thickness, verts, planar, scale)


def _tables(p: FormFindProblem):
    """Constraint and pin data as index arrays."""
    cs = p.constraints
    return dict(
        ra=np.array([c.rod_a for c in cs], dtype=int),
        rb=np.array([c.rod_b for c in cs], dtype=int),
        ta=np.array([p.poses[c.rod_a].notch_params[c.notch_a] for c in cs], dtype=float),
        tb=np.array([p.poses[c.rod_b].notch_params[c.notch_b] for c in cs], dtype=float),
        delta=np.array([c.delta for c in cs], dtype=float),
        sign=np.array([c.sign for c in cs], dtype=float),
        pr=np.array([q.rod for q in p.pins], dtype=int),
        pt=np.array([p.poses[q.rod].notch_params[q.notch] for q in p.pins], dtype=float),
        ph=np.array([q.height for q in p.pins], dtype=float),
    )


def _evaluate(p: FormFindProblem, x, jacobian=True, skip_degenerate=False):
    """Residual vector (3 per junction, then 1 per pin) and its Jacobian."""
    nc, npin = len(p.constraints), len(p.pins)
    T = _tables(p)
    X = np.asarray(x, dtype=float).reshape(-1, 5)
    th, ph = X[:, 3], X[:, 4]
    cp, sp, ct, st = np.cos(ph), np.sin(ph), np.cos(th), np.sin(th)
    d = np.stack([cp * ct, cp * st, sp], axis=1)
    d_t = np.stack([-cp * st, cp * ct, np.zeros_like(ph)], axis=1)
    d_p = np.stack([-sp * ct, -sp * st, cp], axis=1)

    F = np.zeros(3 * nc + npin)
    J = np.zeros((F.size, x.size)) if jacobian else None
    degenerate = []
    if nc:
        ra, rb, ta, tb = T["ra"], T["rb"], T["ta"], T["tb"]
        delta, sign = T["delta"], T["sign"]
        da, db = d[ra], d[rb]
        pa = X[ra, :3] + ta[:, None] * da
        qb = X[rb, :3] + tb[:, None] * db
        cr = np.cross(da, db)
        nrm = np.linalg.norm(cr, axis=1)
        bad = nrm < math.sin(PARALLEL_TOL)
        if bad.any():
            j = int(np.flatnonzero(bad)[0])
            if not skip_degenerate:
                c = p.constraints[j]
                raise DegenerateJoint(f"rods {c.rod_a} and {c.rod_b} became parallel at vertex {c.vertex}")
            degenerate = np.flatnonzero(bad).tolist()
        safe = np.where(bad, 1.0, nrm)
        n = np.where(bad[:, None], 0.0, sign[:, None] * cr / safe[:, None])
        F[: 3 * nc] = (pa - qb - delta[:, None] * n).ravel()
        if jacobian:
            good = ~bad
            # dn = sign/|c| (I - nn^T) dc, with dc = dd_a x d_b + d_a x dd_b
            def dn(v):
                return sign[:, None] / safe[:, None] * (v - n * np.sum(n * v, axis=1)[:, None])

            rows = (3 * np.arange(nc)[:, None] + np.arange(3)[None, :])[good]
            for base, sgn in ((5 * ra, 1.0), (5 * rb, -1.0)):
                for i in range(3):
                    J[rows[:, i], base[good] + i] = sgn
            cols = (
                (5 * ra + 3, ta[:, None] * d_t[ra] - delta[:, None] * dn(np.cross(d_t[ra], db))),
                (5 * ra + 4, ta[:, None] * d_p[ra] - delta[:, None] * dn(np.cross(d_p[ra], db))),
                (5 * rb + 3, -tb[:, None] * d_t[rb] - delta[:, None] * dn(np.cross(da, d_t[rb]))),
                (5 * rb + 4, -tb[:, None] * d_p[rb] - delta[:, None] * dn(np.cross(da, d_p[rb]))),
            )
            for col, val in cols:
                J[rows, col[good][:, None]] = val[good]
    if npin:
        pr, pt = T["pr"], T["pt"]
        F[3 * nc :] = X[pr, 2] + pt * d[pr, 2] - T["ph"]
        if jacobian:
            k = 3 * nc + np.arange(npin)
            J[k, 5 * pr + 2] = 1.0
            J[k, 5 * pr + 3] = pt * d_t[pr, 2]
            J[k, 5 * pr + 4] = pt * d_p[pr, 2]
    if skip_degenerate:
        return F, J, degenerate
    return F, J


def _constraint_norms(p, F):
    nc = len(p.constraints)
    return np.linalg.norm(F[: 3 * nc].reshape(nc, 3), axis=1) if nc else np.zeros(0)


@dataclass
class ResidualReport:
    total: float  # root-mean-square junction violation
    per_constraint: list
    pin_violation: float


def residual(p: FormFindProblem, poses=None) -> ResidualReport:
    x = pack(poses if poses is not None else p.poses)
    F, _ = _evaluate(p, x, jacobian=False)
    per = _constraint_norms(p, F)
    total = float(math.sqrt(np.mean(per**2))) if per.size else 0.0
    pins = F[3 * len(p.constraints) :]
    return ResidualReport(total, [float(v) for v in per], float(np.max(np.abs(pins))) if pins.size else 0.0)


def _rms(p, F):
    per = _constraint_norms(p, F)
    return float(math.sqrt(np.mean(per**2))) if per.size else 0.0


def _heights(p: FormFindProblem, poses) -> dict:
    out = {}
    for r, verts in p.vertices.items():
        for k in (1, 2):
            out[verts[k]] = float(poses[r].notch(k)[2])
    return out


def _levenberg_marquardt(p: FormFindProblem, x0, tol):
    cfg = p.config
    x = x0.copy()
    F, J = _evaluate(p, x)
    cost = float(F @ F)
    history = [cost]
    lam = cfg.damping
    it = 0
    for it in range(1, cfg.max_iter + 1):
        if _rms(p, F) <= tol and (not p.pins or np.max(np.abs(F[3 * len(p.constraints) :])) <= tol):
            return x, history, it - 1, True
        g = J.T @ F
        A = J.T @ J
        diag = np.maximum(np.diag(A), 1e-12)
        accepted = False
        while lam < 1e16:
            try:
                step = np.linalg.solve(A + lam * np.diag(diag), -g)
            except np.linalg.LinAlgError:
                lam *= 10
                continue
            xn = x + step
            try:
                Fn, Jn = _evaluate(p, xn)
            except DegenerateJoint:
                lam *= 10
                continue
            cn = float(Fn @ Fn)
            if cn < cost:
                x, F, J, cost = xn, Fn, Jn, cn
                lam = max(lam / 3, 1e-12)
                accepted = True
                break
            lam *= 4
        if not accepted:
            break
        history.append(cost)
        if np.linalg.norm(step) <= cfg.step_tol * (1 + np.linalg.norm(x)):
            break
    pins_ok = not p.pins or np.max(np.abs(F[3 * len(p.constraints) :])) <= tol
    return x, history, it, _rms(p, F) <= tol and pins_ok


def solve(p: FormFindProblem) -> Solution:
    """Damped Gauss-Newton from the flat layout.

    Raises :class:`NoConvergence` (carrying the best solution) when the
    residual tolerance is not met.
    """
    tol = p.config.residual_tol if p.config.residual_tol is not None else 1e-7 * p.thickness
    x0 = pack(p.poses)
    starts = [x0]
    if p.config.restarts and p.config.seed is not None:
        rng = np.random.default_rng(p.config.seed)
        for _ in range(p.config.restarts):
            xs = x0.copy()
            xs[4::5] += rng.normal(scale=1e-2, size=len(p.poses))
            starts.append(xs)
    best = None
    for xs in starts:
        x, history, iters, ok = _levenberg_marquardt(p, xs, tol)
        if any(b > a for a, b in zip(history, history[1:])):
            raise AssertionError("solver accepted a step that increased the objective")
        if best is None or history[-1] < best[1][-1]:
            best = (x, history, iters, ok)
        if ok:
            break
    x, history, iters, ok = best
    poses = unpack(p, x)
    heights = _heights(p, poses)
    res = residual(p, poses).total
    sol = Solution(
        poses=poses,
        residual=res,
        elevation=max(heights.values(), default=0.0),
        heights=heights,
        iterations=iters,
        converged=ok,
        history=history,
        problem=p,
    )
    if not ok:
        raise NoConvergence(f"residual {res:.3g} above tolerance {tol:.3g} after {iters} iterations", sol)
    return sol


@dataclass
class GradientReport:
    max_rel_error: float
    checked: list
    skipped: list


def gradient_check(p: FormFindProblem, poses=None, h: float = 1e-6, samples: int = 40, seed: int = 0) -> GradientReport:
    """Analytic Jacobian columns against central differences on a random coordinate sample.

    Coordinates of rods meeting at a near-parallel junction are reported
    as skipped, since the joint normal is not differentiable there.
    """
    x = pack(poses if poses is not None else p.poses)
    if not p.constraints and not p.pins:
        return GradientReport(0.0, [], [])
    F, J, degenerate = _evaluate(p, x, skip_degenerate=True)
    bad = set()
    for j in degenerate:
        c = p.constraints[j]
        bad.update(range(5 * c.rod_a, 5 * c.rod_a + 5))
        bad.update(range(5 * c.rod_b, 5 * c.rod_b + 5))
    rng = np.random.default_rng(seed)
    cols = sorted(rng.choice(x.size, size=min(samples, x.size), replace=False).tolist())
    checked = [k for k in cols if k not in bad]
    skipped = [k for k in cols if k in bad]
    worst = 0.0
    for k in checked:
        e = np.zeros_like(x)
        e[k] = h
        Fp, _, _ = _evaluate(p, x + e, jacobian=False, skip_degenerate=True)
        Fm, _, _ = _evaluate(p, x - e, jacobian=False, skip_degenerate=True)
        fd = (Fp - Fm) / (2 * h)
        an = J[:, k]
        denom = max(np.linalg.norm(an), np.linalg.norm(fd))
        if denom < 1e-12:
            continue
        worst = max(worst, float(np.linalg.norm(an - fd) / denom))
    return GradientReport(worst, checked, skipped)


@dataclass
class ElevationProfile:
    points: list  # (radial distance, height), sorted by distance
    center_height: float
    rim_height: float
    slope: float  # least-squares d(height)/d(distance); negative for a dome


def elevation_profile(s: Solution) -> ElevationProfile:
    p = s.problem
    keys = list(s.heights)
    xy = np.array([p.planar[k] for k in keys])
    centroid = xy.mean(axis=0)
    radial = np.linalg.norm(xy - centroid, axis=1)
    pts = sorted(zip(radial.tolist(), (s.heights[k] for k in keys)))
    r = np.array([a for a, _ in pts])
    z = np.array([b for _, b in pts])
    inner = r <= r.min() + 1e-9 * (1 + r.max())
    outer = r >= r.max() - 1e-9 * (1 + r.max())
    slope = 0.0
    if r.size > 1 and np.ptp(r) > 0:
        slope = float(np.polyfit(r, z, 1)[0])
    return ElevationProfile(pts, float(z[inner].mean()), float(z[outer].mean()), slope)
