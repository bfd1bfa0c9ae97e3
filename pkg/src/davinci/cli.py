"""Command-line entry point: ``davinci <subcommand> ...``.

Inputs are files in the text formats of :mod:`davinci.io` or builtin names
prefixed with ``@`` (see ``davinci validate --list``).  Reports are printed
as ``key=value`` lines.  Exit codes: 0 success, 1 validation or assertion
failure, 2 parse or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__
from .catalog import builtin, builtin_names
from .embedding import (
    ANGLE_TOL,
    COLLINEAR_TOL,
    DESCARTES_TOL,
    Embedding3D,
    descartes_sum,
    polyhedron_theorem_check,
    triangulate,
)
from .errors import DavinciError, NoConvergence, ParseError
from .export import embedding_obj, embedding_svg, patch_svg, replica_svg, solution_obj
from .formfind import DEFAULT_EDGE_LENGTH, SolverConfig, build_problem, elevation_profile, solve
from .io import Document, format_pattern, load
from .patterns import patch, quotient_network, replication_series, torus_quotient
from .rods import Graph, counting_identities, decompose, decompose_all, validate_network
from .surface_map import euler_characteristic, face_census, genus
from .wallpaper import classify_wallpaper

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunManifest:
    subcommand: str
    inputs: list
    parameters: dict
    version: str = __version__
    wall_time: float = 0.0
    exit_code: int = 0
    outputs: list = field(default_factory=list)


class Reporter:
    def __init__(self, precision: int, out=None):
        self.precision = precision
        self.out = out or sys.stdout

    def num(self, x) -> str:
        if isinstance(x, bool) or not isinstance(x, float):
            return str(x)
        return f"{x:.{self.precision}g}"

    def kv(self, key, value):
        if isinstance(value, (list, tuple, set, frozenset)):
            value = ",".join(self.num(v) for v in value)
        else:
            value = self.num(value)
        print(f"{key}={value}", file=self.out)

    def line(self, text=""):
        print(text, file=self.out)


def _load(name: str) -> Document:
    if name.startswith("@"):
        try:
            return builtin(name)
        except KeyError as exc:
            raise ParseError(str(exc.args[0])) from None
    try:
        return load(name)
    except OSError as exc:
        raise ParseError(f"cannot read {name}: {exc.strerror}") from None


# -- subcommands ------------------------------------------------------------------


def cmd_validate(args, rep: Reporter) -> int:
    if args.list:
        for name in builtin_names():
            rep.line("@" + name)
        return EXIT_OK
    if not args.file:
        raise ParseError("validate needs a file or builtin name")
    doc = _load(args.file)
    rep.kv("kind", doc.kind)
    if doc.kind == "pattern":
        p = doc.pattern
        m = torus_quotient(p)
        rep.kv("V", m.V)
        rep.kv("E", m.E)
        rep.kv("F", m.F)
        if not p.rods:
            rep.kv("rods", 0)
            rep.kv("valid", True)
            return EXIT_OK
        report = validate_network(quotient_network(p, m))
        rep.kv("rods", len(p.rods))
        rep.kv("wallpaper", classify_wallpaper(p).name)
    else:
        m = doc.map
        rep.kv("V", m.V)
        rep.kv("E", m.E)
        rep.kv("F", m.F)
        if doc.network is None:
            rep.kv("rods", 0)
            rep.kv("valid", True)
            return EXIT_OK
        report = validate_network(doc.network)
        rep.kv("rods", len(doc.network.rods))
    for v in report:
        rep.line(f"violation={v.kind} witness={v.witness} detail={v.detail}")
    rep.kv("violations", len(report))
    rep.kv("valid", report.ok)
    return EXIT_OK if report.ok else EXIT_FAIL


def _parse_surface(tokens):
    if not tokens or tokens == ["torus"]:
        return "torus", None
    if tokens[0] == "replicate" and len(tokens) == 2 and tokens[1].isdigit():
        return "replicate", int(tokens[1])
    raise ParseError("--surface expects 'torus' or 'replicate N'")


def cmd_euler(args, rep: Reporter) -> int:
    doc = _load(args.file)
    if doc.kind != "pattern":
        m = doc.map
        chi = euler_characteristic(m)
        for k, v in (("V", m.V), ("E", m.E), ("F", m.F), ("chi", chi)):
            rep.kv(k, v)
        if m.is_connected():
            rep.kv("genus", genus(m))
        return EXIT_OK
    surface, n = _parse_surface(args.surface)
    p = doc.pattern
    if surface == "torus":
        m = torus_quotient(p)
        census = face_census(m)
        for k, v in (("V", m.V), ("E", m.E), ("F", m.F), ("chi", euler_characteristic(m))):
            rep.kv(k, v)
        rep.kv("faces", [f"{deg}:{cnt}" for deg, cnt in sorted(census.histogram.items())])
        return EXIT_OK
    if n < 3:
        raise ParseError("replicate needs N >= 3")
    series = replication_series(p, n)
    for k, V, E, F in series.samples:
        rep.line(f"n={k} V={V} E={E} F={F} sphere={V - E + F + 1}")
    rep.kv("chi_estimate", str(series.chi_estimate))
    return EXIT_OK if series.chi_estimate == 0 else EXIT_FAIL


def _embedding(doc: Document) -> Embedding3D:
    if doc.embedding is None:
        raise ParseError("input has no coordinates; an embedding file is required")
    return doc.embedding


def cmd_defect(args, rep: Reporter) -> int:
    e = triangulate(_embedding(_load(args.file)), args.triangulation)
    chi = euler_characteristic(e.map)
    report = descartes_sum(e, tol=args.descartes_tol, radians=args.radians, collinear_tol=args.collinear_tol, check=False)
    for v in e.map.vertices:
        rep.line(f"vertex={v} defect={rep.num(report.per_vertex[v])}")
    rep.kv("unit", report.unit)
    rep.kv("chi", chi)
    rep.kv("total", report.total)
    rep.kv("collinear_vertices", sorted(report.collinear_vertices, key=str))
    verdict = polyhedron_theorem_check(e, args.tol, args.collinear_tol)
    if verdict.applicable:
        rep.kv("verdict", "certificate")
        rep.kv("nonpositive", verdict.nonpositive)
        rep.kv("contradiction", verdict.contradiction)
    else:
        rep.kv("verdict", "NotApplicable")
        rep.kv("missing", list(verdict.missing))
    ok = True
    if chi == 2:
        full = 720.0 if not args.radians else 4 * 3.141592653589793
        limit = args.descartes_tol if not args.radians else args.descartes_tol * 3.141592653589793 / 180
        ok = abs(report.total - full) <= limit
        rep.kv("descartes", ok)
    if verdict.applicable and not verdict.nonpositive:
        ok = False
    return EXIT_OK if ok else EXIT_FAIL


def cmd_decompose(args, rep: Reporter) -> int:
    doc = _load(args.file)
    if doc.kind == "pattern":
        graph = Graph.of(torus_quotient(doc.pattern))
    else:
        graph = Graph.of(doc.map)
    if args.all is not None:
        nets = decompose_all(graph, args.all)
        rep.kv("decompositions", len(nets))
        for i, net in enumerate(nets):
            rep.line(f"# decomposition {i}")
            for r, rod in enumerate(net.rods):
                rep.line(f"rod {r} " + " ".join(map(str, rod.vertices)))
        return EXIT_OK
    net = decompose(graph)
    if net is None:
        rep.kv("result", "None")
        return EXIT_OK
    rep.kv("result", "Some")
    rep.kv("rods", len(net.rods))
    ok = validate_network(net).ok
    counting_identities(net)
    rep.kv("valid", ok)
    for r, rod in enumerate(net.rods):
        rep.line(f"rod {r} " + " ".join(map(str, rod.vertices)))
    return EXIT_OK if ok else EXIT_FAIL


def cmd_formfind(args, rep: Reporter, manifest: RunManifest) -> int:
    doc = _load(args.file)
    if doc.kind != "pattern":
        raise ParseError("formfind needs a periodic pattern")
    pt = patch(doc.pattern, args.rings)
    cfg = SolverConfig(max_iter=args.max_iter, residual_tol=args.tol, seed=args.seed, restarts=args.restarts)
    prob = build_problem(pt, args.thickness, args.depth_deep, args.depth_shallow, args.edge_length, cfg)
    rep.kv("rods", len(prob.poses))
    rep.kv("junctions", len(prob.constraints))
    rep.kv("pins", len(prob.pins))
    rep.kv("delta", args.thickness - args.depth_deep - args.depth_shallow)
    status = EXIT_OK
    try:
        sol = solve(prob)
    except NoConvergence as exc:
        sol = exc.solution
        status = EXIT_FAIL
        rep.line(f"warning={exc}")
    prof = elevation_profile(sol)
    rep.kv("converged", sol.converged)
    rep.kv("iterations", sol.iterations)
    rep.kv("residual", sol.residual)
    rep.kv("elevation", sol.elevation)
    rep.kv("center_height", prof.center_height)
    rep.kv("rim_height", prof.rim_height)
    if args.out:
        lines = [f"residual {sol.residual!r}", f"elevation {sol.elevation!r}"]
        for r, pose in enumerate(sol.poses):
            a, d = pose.anchor, pose.direction
            lines.append(
                f"pose {r} " + " ".join(repr(float(c)) for c in (*a, *d)) + " " + " ".join(repr(t) for t in pose.notch_params)
            )
        Path(args.out).write_text("\n".join(lines) + "\n")
        manifest.outputs.append(args.out)
    if args.obj:
        Path(args.obj).write_text(solution_obj(sol))
        manifest.outputs.append(args.obj)
    return status


def cmd_export_svg(args, rep: Reporter, manifest: RunManifest) -> int:
    doc = _load(args.file)
    if doc.kind == "pattern":
        if args.replicate:
            text = replica_svg(doc.pattern, args.replicate)
        else:
            text = patch_svg(patch(doc.pattern, args.rings))
    elif doc.embedding is not None:
        text = embedding_svg(doc.embedding)
    else:
        raise ParseError("export-svg needs a pattern or an embedding")
    _write(args.output, text, manifest)
    rep.kv("rods", text.count('class="rod"'))
    return EXIT_OK


def cmd_export_obj(args, rep: Reporter, manifest: RunManifest) -> int:
    doc = _load(args.file)
    if doc.kind == "pattern":
        raise ParseError("export-obj needs an embedding (use formfind --obj for rod geometry)")
    text = embedding_obj(_embedding(doc), args.triangulation)
    _write(args.output, text, manifest)
    rep.kv("faces", sum(1 for ln in text.splitlines() if ln.startswith("f ")))
    return EXIT_OK


def cmd_export_pattern(args, rep: Reporter, manifest: RunManifest) -> int:
    doc = _load(args.file)
    if doc.kind != "pattern":
        raise ParseError("export-pattern needs a pattern")
    _write(args.output, format_pattern(doc.pattern), manifest)
    return EXIT_OK


def _write(path, text, manifest):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
        manifest.outputs.append(str(path))


# -- argument parsing ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="davinci", description="Da Vinci rod domes: combinatorics, curvature and form finding.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--precision", type=int, default=9, help="significant digits in numeric output")
    common.add_argument("--manifest", help="write the run manifest (JSON) here instead of stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", parents=[common], help="check a pattern or map and its rod assignment")
    p.add_argument("file", nargs="?")
    p.add_argument("--list", action="store_true", help="list builtin names")

    p = sub.add_parser("euler", parents=[common], help="Euler characteristic of a map or pattern")
    p.add_argument("file")
    p.add_argument("--surface", nargs="+", default=["torus"], metavar="KIND", help="'torus' or 'replicate N'")

    p = sub.add_parser("defect", parents=[common], help="angular defects and the Descartes total")
    p.add_argument("file")
    p.add_argument("--radians", action="store_true")
    p.add_argument("--tol", type=float, default=ANGLE_TOL, help="angle tolerance (radians)")
    p.add_argument("--collinear-tol", type=float, default=COLLINEAR_TOL, help="collinearity tolerance (radians)")
    p.add_argument("--descartes-tol", type=float, default=DESCARTES_TOL, help="tolerance on the 720 degree total")
    p.add_argument("--triangulation", choices=["fan", "ear"], default="fan")

    p = sub.add_parser("decompose", parents=[common], help="split a cubic graph into rods")
    p.add_argument("file")
    p.add_argument("--all", type=int, metavar="L", help="list up to L decompositions")

    p = sub.add_parser("formfind", parents=[common], help="lift a flat patch into a dome")
    p.add_argument("file")
    p.add_argument("--rings", type=int, default=2)
    p.add_argument("--thickness", type=float, required=True)
    p.add_argument("--depth-deep", type=float, required=True, help="boundary notch depth")
    p.add_argument("--depth-shallow", type=float, required=True, help="interior notch depth")
    p.add_argument("--edge-length", type=float, default=DEFAULT_EDGE_LENGTH, help="mean planar edge length after scaling")
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--tol", type=float, default=None, help="residual tolerance (default 1e-7 * thickness)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--restarts", type=int, default=0, help="extra seeded starts near the flat layout")
    p.add_argument("--out", help="write the solution (poses, residual, elevation)")
    p.add_argument("--obj", help="write rod centerlines as OBJ polylines")

    p = sub.add_parser("export-svg", parents=[common], help="draw a pattern patch, replica or embedding")
    p.add_argument("file")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--rings", type=int, default=2)
    p.add_argument("--replicate", type=int, metavar="N")

    p = sub.add_parser("export-obj", parents=[common], help="triangulated OBJ of an embedding")
    p.add_argument("file")
    p.add_argument("-o", "--output", default="-")
    p.add_argument("--triangulation", choices=["fan", "ear"], default="fan")

    p = sub.add_parser("export-pattern", parents=[common], help="write a pattern in the text format")
    p.add_argument("file")
    p.add_argument("-o", "--output", default="-")
    return ap


HANDLERS = {
    "validate": cmd_validate,
    "euler": cmd_euler,
    "defect": cmd_defect,
    "decompose": cmd_decompose,
    "formfind": cmd_formfind,
    "export-svg": cmd_export_svg,
    "export-obj": cmd_export_obj,
    "export-pattern": cmd_export_pattern,
}


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    params = {k: v for k, v in vars(args).items() if k not in ("command", "file", "manifest")}
    manifest = RunManifest(args.command, [getattr(args, "file", None)] if getattr(args, "file", None) else [], params)
    rep = Reporter(args.precision)
    start = time.perf_counter()
    handler = HANDLERS[args.command]
    try:
        if args.command in ("formfind", "export-svg", "export-obj", "export-pattern"):
            code = handler(args, rep, manifest)
        else:
            code = handler(args, rep)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        code = EXIT_USAGE
    except DavinciError as exc:
        rep.kv("error", type(exc).__name__)
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        code = EXIT_FAIL
    manifest.wall_time = time.perf_counter() - start
    manifest.exit_code = code
    text = json.dumps(asdict(manifest), default=str, sort_keys=True)
    if args.manifest:
        Path(args.manifest).write_text(text + "\n")
    else:
        print(text, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
