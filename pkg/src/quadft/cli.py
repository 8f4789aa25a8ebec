"""Command-line front end.

Subcommands: wft-triangle, wft-quad, gauss, plasticity, universal, evolve,
plot.  Problem documents are UTF-8 JSON (see documents.py); human-readable
results go to stdout with >= 7 significant digits, machine records to
--records as newline-delimited JSON, and drawings to --svg.  Exit codes:
0 success, 2 input error, 3 solver non-convergence.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import asdict

from .documents import (
    ProblemDocument,
    RunRecord,
    SolverOptions,
    parse_problem_document,
    record_to_json,
    run_timestamp,
)
from .errors import (
    AbsorbedWeightsError,
    ConvergenceError,
    DegenerateTreeError,
    DiagonalPointError,
    DocumentError,
    InfeasibleWeightsError,
    OverspendError,
    QuadFTError,
)
from .fermat import (
    CaseKind,
    FermatTree,
    WeightedQuadrilateral,
    locate_4wft,
    solve_4wft_square,
    triangle_wft_angles,
    weighted_distance_sum,
    weiszfeld,
)
from .gauss import GaussTree, GaussWeights, residual_absorbing_rate, solve_gauss_tree
from .geometry import Point, Quadrilateral
from .plasticity import plasticity_line
from .svgplot import Scene, level_curve_loops, render_scene
from .universal import evolve, universal_minimum, weights_for_storage

_HINTS = {
    InfeasibleWeightsError: "adjust the weights (or x_G / B4) to satisfy the feasibility inequalities",
    DegenerateTreeError: "x_G is at or past its absorbing value for these weights; lower x_G",
    AbsorbedWeightsError: "a weight dominates; the optimum sits at that vertex",
    DiagonalPointError: "the optimum lies on a diagonal; use the squared-balance plasticity system",
    OverspendError: "reduce the spending rate so x_G stays inside its feasible interval",
}


def _fmt(v: float) -> str:
    if v != v:  # NaN (undefined angle at an absorbing vertex)
        return "undefined"
    if v == 0.0 or 1e-4 <= abs(v) < 1e8:
        return f"{v:.7f}"
    return f"{v:.7e}"


def _print(line: str = "") -> None:
    sys.stdout.write(line + "\n")


# ------------------------------------------------------------------ #
# Argument parsing
# ------------------------------------------------------------------ #

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadft",
        description="Weighted Fermat-Torricelli and Gauss tree solvers for convex quadrilaterals",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--input", required=True,
                        help="problem document path, or - for standard input")
    common.add_argument("--records", metavar="PATH",
                        help="write the run record as newline-delimited JSON")
    common.add_argument("--svg", metavar="PATH", help="write an SVG rendering")
    common.add_argument("--tol", type=float, help="solver residual tolerance")
    common.add_argument("--max-iter", type=int, dest="max_iter", help="iteration cap")
    common.add_argument("--grid", type=int,
                        help="sample count (universal B4 grid / level-curve raster)")
    common.add_argument("--epsilon", type=float,
                        help="span value treated as collapsed (default 1e-7)")
    common.add_argument("--xg", type=float, help="Gauss variable override")
    common.add_argument("--b4", type=float, help="B4 value on the plasticity line")
    common.add_argument("--storage", type=float, help="stored quantity at the optimum")
    common.add_argument("--spend", type=float, help="spending rate a_G")
    common.add_argument("--normalize-weights", action="store_true",
                        dest="normalize_weights",
                        help="divide the weights by their sum before solving")
    common.add_argument("--seed-angles", dest="seed_angles", metavar="R,R",
                        help="initial (a102, a401) radians for the square system")
    common.add_argument("--levels", metavar="D1,D2,...",
                        help="level-curve offsets above the optimal objective (plot)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, desc in (
        ("wft-triangle", "degree-three optimum of a weighted triangle"),
        ("wft-quad", "degree-four optimum of a weighted convex quadrilateral"),
        ("gauss", "degree-three Gauss tree at a given x_G"),
        ("plasticity", "affine weight family preserving the degree-four optimum"),
        ("universal", "universal absorbing set and minimum value"),
        ("evolve", "evolutionary Gauss tree funded by stored quantity"),
        ("plot", "SVG drawing of the solved tree and optional level curves"),
    ):
        sub.add_parser(name, parents=[common], help=desc)
    return parser


def _read_document(args) -> ProblemDocument:
    if args.input == "-":
        text = sys.stdin.read()
    else:
        try:
            with open(args.input, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise DocumentError(f"cannot read {args.input}: {exc.strerror}") from exc
    return parse_problem_document(text)


def _parse_pair_flag(raw: str, flag: str) -> tuple[float, float]:
    parts = raw.split(",")
    if len(parts) != 2:
        raise DocumentError(f"{flag} expects two comma-separated numbers, got {raw!r}")
    try:
        return (float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise DocumentError(f"{flag} expects numbers, got {raw!r}") from exc


def _parse_list_flag(raw: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(p) for p in raw.split(",") if p.strip())
    except ValueError as exc:
        raise DocumentError(f"{flag} expects comma-separated numbers, got {raw!r}") from exc
    if not values:
        raise DocumentError(f"{flag} expects at least one number")
    return values


def _effective_options(doc: ProblemDocument, args) -> SolverOptions:
    seed = _parse_pair_flag(args.seed_angles, "--seed-angles") if args.seed_angles else None
    levels = _parse_list_flag(args.levels, "--levels") if args.levels else None
    return doc.options.merged_with(
        tol=args.tol,
        max_iter=args.max_iter,
        grid=args.grid,
        epsilon=args.epsilon,
        b4=args.b4,
        storage=args.storage,
        spend=args.spend,
        seed_angles=seed,
        levels=levels,
        normalize_weights=True if args.normalize_weights else None,
    )


def _quad_instance(doc: ProblemDocument, opts: SolverOptions,
                   xg: float | None) -> tuple[WeightedQuadrilateral, float | None]:
    if len(doc.vertices) != 4:
        raise DocumentError("this command needs 4 vertices", path="$.vertices")
    quad = Quadrilateral.from_coords(doc.vertices)
    weights = doc.weights
    if opts.normalize_weights:
        s = sum(weights)
        weights = tuple(w / s for w in weights)
        if xg is not None:
            xg = xg / s
    return WeightedQuadrilateral(quad, weights), xg


def _inputs_echo(doc: ProblemDocument, opts: SolverOptions) -> dict:
    return {
        "vertices": [list(v) for v in doc.vertices],
        "weights": list(doc.weights),
        "xg": doc.xg,
        "options": {k: (list(v) if isinstance(v, tuple) else v)
                    for k, v in asdict(opts).items() if v not in (None, False)},
    }


# ------------------------------------------------------------------ #
# Output helpers
# ------------------------------------------------------------------ #

_ANGLE_NAMES = ("a102", "a203", "a304", "a401")


def _print_fermat(tree: FermatTree) -> None:
    if tree.case.kind is CaseKind.ABSORBED:
        label = f"absorbed at vertex A{tree.case.vertex}"
        if tree.case.boundary:
            label += " (boundary)"
    else:
        label = tree.case.kind.value
    _print(f"case: {label}")
    _print(f"A0: ({_fmt(tree.point.x)}, {_fmt(tree.point.y)})")
    for name, val in zip(_ANGLE_NAMES, tree.angles):
        _print(f"{name}: {_fmt(val)} rad = {_fmt(math.degrees(val))} deg")
    _print(f"objective: {_fmt(tree.objective)}")
    _print(f"equilibrium residual: {_fmt(tree.equilibrium_residual)}")


def _fermat_outputs(tree: FermatTree) -> dict:
    return {
        "case": tree.case.kind.value,
        "vertex": tree.case.vertex,
        "boundary": tree.case.boundary,
        "point": [tree.point.x, tree.point.y],
        "angles_rad": list(tree.angles),
        "angles_deg": [math.degrees(a) for a in tree.angles],
        "objective": tree.objective,
    }


def _print_gauss(tree: GaussTree, w: GaussWeights) -> None:
    _print(f"A0:  ({_fmt(tree.node0.x)}, {_fmt(tree.node0.y)})")
    _print(f"A0': ({_fmt(tree.node0p.x)}, {_fmt(tree.node0p.y)})")
    for name, val in (("a1", tree.a1), ("a2", tree.a2), ("a3", tree.a3),
                      ("a4", tree.a4), ("l", tree.l)):
        _print(f"{name}: {_fmt(val)}")
    _print(f"phi: {_fmt(tree.phi)} rad = {_fmt(math.degrees(tree.phi))} deg")
    _print(f"objective: {_fmt(tree.objective)}")
    _print(f"residual absorbing rate: {_fmt(residual_absorbing_rate(w))}")


def _gauss_outputs(tree: GaussTree, w: GaussWeights) -> dict:
    return {
        "node0": [tree.node0.x, tree.node0.y],
        "node0p": [tree.node0p.x, tree.node0p.y],
        "a1": tree.a1,
        "a2": tree.a2,
        "a3": tree.a3,
        "a4": tree.a4,
        "l": tree.l,
        "phi_rad": tree.phi,
        "phi_deg": math.degrees(tree.phi),
        "objective": tree.objective,
        "weights": list(w.vertex_weights()),
        "xg": w.xg,
        "residual_absorbing_rate": residual_absorbing_rate(w),
    }


def _fermat_scene(wq: WeightedQuadrilateral, tree: FermatTree) -> Scene:
    p = tree.point.as_tuple()
    verts = [v.as_tuple() for v in wq.quad.vertices]
    return Scene(
        quad=tuple(verts),
        tree_edges=tuple((p, v) for v in verts),
        nodes=((p[0], p[1], "A0"),),
    )


def _gauss_scene(quad: Quadrilateral, tree: GaussTree) -> Scene:
    verts = [v.as_tuple() for v in quad.vertices]
    n0 = tree.node0.as_tuple()
    n0p = tree.node0p.as_tuple()
    return Scene(
        quad=tuple(verts),
        tree_edges=((n0, verts[0]), (n0, verts[3]), (n0p, verts[1]), (n0p, verts[2]),
                    (n0, n0p)),
        nodes=((n0[0], n0[1], "A0"), (n0p[0], n0p[1], "A0'")),
    )


# ------------------------------------------------------------------ #
# Commands
# ------------------------------------------------------------------ #

def _cmd_wft_triangle(doc: ProblemDocument, opts: SolverOptions, args):
    if len(doc.vertices) != 3:
        raise DocumentError("wft-triangle needs exactly 3 vertices", path="$.vertices")
    pts = [Point(*v) for v in doc.vertices]
    weights = doc.weights
    if opts.normalize_weights:
        s = sum(weights)
        weights = tuple(w / s for w in weights)
    point = weiszfeld(pts, weights, tol=opts.tol or 1e-10,
                      max_iter=opts.max_iter or 10_000)
    absorbed = any(point.distance_to(p) == 0.0 for p in pts)
    outputs = {
        "point": [point.x, point.y],
        "objective": weighted_distance_sum(pts, weights, point),
        "absorbed": absorbed,
    }
    _print(f"A0: ({_fmt(point.x)}, {_fmt(point.y)})")
    _print(f"objective: {_fmt(outputs['objective'])}")
    if not absorbed:
        a12, a23, a31 = triangle_wft_angles(weights[0], weights[1], weights[2])
        outputs["angles_rad"] = [a12, a23, a31]
        outputs["angles_deg"] = [math.degrees(a) for a in (a12, a23, a31)]
        for name, val in (("a102", a12), ("a203", a23), ("a301", a31)):
            _print(f"{name}: {_fmt(val)} rad = {_fmt(math.degrees(val))} deg")
    else:
        _print("case: absorbed at a vertex")
    return outputs, {}, None


def _canonical_square_side(quad: Quadrilateral) -> float | None:
    v = quad.vertices
    side = v[1].x
    expect = ((0.0, 0.0), (side, 0.0), (side, side), (0.0, side))
    if side > 0 and all(
        abs(p.x - ex) < 1e-12 * side and abs(p.y - ey) < 1e-12 * side
        for p, (ex, ey) in zip(v, expect)
    ):
        return side
    return None


def _cmd_wft_quad(doc, opts, args):
    wq, _ = _quad_instance(doc, opts, None)
    if opts.seed_angles is not None:
        # explicit (a102, a401) seeds drive the square circle system
        side = _canonical_square_side(wq.quad)
        if side is None:
            raise DocumentError(
                "--seed-angles applies to the canonical square (0,0),(a,0),(a,a),(0,a)"
            )
        tree = solve_4wft_square(side, wq.weights, init=opts.seed_angles,
                                 tol=opts.tol or 1e-10, max_iter=opts.max_iter or 200)
    else:
        tree = locate_4wft(wq, tol=opts.tol or 1e-10, max_iter=opts.max_iter or 200)
    _print_fermat(tree)
    diagnostics = {
        "iterations": tree.iterations,
        "equilibrium_residual": tree.equilibrium_residual,
    }
    return _fermat_outputs(tree), diagnostics, _fermat_scene(wq, tree)


def _cmd_gauss(doc, opts, args):
    xg = args.xg if args.xg is not None else doc.xg
    if xg is None:
        raise DocumentError("gauss needs x_G (document key 'xg' or flag --xg)")
    wq, xg = _quad_instance(doc, opts, xg)
    w = GaussWeights(*wq.weights, xg)
    tree = solve_gauss_tree(wq.quad, w)
    _print_gauss(tree, w)
    return _gauss_outputs(tree, w), {}, _gauss_scene(wq.quad, tree)


def _line_for(doc, opts, args):
    wq, _ = _quad_instance(doc, opts, None)
    tree = locate_4wft(wq, tol=opts.tol or 1e-10, max_iter=opts.max_iter or 200)
    return wq, tree, plasticity_line(wq, tree)


def _line_outputs(line) -> dict:
    return {
        "c": line.c,
        "coefficients": [list(co) for co in line.coefficients],
        "b4_interval": list(line.b4_interval),
        "point": [line.point.x, line.point.y],
    }


def _cmd_plasticity(doc, opts, args):
    wq, tree, line = _line_for(doc, opts, args)
    _print(f"A0: ({_fmt(line.point.x)}, {_fmt(line.point.y)})")
    _print(f"c: {_fmt(line.c)}")
    for i, (x, y) in enumerate(line.coefficients, start=1):
        sign = "+" if x >= 0 else "-"
        _print(f"B{i} = {_fmt(y)} {sign} {_fmt(abs(x))} * B4")
    lo, hi = line.b4_interval
    _print(f"B4 interval: ({_fmt(lo)}, {_fmt(hi)})")
    diagnostics = {"equilibrium_residual": tree.equilibrium_residual}
    return _line_outputs(line), diagnostics, _fermat_scene(wq, tree)


def _cmd_universal(doc, opts, args):
    wq, tree, line = _line_for(doc, opts, args)
    result = universal_minimum(wq.quad, line, grid=opts.grid or 33,
                               eps=opts.epsilon or 1e-7)
    _print("  ".join(h.rjust(13) for h in ("B1", "B2", "B3", "B4", "x_G", "f")))
    for s in result.samples:
        b1, b2, b3, b4 = s.weights
        _print("  ".join(_fmt(v).rjust(13) for v in (b1, b2, b3, b4, s.xg_absorbing,
                                                     s.objective)))
    _print(f"u_FT: {_fmt(result.u_ft)}")
    _print(f"B4*: {_fmt(result.b4_star)}")
    _print(f"universal absorbing rate: {_fmt(result.rate)}")
    if result.multimodal:
        _print("warning: absorbing profile is not unimodal on the sampled grid")
    outputs = {
        "u_ft": result.u_ft,
        "b4_star": result.b4_star,
        "rate": result.rate,
        "multimodal": result.multimodal,
        "samples": [
            {"b4": s.b4, "weights": list(s.weights), "xg_absorbing": s.xg_absorbing,
             "objective": s.objective}
            for s in result.samples
        ],
        "plasticity": _line_outputs(line),
    }
    diagnostics = {"skipped": [[b4, why] for b4, why in result.skipped]}
    return outputs, diagnostics, _fermat_scene(wq, tree)


def _cmd_evolve(doc, opts, args):
    if opts.storage is None or opts.spend is None:
        raise DocumentError("evolve needs --storage and --spend (or document options)")
    wq, tree, line = _line_for(doc, opts, args)
    b4 = opts.b4
    if b4 is None:
        candidates = weights_for_storage(wq.quad, line, opts.storage,
                                         eps=opts.epsilon or 1e-7)
        b4 = candidates[0]
        _print("B4 candidates: " + ", ".join(_fmt(v) for v in candidates))
    gtree = evolve(wq.quad, line, opts.storage, opts.spend, b4)
    weights = line.weights_at(b4)
    w = GaussWeights(*weights, opts.storage - opts.spend)
    _print(f"storage: {_fmt(opts.storage)}  spend: {_fmt(opts.spend)}  "
           f"x_G: {_fmt(w.xg)}  B4: {_fmt(b4)}")
    _print_gauss(gtree, w)
    outputs = _gauss_outputs(gtree, w)
    outputs.update({"storage": opts.storage, "spend": opts.spend, "b4": b4})
    return outputs, {}, _gauss_scene(wq.quad, gtree)


def _cmd_plot(doc, opts, args):
    if not args.svg:
        raise DocumentError("plot needs --svg PATH")
    xg = args.xg if args.xg is not None else doc.xg
    if xg is not None:
        outputs, diagnostics, scene = _cmd_gauss(doc, opts, args)
    else:
        outputs, diagnostics, scene = _cmd_wft_quad(doc, opts, args)
    if opts.levels:
        wq, _ = _quad_instance(doc, opts, None)
        pts = [v.as_tuple() for v in wq.quad.vertices]
        if "point" in outputs:
            center = tuple(outputs["point"])
            base = outputs["objective"]
        else:
            center = tuple(outputs["node0"])
            base = weighted_distance_sum(
                wq.quad.vertices, wq.weights, Point(*center)
            )
        levels = [base + d for d in opts.levels]
        curves = level_curve_loops(pts, wq.weights, levels, center,
                                   grid=opts.grid or 129)
        scene = Scene(
            quad=scene.quad,
            tree_edges=scene.tree_edges,
            nodes=scene.nodes,
            vertex_labels=scene.vertex_labels,
            level_curves=tuple((lvl, loops) for lvl, loops in curves),
        )
        outputs["levels"] = levels
    return outputs, diagnostics, scene


_COMMANDS = {
    "wft-triangle": _cmd_wft_triangle,
    "wft-quad": _cmd_wft_quad,
    "gauss": _cmd_gauss,
    "plasticity": _cmd_plasticity,
    "universal": _cmd_universal,
    "evolve": _cmd_evolve,
    "plot": _cmd_plot,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        doc = _read_document(args)
        opts = _effective_options(doc, args)
        outputs, diagnostics, scene = _COMMANDS[args.command](doc, opts, args)
        record = RunRecord(
            command=args.command,
            inputs=_inputs_echo(doc, opts),
            outputs=outputs,
            diagnostics=diagnostics,
            timestamp=run_timestamp(),
        )
        if args.records:
            with open(args.records, "w", encoding="utf-8") as fh:
                fh.write(record_to_json(record) + "\n")
        if args.svg:
            if scene is None:
                raise DocumentError(f"{args.command} has nothing to draw")
            with open(args.svg, "wb") as fh:
                fh.write(render_scene(scene).encode("utf-8"))
        return 0
    except DocumentError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except ConvergenceError as exc:
        sys.stderr.write(f"error: solver did not converge: {exc}\n")
        return 3
    except QuadFTError as exc:
        sys.stderr.write(f"error: {exc}\n")
        hint = next((h for t, h in _HINTS.items() if isinstance(exc, t)), None)
        if hint:
            sys.stderr.write(f"hint: {hint}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
