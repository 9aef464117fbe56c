"""Command-line interface.

    eccpie chart --shares 0.2,0.3,0.15,0.25,0.1 --apex 0.5,-0.5 --svg chart.svg
    eccpie cut --proportions 0.4,0.35,0.25 --json cut.json --svg cut.svg
    eccpie solve-poly --system single.txt --export-only --kind single-sector --lambda 0.25
    eccpie solve-poly --system single.txt
    eccpie pizza --apex 0.3,-0.2 --blades 8

Exit codes: 0 success, 1 internal error, 2 infeasible or invalid input,
3 path budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .charts import ChartError, ChartSpec, layout_from_points, solve_chart
from .geometry import GeometryError, Orientation, Point2, pizza_check
from .polysys import (
    PolynomialError,
    build_piecut_system,
    build_single_sector_system,
    export_system,
    max_sector_fraction,
    parse_system,
    rebuild_from_source,
)
from .solvers.homotopy import PathBudgetExceeded, TrackerConfig
from .solvers.newton import NewtonError, newton
from .solvers.piecut import REFERENCE_LAMBDAS, REFERENCE_SOLUTION, check_proportions, solve_piecut
from .solvers.roots import filter_roots, total_degree_solve
from .svg import SvgOptions, render_svg
from .taylor import arccos_taylor

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_BUDGET = 0, 1, 2, 3
SCHEMA_VERSION = 1
REFERENCE_CHECK_TOL = 1e-8


class InputError(Exception):
    pass


class BudgetError(Exception):
    pass


@dataclass
class RunReport:
    command: str
    inputs: dict
    solutions: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    timing: dict | None = None
    extra: dict = field(default_factory=dict)

    def to_json(self) -> str:
        doc = {"schema": SCHEMA_VERSION, "version": __version__, **asdict(self)}
        if doc["timing"] is None:
            del doc["timing"]
        extra = doc.pop("extra")
        doc.update(extra)
        return json.dumps(_jsonable(doc), indent=2) + "\n"


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_jsonable(obj.real), _jsonable(obj.imag)]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if hasattr(obj, "value") and isinstance(getattr(obj, "value"), str):
        return obj.value
    return obj


def _floats(flag: str, text: str, count: int | None = None) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{flag}: expected comma-separated numbers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise InputError(f"{flag}: expected {count} numbers, got {len(vals)}")
    if not all(math.isfinite(v) for v in vals):
        raise InputError(f"{flag}: values must be finite")
    return vals


def _write(path: str | None, text: str) -> None:
    if path:
        Path(path).write_text(text)


def _emit(report: RunReport, args) -> None:
    text = report.to_json()
    if args.json:
        _write(args.json, text)
    else:
        sys.stdout.write(text)
    for w in report.warnings:
        print(f"warning: {w}", file=sys.stderr)


def _timer():
    t0 = time.perf_counter()
    return lambda: round((time.perf_counter() - t0) * 1e3, 3)


# commands


def cmd_chart(args) -> int:
    shares = _floats("--shares", args.shares)
    apex = _floats("--apex", args.apex, 2)
    start = _floats("--start", args.start, 2)
    orientation = Orientation.CLOCKWISE if args.clockwise else Orientation.COUNTERCLOCKWISE
    elapsed = _timer()
    try:
        spec = ChartSpec(tuple(shares), Point2(*apex), Point2(*start), orientation)
    except ChartError as exc:
        flag = "--apex" if "apex" in str(exc) else "--start" if "start" in str(exc) else "--shares"
        raise InputError(f"{flag}: {exc}") from None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        layout = solve_chart(spec)
    solve_ms = elapsed()
    if args.svg:
        _write(args.svg, render_svg(layout, SvgOptions(labels=not args.no_labels)))
    sectors = [
        {"share": s, "area": a, "area_error": a - s * math.pi,
         "ray_angle": layout.ray_angles[i], "boundary_point": list(layout.boundary_points[i])}
        for i, (s, a) in enumerate(zip(spec.shares, layout.sector_areas))
    ]
    report = RunReport(
        "chart",
        {"shares": shares, "apex": apex, "start": start, "orientation": orientation.value},
        [{"apex": list(layout.apex), "orientation": orientation.value, "sectors": sectors,
          "area_sum": math.fsum(layout.sector_areas)}],
        list(spec.warnings),
        {"solve": solve_ms} if args.timing else None,
    )
    _emit(report, args)
    return EXIT_OK


def _solution_json(sol, sys_residual=None) -> dict:
    out = {
        "values": sol.values,
        "exact_residual_max": sol.residual,
        "sector_areas": list(sol.areas),
        "equivalence_class": {
            "size": sol.class_size,
            "relation": "reflections in the vertical and/or horizontal axis",
            "members": sol.members,
        },
    }
    if sol.iterations is not None:
        out["newton_iterations"] = sol.iterations
    if sol.polynomial_root is not None:
        out["polynomial_root"] = sol.polynomial_root
    return out


def cmd_cut(args) -> int:
    props = _floats("--proportions", args.proportions)
    try:
        lam = check_proportions(props)
    except ValueError as exc:
        raise InputError(f"--proportions: {exc}") from None
    bound = max_sector_fraction()
    if max(lam) > bound:
        raise InputError(
            f"--proportions: largest share {max(lam):g} exceeds {bound:.4f}; with the apex on the rim a "
            f"regular 3-blade cutter leaves at most pi - 2(pi/6 - sqrt(3)/4) ~ 0.9423*pi in one sector"
        )
    starts = [_floats("--start", s, 11) for s in (args.start or [])]
    if args.mode == "refine" and not starts:
        raise InputError("--start: refine mode needs at least one 11-value starting point")
    cfg = TrackerConfig(seed=args.seed)
    try:
        result = solve_piecut(lam[0], lam[1], args.mode, cfg, starts=starts, path_budget=args.path_budget)
    except PathBudgetExceeded as exc:
        raise BudgetError(str(exc)) from None
    report = RunReport(
        "cut",
        {"proportions": props, "mode": args.mode, "path_budget": args.path_budget, "seed": args.seed},
        [_solution_json(s) for s in result.solutions],
        list(result.warnings),
        result.timing_ms if args.timing else None,
        {"diagnostics": result.diagnostics},
    )
    if tuple(props) == REFERENCE_LAMBDAS:
        check = {"reference": REFERENCE_SOLUTION, "tolerance": REFERENCE_CHECK_TOL}
        if result.solutions:
            got = result.solutions[0].values
            dev = {k: abs(got[k] - v) for k, v in REFERENCE_SOLUTION.items()}
            check.update(max_abs_deviation=max(dev.values()), deviation=dev,
                         passed=max(dev.values()) <= REFERENCE_CHECK_TOL)
        else:
            check["passed"] = False
        report.extra["reference_check"] = check
    if args.svg and result.solutions:
        sol = result.solutions[0]
        layout = layout_from_points(sol.apex, sol.blade_points)
        _write(args.svg, render_svg(layout, SvgOptions(labels=not args.no_labels)))
    _emit(report, args)
    if not result.solutions:
        print(f"error: {result.diagnostics.get('message', 'no solution')}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def _root_json(sys_, root) -> dict:
    return {
        "point": {n: [float(z.real), float(z.imag)] for n, z in zip(sys_.var_names, root.point)},
        "classification": root.classification.value,
        "rejection_reasons": root.rejection_reasons,
        "multiplicity": root.multiplicity,
        "residual": root.residual,
    }


def _built_system(args):
    taylor = arccos_taylor(args.taylor_center, args.taylor_terms)
    if args.kind == "piecut":
        lam = check_proportions(_floats("--proportions", args.proportions))
        return build_piecut_system(lam[0], lam[1], taylor)
    apex = _floats("--apex", args.apex, 2)
    return build_single_sector_system(args.lam, apex, taylor)


def cmd_solve_poly(args) -> int:
    if args.export_only:
        try:
            sys_ = _built_system(args)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        _write(args.system, export_system(sys_))
        report = RunReport("solve-poly", {"system": args.system, "export_only": True, "kind": args.kind},
                           [], list(sys_.warnings), None,
                           {"variables": list(sys_.var_names), "degrees": sys_.degrees,
                            "bezout": sys_.bezout_number})
        _emit(report, args)
        return EXIT_OK

    try:
        text = Path(args.system).read_text()
    except OSError as exc:
        raise InputError(f"--system: cannot read {args.system!r}: {exc.strerror}") from None
    try:
        sys_ = parse_system(text)
    except PolynomialError as exc:
        raise InputError(f"--system: {exc}") from None
    notes = []
    if sys_.source:
        try:
            rebuilt = rebuild_from_source(sys_.source)
        except (ValueError, KeyError) as exc:
            notes.append(f"could not rebuild filters from the source line: {exc}")
        else:
            if list(rebuilt.polys) == list(sys_.polys):
                sys_ = rebuilt
            else:
                notes.append("polynomials differ from their source line; filters not applied")
    elapsed = _timer()
    try:
        roots = total_degree_solve(sys_, TrackerConfig(seed=args.seed), args.path_budget)
    except PathBudgetExceeded as exc:
        raise BudgetError(str(exc)) from None
    roots = filter_roots(sys_, roots)
    track_ms = elapsed()
    refined = []
    if sys_.exact_residual is not None:
        for r in roots.accepted:
            try:
                res = newton(sys_.exact_residual, r.point.real, tol=1e-13)
            except NewtonError:
                continue
            refined.append({"values": dict(zip(sys_.var_names, res.x.tolist())),
                            "exact_residual_max": res.residual, "newton_iterations": res.iterations})
    report = RunReport(
        "solve-poly",
        {"system": args.system, "path_budget": args.path_budget, "seed": args.seed},
        refined,
        notes + roots.warnings,
        {"track": track_ms} if args.timing else None,
        {"variables": list(sys_.var_names), "degrees": sys_.degrees, "paths": roots.n_paths,
         "bezout": roots.bezout, "path_status": roots.path_status, "root_counts": roots.counts(),
         "filters_applied": sys_.filters is not None,
         "roots": [_root_json(sys_, r) for r in roots.roots]},
    )
    _emit(report, args)
    return EXIT_OK


def cmd_pizza(args) -> int:
    apex = _floats("--apex", args.apex, 2)
    try:
        even, odd = pizza_check(apex, args.blades, args.alpha)
    except GeometryError as exc:
        flag = "--blades" if "n_blades" in str(exc) else "--apex"
        raise InputError(f"{flag}: {exc}") from None
    half = math.pi / 2
    report = RunReport(
        "pizza",
        {"apex": apex, "blades": args.blades, "alpha": args.alpha},
        [{"sectors": 2 * args.blades, "sum_even": even, "sum_odd": odd,
          "deviation_even": even - half, "deviation_odd": odd - half}],
    )
    _emit(report, args)
    return EXIT_OK


# argument parsing

VALUE_FLAGS = {"--apex", "--start", "--shares", "--proportions", "--alpha"}


def _join_negative_values(argv: list[str]) -> list[str]:
    """Let ``--apex -0.5,0.5`` through argparse, which would read the value as a flag."""
    out, i = [], 0
    while i < len(argv):
        tok = argv[i]
        if tok in VALUE_FLAGS and i + 1 < len(argv) and argv[i + 1].startswith("-") \
                and argv[i + 1][1:2].replace(".", "").isdigit():
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
            continue
        out.append(tok)
        i += 1
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eccpie", description="Eccentric pie charts and regular-cutter pie cutting.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, svg=True):
        sp.add_argument("--json", metavar="PATH", help="write the JSON report here instead of stdout")
        sp.add_argument("--seed", type=int, default=0, help="seed for the homotopy gamma constant")
        sp.add_argument("--timing", action="store_true", help="include per-stage timings in the report")
        if svg:
            sp.add_argument("--svg", metavar="PATH", help="write an SVG drawing here")
            sp.add_argument("--no-labels", action="store_true", help="omit percentage labels")

    c = sub.add_parser("chart", help="lay out an eccentric pie chart")
    c.add_argument("--shares", required=True, help="comma-separated shares summing to 1")
    c.add_argument("--apex", default="0,0", help="apex x,y inside the unit circle")
    c.add_argument("--start", default="0,1", help="first boundary point x,y")
    c.add_argument("--clockwise", action="store_true")
    common(c)
    c.set_defaults(func=cmd_chart)

    k = sub.add_parser("cut", help="place a regular 3-blade cutter for given proportions")
    k.add_argument("--proportions", required=True, help="three comma-separated proportions")
    k.add_argument("--mode", choices=["oracle", "pipeline", "refine"], default="oracle")
    k.add_argument("--start", action="append", help="11 comma-separated values (refine mode); repeatable")
    k.add_argument("--path-budget", type=int, default=100_000)
    common(k)
    k.set_defaults(func=cmd_cut)

    s = sub.add_parser("solve-poly", help="solve or export a polynomial system")
    s.add_argument("--system", required=True, help="system file (read, or written with --export-only)")
    s.add_argument("--export-only", action="store_true", help="write a built-in system instead of solving")
    s.add_argument("--kind", choices=["piecut", "single-sector"], default="piecut")
    s.add_argument("--proportions", default="0.4,0.35,0.25", help="piecut: three proportions")
    s.add_argument("--lambda", dest="lam", type=float, default=0.25, help="single-sector: share")
    s.add_argument("--apex", default="0,0", help="single-sector: apex x,y")
    s.add_argument("--taylor-center", type=float, default=0.0)
    s.add_argument("--taylor-terms", type=int, default=6)
    s.add_argument("--path-budget", type=int, default=100_000)
    common(s, svg=False)
    s.set_defaults(func=cmd_solve_poly)

    z = sub.add_parser("pizza", help="alternating sector sums of an equiangular cutter")
    z.add_argument("--apex", required=True, help="apex x,y inside the unit circle")
    z.add_argument("--blades", type=int, required=True, help="number of lines (even, >= 4)")
    z.add_argument("--alpha", type=float, default=0.0, help="direction of the first line")
    common(z, svg=False)
    z.set_defaults(func=cmd_pizza)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_join_negative_values(list(sys.argv[1:] if argv is None else argv)))
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
