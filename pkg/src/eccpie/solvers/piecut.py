"""Regular 3-blade pie cutting, and the single-sector polynomial pipeline.

Three ways to solve the cutting problem:

``oracle``
    Reduced exact problem in (x0, alpha): the blades leave the apex (x0, 0) at
    alpha, alpha + 2pi/3, alpha + 4pi/3 (or the clockwise mirror), and the first
    two sector areas must equal lambda1*pi and lambda2*pi.  Multi-start Newton.
``pipeline``
    Taylor-polynomialized 11-variable system, total-degree homotopy, root
    filtering, Newton refinement on the exact system.  Millions of paths, so it
    only runs with an explicitly raised path budget.
``refine``
    Newton on the exact 11-variable system from caller-supplied points.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from ..charts import ChartSpec, solve_chart
from ..geometry import EccentricSector, GeometryError, Orientation, boundary_point, sector_area_decomposed
from ..polysys import (
    PIECUT_VARS,
    PolySystem,
    build_piecut_system,
    build_single_sector_system,
    feasibility_warnings,
    piecut_sector_areas,
)
from ..taylor import UniPoly
from .homotopy import TrackerConfig
from .newton import NewtonError, newton
from .roots import FilterTolerances, RootSet, filter_roots, total_degree_solve

BLADE_ANGLE = 2.0 * math.pi / 3.0
SAME_SOLUTION_TOL = 1e-7
REFINE_TOL = 1e-13

# known cutter position for lambda = (0.4, 0.35, 0.25), to 9 decimals
REFERENCE_SOLUTION = {
    "x0": 0.164641996,
    "x1": 0.375176778,
    "y1": 0.926953281,
    "x2": -0.939722783,
    "y2": -0.341937259,
    "x3": 0.805164109,
    "y3": -0.593052069,
    "beta": 2.304361451,
    "phi": 2.157770813,
    "s_beta": 0.742792198,
    "s_phi": 0.832620150,
}
REFERENCE_LAMBDAS = (0.4, 0.35, 0.25)


class Mode(str, Enum):
    ORACLE = "oracle"
    PIPELINE = "pipeline"
    REFINE = "refine"


class InfeasibleProportions(ValueError):
    pass


@dataclass
class PieCutSolution:
    values: dict[str, float]
    residual: float
    areas: tuple[float, float, float]
    class_size: int = 1
    members: list[dict[str, float]] = field(default_factory=list)
    iterations: int | None = None
    polynomial_root: dict[str, float] | None = None

    def vector(self) -> np.ndarray:
        return np.array([self.values[k] for k in PIECUT_VARS])

    @property
    def apex(self) -> tuple[float, float]:
        return (self.values["x0"], 0.0)

    @property
    def blade_points(self) -> list[tuple[float, float]]:
        v = self.values
        return [(v["x1"], v["y1"]), (v["x2"], v["y2"]), (v["x3"], v["y3"])]


@dataclass
class PieCutResult:
    lambdas: tuple[float, float, float]
    mode: Mode
    solutions: list[PieCutSolution]
    warnings: list[str] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    timing_ms: dict[str, float] = field(default_factory=dict)


def _arc_angle(p, q) -> float:
    """Central angle from p to q (in [0, pi]), computed stably."""
    cross = p[0] * q[1] - p[1] * q[0]
    return math.atan2(abs(cross), p[0] * q[0] + p[1] * q[1])


def blade_solution(x0: float, alpha: float, orientation: Orientation) -> np.ndarray:
    """The 11 unknowns for a cutter at (x0, 0) whose first blade points along ``alpha``."""
    apex = (x0, 0.0)
    sign = orientation.sign
    pts = [boundary_point(apex, alpha + sign * k * BLADE_ANGLE) for k in range(3)]
    beta = _arc_angle(pts[0], pts[1])
    phi = _arc_angle(pts[1], pts[2])
    return np.array([x0, *pts[0], *pts[1], *pts[2], beta, phi, math.sin(beta), math.sin(phi)])


def _reduced_residual(lambdas, orientation: Orientation):
    sign = orientation.sign
    targets = (lambdas[0] * math.pi, lambdas[1] * math.pi)

    def residual(z):
        x0, alpha = float(z[0]), float(z[1])
        apex = (x0, 0.0)
        out = []
        for k, target in enumerate(targets):
            a = alpha + sign * k * BLADE_ANGLE
            sec = EccentricSector(apex, a, a + sign * BLADE_ANGLE, orientation)
            out.append(sector_area_decomposed(sec) - target)
        return np.array(out)

    return residual


def oracle_grid() -> list[tuple[float, float]]:
    x0s = np.round(np.arange(-0.9, 0.9 + 1e-9, 0.1), 10)
    alphas = np.arange(0.0, BLADE_ANGLE + 1e-9, 0.1)
    return [(float(x), float(a)) for x in x0s for a in alphas]


def _oracle_candidates(lambdas, starts=None) -> tuple[list[np.ndarray], dict]:
    found = []
    failures = 0
    grid = starts if starts is not None else oracle_grid()
    for orientation in Orientation:
        residual = _reduced_residual(lambdas, orientation)
        for x0, alpha in grid:
            try:
                res = newton(residual, [x0, alpha], tol=1e-14, max_iters=40, singular="lstsq")
            except (NewtonError, GeometryError):
                failures += 1
                continue
            x0s, alpha_s = res.x
            if not abs(x0s) < 1.0:
                failures += 1
                continue
            found.append(blade_solution(float(x0s), float(alpha_s), orientation))
    return found, {"starts": 2 * len(grid), "failed_starts": failures}


REFLECTIONS = ((1, 1), (-1, 1), (1, -1), (-1, -1))


def reflect_solution(v: np.ndarray, sx: int, sy: int) -> np.ndarray:
    """Mirror a solution in the vertical (sx = -1) and/or horizontal (sy = -1) axis."""
    w = np.array(v, dtype=float)
    w[[0, 1, 3, 5]] *= sx
    w[[2, 4, 6]] *= sy
    return w


def canonical_rotation(v: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Centered cutters form a rotation family; fix the member whose first blade points up."""
    if abs(v[0]) >= tol:
        return v
    alpha = math.atan2(v[2], v[1])
    c, s = math.cos(math.pi / 2 - alpha), math.sin(math.pi / 2 - alpha)
    w = np.array(v, dtype=float)
    w[0] = 0.0
    for i in (1, 3, 5):
        x, y = v[i], v[i + 1]
        w[i], w[i + 1] = c * x - s * y, s * x + c * y
    return w


def unique_solutions(vectors: Iterable[np.ndarray], tol: float = SAME_SOLUTION_TOL) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for v in sorted((canonical_rotation(np.asarray(v, float)) for v in vectors), key=lambda v: tuple(np.round(v, 8))):
        if not any(np.max(np.abs(v - u)) < tol for u in out):
            out.append(v)
    return out


def _canonical_key(v):
    return (round(v[2], 9), round(v[1], 9))


def group_reflections(vectors: Sequence[np.ndarray], tol: float = SAME_SOLUTION_TOL) -> list[list[np.ndarray]]:
    """Partition solutions into classes related by axis reflections.

    Each class is sorted so its first member is the canonical one: largest y1,
    ties broken by largest x1.
    """
    classes: list[list[np.ndarray]] = []
    for v in vectors:
        for cl in classes:
            if any(np.max(np.abs(reflect_solution(v, sx, sy) - cl[0])) < tol for sx, sy in REFLECTIONS):
                cl.append(v)
                break
        else:
            classes.append([v])
    for cl in classes:
        cl.sort(key=_canonical_key, reverse=True)
    classes.sort(key=lambda cl: _canonical_key(cl[0]), reverse=True)
    return classes


def _as_dict(v) -> dict[str, float]:
    return {k: float(x) for k, x in zip(PIECUT_VARS, v)}


def _validated(sys: PolySystem, classes, extra=None) -> list[PieCutSolution]:
    sols = []
    for cl in classes:
        v = cl[0]
        areas = tuple(piecut_sector_areas((v[0], 0.0), v[1:7]))
        sol = PieCutSolution(
            values=_as_dict(v),
            residual=float(np.max(np.abs(sys.exact_residual(v)))),
            areas=areas,
            class_size=len(cl),
            members=[_as_dict(m) for m in cl],
        )
        if extra:
            key = tuple(np.round(v, 7))
            info = extra.get(key)
            if info:
                sol.iterations = info.get("iterations")
                sol.polynomial_root = info.get("polynomial_root")
        sols.append(sol)
    return sols


def _area_ok(v, lambdas, tol=1e-8) -> bool:
    areas = piecut_sector_areas((v[0], 0.0), v[1:7])
    return all(abs(a - lam * math.pi) < tol for a, lam in zip(areas, lambdas))


def check_proportions(proportions: Sequence[float]) -> tuple[float, float, float]:
    if len(proportions) != 3:
        raise ValueError(f"a regular 3-blade cutter needs exactly 3 proportions, got {len(proportions)}")
    lam = tuple(float(p) for p in proportions)
    if not all(p > 0 for p in lam):
        raise ValueError(f"proportions must be positive, got {lam}")
    total = math.fsum(lam)
    if abs(total - 1.0) > 1e-3:
        raise ValueError(f"proportions must sum to 1, got {total}")
    return tuple(p / total for p in lam)


def solve_piecut(
    lambda1: float,
    lambda2: float,
    mode: Mode | str = Mode.ORACLE,
    cfg: TrackerConfig | None = None,
    starts: Sequence[Sequence[float]] | None = None,
    taylor: UniPoly | None = None,
    path_budget: int = 100_000,
    strict: bool = False,
) -> PieCutResult:
    """Find cutter positions giving sector areas lambda1*pi, lambda2*pi, (1 - lambda1 - lambda2)*pi.

    With ``strict`` an infeasible largest share raises :class:`InfeasibleProportions`
    instead of only adding a warning.
    """
    mode = Mode(mode)
    lambdas = (lambda1, lambda2, 1.0 - lambda1 - lambda2)
    warnings = feasibility_warnings(lambdas)
    if warnings and strict:
        raise InfeasibleProportions(warnings[0])
    timing: dict[str, float] = {}
    t0 = time.perf_counter()
    sys = build_piecut_system(lambda1, lambda2, taylor)
    timing["build"] = (time.perf_counter() - t0) * 1e3
    diagnostics: dict = {"bezout": sys.bezout_number}
    extra: dict = {}

    t0 = time.perf_counter()
    if mode is Mode.ORACLE:
        candidates, diag = _oracle_candidates(lambdas)
        diagnostics.update(diag)
        refined = [v for v in candidates if _area_ok(v, lambdas)]
        timing["oracle"] = (time.perf_counter() - t0) * 1e3
    elif mode is Mode.REFINE:
        if not starts:
            raise ValueError("refine mode needs at least one starting point")
        refined = []
        failures = []
        for s in starts:
            try:
                res = newton(sys.exact_residual, np.asarray(s, float), tol=REFINE_TOL, max_iters=50)
            except NewtonError as exc:
                failures.append(str(exc))
                continue
            refined.append(res.x)
            extra[tuple(np.round(canonical_rotation(res.x), 7))] = {"iterations": res.iterations}
        diagnostics["failed_starts"] = failures
        timing["newton"] = (time.perf_counter() - t0) * 1e3
    else:
        roots = filter_roots(sys, total_degree_solve(sys, cfg, path_budget))
        timing["homotopy"] = (time.perf_counter() - t0) * 1e3
        diagnostics["roots"] = roots.counts()
        diagnostics["path_status"] = roots.path_status
        warnings.extend(roots.warnings)
        t0 = time.perf_counter()
        refined = []
        for r in roots.accepted:
            start = r.point.real
            try:
                res = newton(sys.exact_residual, start, tol=REFINE_TOL, max_iters=50)
            except NewtonError:
                continue
            refined.append(res.x)
            extra[tuple(np.round(canonical_rotation(res.x), 7))] = {
                "iterations": res.iterations,
                "polynomial_root": _as_dict(start),
            }
        timing["newton"] = (time.perf_counter() - t0) * 1e3

    t0 = time.perf_counter()
    unique = unique_solutions(refined)
    classes = group_reflections(unique)
    solutions = _validated(sys, classes, extra)
    timing["group"] = (time.perf_counter() - t0) * 1e3
    if not solutions:
        diagnostics["message"] = "no cutter position reproduces the requested proportions"
    if any(abs(s.values["x0"]) < 1e-9 for s in solutions):
        diagnostics["rotation_family"] = "apex at the center: every rotation solves; reported with the first blade pointing up"
    return PieCutResult(lambdas, mode, solutions, warnings, diagnostics, timing)


# single-sector demonstration


@dataclass
class SingleSectorRun:
    system: PolySystem
    roots: RootSet
    polynomial: list[np.ndarray]
    refined: list[np.ndarray]
    oracle: list[np.ndarray]
    timing_ms: dict[str, float]


def single_sector_oracle(lam: float, apex, first_point=(0.0, 1.0)) -> list[np.ndarray]:
    """(x2, y2, beta, s_beta) for both orientations, via the chart layout solver."""
    out = []
    for orientation in Orientation:
        layout = solve_chart(ChartSpec((lam, 1.0 - lam), apex, first_point, orientation))
        p1, p2 = layout.boundary_points
        beta = _arc_angle(p1, p2)
        out.append(np.array([p2.x, p2.y, beta, math.sin(beta)]))
    return out


def solve_single_sector(lam: float, apex=0.0, cfg: TrackerConfig | None = None,
                        taylor: UniPoly | None = None, first_point=(0.0, 1.0),
                        tolerances: FilterTolerances | None = None) -> SingleSectorRun:
    """Polynomial pipeline on one sector: homotopy, filtering, Newton on the exact system."""
    timing = {}
    t0 = time.perf_counter()
    sys = build_single_sector_system(lam, apex, taylor, first_point)
    roots = filter_roots(sys, total_degree_solve(sys, cfg), tolerances)
    timing["homotopy"] = (time.perf_counter() - t0) * 1e3
    t0 = time.perf_counter()
    poly, refined = [], []
    for r in roots.accepted:
        try:
            res = newton(sys.exact_residual, r.point.real, tol=REFINE_TOL, max_iters=50)
        except NewtonError:
            continue
        poly.append(r.point.real.copy())
        refined.append(res.x)
    timing["newton"] = (time.perf_counter() - t0) * 1e3
    ax, ay = (float(apex), 0.0) if np.isscalar(apex) else tuple(map(float, apex))
    oracle = single_sector_oracle(lam, (ax, ay), first_point)
    return SingleSectorRun(sys, roots, poly, refined, oracle, timing)


def rotate_piecut_frame(values: dict[str, float]) -> tuple[tuple[float, float], list[tuple[float, float]], float]:
    """Rotate a cutter solution so its first blade point lands on (0, 1).

    Returns the rotated apex, rotated blade points and the rotation angle.
    """
    x1, y1 = values["x1"], values["y1"]
    theta = math.pi / 2 - math.atan2(y1, x1)
    c, s = math.cos(theta), math.sin(theta)

    def rot(x, y):
        return (c * x - s * y, s * x + c * y)

    apex = rot(values["x0"], 0.0)
    pts = [rot(values[f"x{i}"], values[f"y{i}"]) for i in (1, 2, 3)]
    return apex, pts, theta
