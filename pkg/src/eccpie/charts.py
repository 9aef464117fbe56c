"""Eccentric pie-chart layouts.

Given shares and an interior apex, the rays are found one at a time: each
sector's area grows strictly with the angle of its closing ray (the rate is
``ray_extent**2 / 2``), so every closing ray is the unique root of a monotone
scalar function and can be bracketed.
"""

from __future__ import annotations

import math
import warnings as _warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

from .geometry import (
    TWO_PI,
    EccentricSector,
    GeometryError,
    Orientation,
    Point2,
    boundary_point,
    ray_extent,
    sector_area_decomposed,
)

SHARE_SUM_TOL = 1e-9
RENORMALIZE_WINDOW = 1e-3
BOUNDARY_MARGIN = 1e-9
ILL_CONDITIONED_RADIUS = 0.95
DEMO_SHARES = (0.2, 0.3, 0.15, 0.25, 0.1)


class ChartError(ValueError):
    pass


@dataclass(frozen=True)
class ChartSpec:
    shares: tuple[float, ...]
    apex: Point2 = Point2(0.0, 0.0)
    start_point: Point2 = Point2(0.0, 1.0)
    orientation: Orientation = Orientation.COUNTERCLOCKWISE
    warnings: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        shares = tuple(float(s) for s in self.shares)
        notes = list(self.warnings)
        if not shares:
            raise ChartError("at least one share is required")
        if not all(math.isfinite(s) and s > 0 for s in shares):
            raise ChartError(f"shares must be positive, got {shares}")
        total = math.fsum(shares)
        if abs(total - 1.0) > SHARE_SUM_TOL:
            if abs(total - 1.0) > RENORMALIZE_WINDOW:
                raise ChartError(f"shares sum to {total:.6g}; they must sum to 1")
            shares = tuple(s / total for s in shares)
            notes.append(f"shares summed to {total!r} and were renormalized")
        apex = Point2(*map(float, self.apex))
        r = math.hypot(*apex)
        if not r < 1.0 - BOUNDARY_MARGIN:
            raise ChartError(f"apex {tuple(apex)} must lie strictly inside the unit circle")
        if r > ILL_CONDITIONED_RADIUS:
            notes.append(f"apex at radius {r:.4g} is close to the boundary; the layout is ill-conditioned")
        start = Point2(*map(float, self.start_point))
        if abs(math.hypot(*start) - 1.0) > 1e-9:
            raise ChartError(f"start point {tuple(start)} is not on the unit circle")
        object.__setattr__(self, "shares", shares)
        object.__setattr__(self, "apex", apex)
        object.__setattr__(self, "start_point", start)
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        object.__setattr__(self, "warnings", tuple(notes))


@dataclass(frozen=True)
class ChartLayout:
    apex: Point2
    ray_angles: tuple[float, ...]
    boundary_points: tuple[Point2, ...]
    sector_areas: tuple[float, ...]
    orientation: Orientation = Orientation.COUNTERCLOCKWISE
    spec: ChartSpec | None = None

    @property
    def shares(self) -> tuple[float, ...]:
        if self.spec is not None:
            return self.spec.shares
        return tuple(a / math.pi for a in self.sector_areas)

    def sector(self, i: int) -> EccentricSector:
        n = len(self.ray_angles)
        end = self.ray_angles[(i + 1) % n]
        if i == n - 1:
            end = self.ray_angles[0] + self.orientation.sign * TWO_PI
        return EccentricSector(self.apex, self.ray_angles[i], end, self.orientation)


def solve_sector_sweep(apex, phi_start: float, target: float, orientation=Orientation.COUNTERCLOCKWISE,
                       tol: float = 1e-12) -> float:
    """Sweep ``w`` such that the sector from ``phi_start`` turned by ``w`` has area ``target``."""
    orientation = Orientation(orientation)
    sign = orientation.sign
    if not 0.0 < target < math.pi:
        raise ChartError(f"target area {target!r} outside (0, pi)")

    def f(w):
        return sector_area_decomposed(EccentricSector(apex, phi_start, phi_start + sign * w, orientation)) - target

    lo, hi = 0.0, TWO_PI
    f_lo, f_hi = -target, math.pi - target
    # bisect until Newton is safe, then Newton safeguarded by the bracket
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        assert f_lo < 0.0 < f_hi, "sector area is not monotone in the sweep"
        if fm == 0.0:
            return mid
        if fm < 0.0:
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
    w = 0.5 * (lo + hi)
    for _ in range(60):
        fw = f(w)
        if abs(fw) < tol:
            return w
        if fw < 0.0:
            lo = w
        else:
            hi = w
        r = ray_extent(apex, phi_start + sign * w)
        w_new = w - fw / (0.5 * r * r)
        if not lo < w_new < hi:
            w_new = 0.5 * (lo + hi)
        if w_new == w:
            return w
        w = w_new
    raise ChartError(f"sector sweep did not converge (residual {fw:.3g})")


def solve_chart(spec: ChartSpec, tol: float = 1e-12) -> ChartLayout:
    apex, sign = spec.apex, spec.orientation.sign
    phi0 = math.atan2(spec.start_point.y - apex.y, spec.start_point.x - apex.x)
    angles = [phi0]
    points = [boundary_point(apex, phi0)]
    for share in spec.shares[:-1]:
        w = solve_sector_sweep(apex, angles[-1], share * math.pi, spec.orientation, tol)
        angles.append(angles[-1] + sign * w)
        points.append(boundary_point(apex, angles[-1]))
    if len(angles) > 1 and sign * (angles[-1] - angles[0]) >= TWO_PI:
        raise ChartError("rays wrapped past the start ray")
    layout = ChartLayout(apex, tuple(angles), tuple(points), (), spec.orientation, spec)
    areas = tuple(sector_area_decomposed(layout.sector(i)) for i in range(len(angles)))
    closure = abs(areas[-1] - spec.shares[-1] * math.pi)
    if closure > 10 * tol * max(1, len(angles)):
        raise RuntimeError(f"last sector misses its share by {closure:.3g}; layout solver bug")
    for w in spec.warnings:
        _warnings.warn(w, stacklevel=2)
    return replace(layout, sector_areas=areas)


def clockwise_counterpart(layout: ChartLayout) -> ChartLayout:
    """The layout for the same spec solved in the opposite orientation."""
    if layout.spec is None:
        raise ChartError("layout has no spec to re-solve")
    return solve_chart(replace(layout.spec, orientation=layout.orientation.reversed()))


def reflect_point(p, direction: float) -> Point2:
    """Mirror ``p`` across the diameter with angle ``direction``."""
    c, s = math.cos(2 * direction), math.sin(2 * direction)
    return Point2(c * p[0] + s * p[1], s * p[0] - c * p[1])


def reflect_layout(layout: ChartLayout) -> ChartLayout:
    """Mirror across the diameter through the first boundary point.

    Only reflections in a diameter keep the unit circle in place, so the apex
    moves to its mirror image and the orientation flips; the result is the
    opposite-orientation layout for the mirrored apex.
    """
    first = layout.boundary_points[0]
    axis = math.atan2(first.y, first.x)
    apex = reflect_point(layout.apex, axis)
    angles = tuple(2 * axis - a for a in layout.ray_angles)
    points = tuple(reflect_point(p, axis) for p in layout.boundary_points)
    spec = None
    if layout.spec is not None:
        spec = replace(layout.spec, apex=apex, orientation=layout.orientation.reversed(), warnings=())
    return ChartLayout(apex, angles, points, layout.sector_areas, layout.orientation.reversed(), spec)


def apex_grid(shares: Sequence[float] = DEMO_SHARES) -> list[list[ChartLayout]]:
    """3x3 grid with apex coordinates in {-1/2, 0, 1/2}; rows run top (y = 1/2) to bottom."""
    grid = []
    for y in (0.5, 0.0, -0.5):
        grid.append([solve_chart(ChartSpec(tuple(shares), Point2(x, y))) for x in (-0.5, 0.0, 0.5)])
    return grid


def layout_from_points(apex, points, areas=None, orientation=None) -> ChartLayout:
    """Wrap rays through given boundary points (for example a pie-cut solution) as a layout."""
    apex = Point2(*apex)
    pts = tuple(Point2(*p) for p in points)
    raw = [math.atan2(p.y - apex.y, p.x - apex.x) for p in pts]
    if orientation is None:
        ccw = sum((raw[(i + 1) % len(raw)] - raw[i]) % TWO_PI for i in range(len(raw)))
        orientation = Orientation.COUNTERCLOCKWISE if ccw < 1.5 * TWO_PI else Orientation.CLOCKWISE
    orientation = Orientation(orientation)
    sign = orientation.sign
    angles = [raw[0]]
    for a in raw[1:]:
        angles.append(angles[-1] + ((a - angles[-1]) * sign) % TWO_PI * sign)
    layout = ChartLayout(apex, tuple(angles), pts, (), orientation)
    if areas is None:
        try:
            areas = tuple(sector_area_decomposed(layout.sector(i)) for i in range(len(pts)))
        except GeometryError:
            areas = ()
    return replace(layout, sector_areas=tuple(areas))
