"""Areas of triangles, circular segments and eccentric sectors of the unit circle.

An eccentric sector is the region swept by a ray turning around an interior
apex from direction ``phi_start`` to ``phi_end``; it is bounded by the two rays
and the arc of the unit circle between their boundary hits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple

from scipy import integrate

TWO_PI = 2.0 * math.pi
ON_CIRCLE_TOL = 1e-9


class GeometryError(ValueError):
    pass


class Point2(NamedTuple):
    x: float
    y: float

    def norm2(self) -> float:
        return self.x * self.x + self.y * self.y

    def dot(self, other: Point2) -> float:
        return self.x * other.x + self.y * other.y


class Orientation(str, Enum):
    COUNTERCLOCKWISE = "counterclockwise"
    CLOCKWISE = "clockwise"

    @property
    def sign(self) -> int:
        return 1 if self is Orientation.COUNTERCLOCKWISE else -1

    def reversed(self) -> Orientation:
        if self is Orientation.COUNTERCLOCKWISE:
            return Orientation.CLOCKWISE
        return Orientation.COUNTERCLOCKWISE


def sweep_angle(phi_start: float, phi_end: float, orientation: Orientation) -> float:
    """Angle turned from ``phi_start`` to ``phi_end`` in the given orientation.

    An unreduced difference in ``(0, 2*pi]`` is kept as is, so a full turn can be
    written as ``phi_end = phi_start + 2*pi``; anything else is reduced mod 2*pi.
    """
    d = (phi_end - phi_start) * Orientation(orientation).sign
    if 0.0 < d <= TWO_PI:
        return d
    return d % TWO_PI


@dataclass(frozen=True)
class EccentricSector:
    apex: Point2
    phi_start: float
    phi_end: float
    orientation: Orientation = Orientation.COUNTERCLOCKWISE

    def __post_init__(self):
        apex = Point2(*self.apex)
        object.__setattr__(self, "apex", apex)
        object.__setattr__(self, "orientation", Orientation(self.orientation))
        if not (math.isfinite(apex.x) and math.isfinite(apex.y)) or apex.norm2() >= 1.0:
            raise GeometryError(f"apex {tuple(apex)} is not strictly inside the unit circle")
        if self.sweep <= 1e-14:
            raise GeometryError("degenerate sector: zero sweep")

    @property
    def sweep(self) -> float:
        return sweep_angle(self.phi_start, self.phi_end, self.orientation)

    @property
    def is_full(self) -> bool:
        return abs(self.sweep - TWO_PI) < 1e-15


def signed_triangle_area(p1, p2, p3) -> float:
    """Half the determinant of the vertex matrix; positive for counterclockwise order."""
    (x1, y1), (x2, y2), (x0, y0) = p1, p2, p3
    return 0.5 * (x1 * y2 + x2 * y0 + x0 * y1 - x2 * y1 - x0 * y2 - x1 * y0)


def triangle_area(p1, p2, p3) -> float:
    return abs(signed_triangle_area(p1, p2, p3))


def _check_on_circle(p, name: str) -> None:
    r = math.hypot(p[0], p[1])
    if abs(r - 1.0) > ON_CIRCLE_TOL:
        raise GeometryError(f"{name} = {tuple(p)} is not on the unit circle (|{name}| = {r!r})")


def central_angle(a, b) -> float:
    """Angle at the origin between two boundary points, in [0, pi]."""
    _check_on_circle(a, "a")
    _check_on_circle(b, "b")
    c = a[0] * b[0] + a[1] * b[1]
    return math.acos(min(1.0, max(-1.0, c)))


def segment_area(beta: float) -> float:
    """Area between a chord and its arc, for central angle ``beta`` in (0, 2*pi)."""
    if not 0.0 < beta < TWO_PI:
        raise GeometryError(f"central angle {beta!r} outside (0, 2*pi)")
    return 0.5 * (beta - math.sin(beta))


def ray_extent(apex, phi: float) -> float:
    """Distance from an interior ``apex`` to the unit circle along direction ``phi``."""
    ax, ay = apex
    q = 1.0 - (ax * ax + ay * ay)
    if not q > 0.0:
        raise GeometryError(f"apex {tuple(apex)} is not strictly inside the unit circle")
    b = ax * math.cos(phi) + ay * math.sin(phi)
    disc = math.sqrt(b * b + q)
    # -b + disc cancels badly when b > 0; use the product of roots instead
    if b > 0.0:
        return q / (b + disc)
    return disc - b


def boundary_point(apex, phi: float) -> Point2:
    r = ray_extent(apex, phi)
    return Point2(apex[0] + r * math.cos(phi), apex[1] + r * math.sin(phi))


def sector_area_decomposed(s: EccentricSector) -> float:
    """Closed-form area: circular segment on chord AB plus the signed triangle (apex, A, B).

    The triangle is added when the apex lies on the far side of the chord from
    the arc and subtracted otherwise; the signed area makes that choice.
    """
    if s.is_full:
        return math.pi
    a = boundary_point(s.apex, s.phi_start)
    b = boundary_point(s.apex, s.phi_end)
    if s.orientation is Orientation.CLOCKWISE:
        a, b = b, a
    # arc runs counterclockwise from a to b; atan2 keeps full precision near 0 and pi
    beta = math.atan2(a.x * b.y - a.y * b.x, a.dot(b)) % TWO_PI
    tri = signed_triangle_area(s.apex, a, b)
    if beta == 0.0:
        # both rays hit the same boundary point
        return tri if s.sweep < math.pi else math.pi + tri
    return segment_area(beta) + tri


def sector_area_integral(s: EccentricSector, tol: float = 1e-11) -> float:
    """Independent check: area = 1/2 * integral of ray_extent(phi)**2 over the sweep."""
    sign = s.orientation.sign

    def integrand(t):
        r = ray_extent(s.apex, s.phi_start + sign * t)
        return 0.5 * r * r

    value, err = integrate.quad(integrand, 0.0, s.sweep, epsabs=tol * 0.1, epsrel=0.0, limit=200)
    if not err <= tol:
        raise GeometryError(f"quadrature did not converge: estimated error {err:.3g} > {tol:.3g}")
    return value


def pizza_check(apex, n_blades: int, alpha: float = 0.0) -> tuple[float, float]:
    """Alternating area sums for ``n_blades`` equiangular lines through ``apex``.

    The lines cut the disc into ``2 * n_blades`` sectors separated by pi/n_blades;
    sectors 0, 2, 4, ... go into the first sum and 1, 3, 5, ... into the second.
    """
    if n_blades < 4 or n_blades % 2:
        raise GeometryError(f"n_blades must be an even integer >= 4, got {n_blades}")
    apex = Point2(*apex)
    step = math.pi / n_blades
    sums = [0.0, 0.0]
    for k in range(2 * n_blades):
        sec = EccentricSector(apex, alpha + k * step, alpha + (k + 1) * step)
        sums[k % 2] += sector_area_decomposed(sec)
    return sums[0], sums[1]
