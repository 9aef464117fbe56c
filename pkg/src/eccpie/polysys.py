"""Sparse multivariate polynomials and the pie-cutting polynomial systems.

A :class:`MultiPoly` maps exponent tuples to complex coefficients.  A
:class:`PolySystem` is a square list of them together with the exact
(trigonometric) residual it approximates and the metadata needed to weed out
false roots introduced by squaring and by the Taylor substitution.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .geometry import EccentricSector, Orientation, sector_area_decomposed
from .taylor import UniPoly, arccos_taylor

FORMAT_VERSION = 1
PIECUT_VARS = ("x0", "x1", "y1", "x2", "y2", "x3", "y3", "beta", "phi", "s_beta", "s_phi")
SINGLE_SECTOR_VARS = ("x2", "y2", "beta", "s_beta")
BLADE_COS = -0.5  # cos(2*pi/3)


class PolynomialError(ValueError):
    pass


class SystemParseError(PolynomialError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def _coerce_exps(exps: Iterable[int], n_vars: int) -> tuple[int, ...]:
    e = tuple(int(k) for k in exps)
    if len(e) != n_vars or any(k < 0 for k in e):
        raise PolynomialError(f"bad exponent vector {e} for {n_vars} variables")
    return e


class MultiPoly:
    """Sparse polynomial with complex coefficients in ``n_vars`` variables.

    Instances are treated as immutable; arithmetic returns new objects and
    drops zero coefficients.
    """

    def __init__(self, n_vars: int, terms: Mapping[Sequence[int], complex] | None = None):
        self.n_vars = int(n_vars)
        clean: dict[tuple[int, ...], complex] = {}
        for exps, c in (terms or {}).items():
            e = _coerce_exps(exps, self.n_vars)
            c = complex(c)
            if c != 0:
                clean[e] = clean.get(e, 0j) + c
                if clean[e] == 0:
                    del clean[e]
        self._terms = clean

    @classmethod
    def constant(cls, n_vars: int, c: complex) -> MultiPoly:
        return cls(n_vars, {(0,) * n_vars: c})

    @classmethod
    def variable(cls, n_vars: int, i: int) -> MultiPoly:
        e = [0] * n_vars
        e[i] = 1
        return cls(n_vars, {tuple(e): 1.0})

    @property
    def terms(self) -> dict[tuple[int, ...], complex]:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=0)

    def __repr__(self):
        return f"MultiPoly({self.n_vars}, {self._terms!r})"

    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            return self.n_vars == other.n_vars and self._terms == other._terms
        return NotImplemented

    __hash__ = None

    # arithmetic

    def _lift(self, other) -> MultiPoly:
        if isinstance(other, MultiPoly):
            if other.n_vars != self.n_vars:
                raise PolynomialError(f"variable count mismatch: {self.n_vars} vs {other.n_vars}")
            return other
        if isinstance(other, (int, float, complex, np.number)):
            return MultiPoly.constant(self.n_vars, other)
        raise TypeError(f"cannot combine MultiPoly with {type(other).__name__}")

    def __add__(self, other):
        other = self._lift(other)
        out = dict(self._terms)
        for e, c in other._terms.items():
            out[e] = out.get(e, 0j) + c
        return MultiPoly(self.n_vars, out)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.n_vars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def scale(self, k: complex) -> MultiPoly:
        return MultiPoly(self.n_vars, {e: c * k for e, c in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, np.number)):
            return self.scale(other)
        other = self._lift(other)
        out: dict[tuple[int, ...], complex] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0j) + c1 * c2
        return MultiPoly(self.n_vars, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, (int, np.integer)) or k < 0:
            raise PolynomialError(f"power must be a non-negative integer, got {k!r}")
        result = MultiPoly.constant(self.n_vars, 1.0)
        for _ in range(int(k)):
            result = result * self
        return result

    def diff(self, j: int) -> MultiPoly:
        out = {}
        for e, c in self._terms.items():
            if e[j]:
                d = list(e)
                d[j] -= 1
                out[tuple(d)] = c * e[j]
        return MultiPoly(self.n_vars, out)

    def compose_univariate(self, p: UniPoly) -> MultiPoly:
        """``p(self)``: Horner in ``self - p.center``."""
        t = self - p.center
        acc = MultiPoly.constant(self.n_vars, p.coeffs[-1])
        for c in reversed(p.coeffs[:-1]):
            acc = acc * t + c
        return acc

    # evaluation

    @cached_property
    def _arrays(self):
        if not self._terms:
            return np.zeros((0, self.n_vars), dtype=np.int64), np.zeros(0, dtype=complex)
        exps = np.array(sorted(self._terms), dtype=np.int64).reshape(-1, self.n_vars)
        coeffs = np.array([self._terms[tuple(e)] for e in exps.tolist()], dtype=complex)
        return exps, coeffs

    def __call__(self, point) -> complex:
        return eval_poly(self, point)


def eval_poly(p: MultiPoly, point) -> complex:
    x = np.asarray(point, dtype=complex)
    if x.shape != (p.n_vars,):
        raise PolynomialError(f"point has shape {x.shape}, expected ({p.n_vars},)")
    exps, coeffs = p._arrays
    if not len(coeffs):
        return 0j
    return complex(np.prod(x[None, :] ** exps, axis=1) @ coeffs)


class CompiledSystem:
    """Batched evaluation of a list of polynomials and their Jacobian.

    All monomials are gathered into one exponent table so that evaluating ``m``
    polynomials at ``N`` points is a power-table lookup plus one matmul.
    """

    def __init__(self, polys: Sequence[MultiPoly]):
        self.n_vars = polys[0].n_vars
        self.n_polys = len(polys)
        self._value = self._table(polys)
        self._partials = [self._table([p.diff(j) for p in polys]) for j in range(self.n_vars)]
        self.max_exp = max(
            (int(t[0].max()) if t[0].size else 0) for t in [self._value, *self._partials]
        )

    def _table(self, polys):
        # sorted, so equal polynomials always sum their terms in the same order
        index = {e: k for k, e in enumerate(sorted({e for p in polys for e in p._terms}))}
        exps = np.zeros((len(index), self.n_vars), dtype=np.int64)
        for e, k in index.items():
            exps[k] = e
        coef = np.zeros((len(polys), len(index)), dtype=complex)
        for i, p in enumerate(polys):
            for e, c in p._terms.items():
                coef[i, index[e]] = c
        return exps, coef.T.copy()

    def _powers(self, X):
        pw = np.empty(X.shape + (self.max_exp + 1,), dtype=complex)
        pw[..., 0] = 1.0
        for k in range(1, self.max_exp + 1):
            pw[..., k] = pw[..., k - 1] * X
        return pw

    @staticmethod
    def _apply(pw, table):
        exps, coef = table
        if not len(exps):
            return np.zeros((pw.shape[0], coef.shape[1]), dtype=complex)
        mono = pw[:, 0, exps[:, 0]]
        for v in range(1, exps.shape[1]):
            mono = mono * pw[:, v, exps[:, v]]
        return mono @ coef

    def values(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        return self._apply(self._powers(X), self._value)

    def values_and_jacobians(self, X):
        """Return ``F`` of shape (N, m) and ``J`` of shape (N, m, n)."""
        X = np.atleast_2d(np.asarray(X, dtype=complex))
        pw = self._powers(X)
        F = self._apply(pw, self._value)
        J = np.stack([self._apply(pw, t) for t in self._partials], axis=2)
        return F, J


@dataclass(frozen=True)
class RootFilters:
    """How to tell true roots of the original problem from artifacts of the polynomial model.

    Every callable takes a real point (1-D array over the system's variables).
    ``abs_checks`` return ``lhs - |rhs|`` of an equation whose absolute value was
    removed by squaring; ``sqrt_checks`` return ``lhs - c*sqrt(rhs)`` for an
    equation whose square root was removed.  ``geometry`` returns pairs of
    (reconstructed area, target area).  ``cos_args`` return the argument fed to
    the Taylor polynomial, used for the validity-window warning.
    """

    box: tuple[tuple[str, float, bool], ...] = ()
    abs_checks: tuple[tuple[str, Callable], ...] = ()
    sqrt_checks: tuple[tuple[str, Callable], ...] = ()
    sin_pairs: tuple[tuple[str, str], ...] = ()
    geometry: Callable | None = None
    cos_args: tuple[tuple[str, Callable], ...] = ()
    taylor_window: tuple[float, float] | None = None
    squared_abs: tuple[str, ...] = ()
    squared_sqrt: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class PolySystem:
    var_names: tuple[str, ...]
    polys: tuple[MultiPoly, ...]
    exact_residual: Callable[[np.ndarray], np.ndarray] | None = None
    filters: RootFilters | None = None
    eq_names: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()
    source: str | None = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "var_names", tuple(self.var_names))
        object.__setattr__(self, "polys", tuple(self.polys))
        n = len(self.var_names)
        if len(self.polys) != n:
            raise PolynomialError(f"system is not square: {len(self.polys)} equations, {n} variables")
        if any(p.n_vars != n for p in self.polys):
            raise PolynomialError("polynomial variable counts do not match var_names")
        used = set()
        for p in self.polys:
            for e in p._terms:
                used.update(i for i, k in enumerate(e) if k)
        missing = [self.var_names[i] for i in range(n) if i not in used]
        if missing:
            raise PolynomialError(f"variables not used by any equation: {missing}")
        if not self.eq_names:
            object.__setattr__(self, "eq_names", tuple(f"f{i}" for i in range(n)))

    @property
    def n_vars(self) -> int:
        return len(self.var_names)

    def index(self, name: str) -> int:
        return self.var_names.index(name)

    @property
    def degrees(self) -> list[int]:
        return [p.total_degree for p in self.polys]

    @property
    def bezout_number(self) -> int:
        return math.prod(self.degrees)

    @cached_property
    def compiled(self) -> CompiledSystem:
        return CompiledSystem(self.polys)

    def evaluate(self, point) -> np.ndarray:
        return self.compiled.values(point)[0]

    def jacobian(self, point) -> np.ndarray:
        return self.compiled.values_and_jacobians(point)[1][0]

    def with_polys(self, polys) -> PolySystem:
        return PolySystem(self.var_names, polys, self.exact_residual, self.filters,
                          self.eq_names, self.warnings, self.source, dict(self.meta))


def jacobian(sys: PolySystem, point) -> np.ndarray:
    return sys.jacobian(point)


def max_sector_fraction() -> float:
    """Largest share one sector of a regular 3-blade cutter can take.

    Supremum reached with the apex on the rim: everything except two circular
    segments of central angle pi/3.
    """
    return 1.0 - (2.0 / math.pi) * (math.pi / 6.0 - math.sqrt(3.0) / 4.0)


def feasibility_warnings(shares: Sequence[float]) -> list[str]:
    bound = max_sector_fraction()
    worst = max(shares)
    if worst > bound:
        return [
            f"share {worst:g} exceeds the largest attainable sector fraction "
            f"{bound:.6f} = 1 - (2/pi)(pi/6 - sqrt(3)/4) of a regular 3-blade cutter"
        ]
    return []


def _check_share(name: str, value: float) -> None:
    if not 0.0 < value < 1.0:
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {value!r}")


def _taylor_source(taylor: UniPoly) -> str:
    return f"taylor_center={taylor.center!r} taylor_coeffs={','.join(repr(c) for c in taylor.coeffs)}"


def build_piecut_system(lambda1: float, lambda2: float, taylor: UniPoly | None = None) -> PolySystem:
    """Eleven-variable system for a regular 3-blade cutter centered at (x0, 0).

    Unknowns, in order: x0, x1, y1, x2, y2, x3, y3, beta, phi, s_beta, s_phi.
    Sector 1 lies between blade points 1 and 2 (central angle beta, area
    lambda1*pi), sector 2 between blade points 2 and 3 (angle phi, lambda2*pi).
    """
    _check_share("lambda1", lambda1)
    _check_share("lambda2", lambda2)
    _check_share("lambda3", 1.0 - lambda1 - lambda2)
    taylor = taylor or arccos_taylor(0.0)
    n = len(PIECUT_VARS)
    x0, x1, y1, x2, y2, x3, y3, beta, phi, sb, sp = (MultiPoly.variable(n, i) for i in range(n))
    two_pi_l1 = 2.0 * math.pi * lambda1
    two_pi_l2 = 2.0 * math.pi * lambda2

    dot12 = x1 * x2 + y1 * y2
    dot23 = x2 * x3 + y2 * y3
    # twice the signed triangle (apex, P_i, P_j) with y0 = 0
    det1 = x0 * (y1 - y2) + x1 * y2 - x2 * y1
    det2 = x0 * (y2 - y3) + x2 * y3 - x3 * y2
    blade12 = (x1 - x0) * (x2 - x0) + y1 * y2
    blade23 = (x2 - x0) * (x3 - x0) + y2 * y3
    len1 = (x1 - x0) ** 2 + y1 ** 2
    len2 = (x2 - x0) ** 2 + y2 ** 2
    len3 = (x3 - x0) ** 2 + y3 ** 2

    polys = [
        x1 ** 2 + y1 ** 2 - 1,
        x2 ** 2 + y2 ** 2 - 1,
        x3 ** 2 + y3 ** 2 - 1,
        dot12 ** 2 + sb ** 2 - 1,
        dot23 ** 2 + sp ** 2 - 1,
        (two_pi_l1 - beta + sb) ** 2 - det1 ** 2,
        (two_pi_l2 - phi + sp) ** 2 - det2 ** 2,
        # 120 degrees between consecutive blades, squared to drop the square root
        blade12 ** 2 - (BLADE_COS ** 2) * len1 * len2,
        blade23 ** 2 - (BLADE_COS ** 2) * len2 * len3,
        beta - dot12.compose_univariate(taylor),
        phi - dot23.compose_univariate(taylor),
    ]
    eq_names = ("circle1", "circle2", "circle3", "sin_beta", "sin_phi", "area1", "area2",
                "angle12", "angle23", "taylor_beta", "taylor_phi")

    def _det1(v):
        return v[0] * (v[2] - v[4]) + v[1] * v[4] - v[3] * v[2]

    def _det2(v):
        return v[0] * (v[4] - v[6]) + v[3] * v[6] - v[5] * v[4]

    def _blade(v, i, j):
        xi, yi, xj, yj = v[i], v[i + 1], v[j], v[j + 1]
        dot = (xi - v[0]) * (xj - v[0]) + yi * yj
        norms = math.sqrt(max(((xi - v[0]) ** 2 + yi ** 2) * ((xj - v[0]) ** 2 + yj ** 2), 0.0))
        return dot - BLADE_COS * norms

    def exact_residual(v):
        v = np.asarray(v, dtype=float)
        X0, X1, Y1, X2, Y2, X3, Y3, B, P, SB, SP = v
        return np.array([
            X1 * X1 + Y1 * Y1 - 1,
            X2 * X2 + Y2 * Y2 - 1,
            X3 * X3 + Y3 * Y3 - 1,
            SB - math.sin(B),
            SP - math.sin(P),
            two_pi_l1 - B + SB - abs(_det1(v)),
            two_pi_l2 - P + SP - abs(_det2(v)),
            _blade(v, 1, 3),
            _blade(v, 3, 5),
            X1 * X2 + Y1 * Y2 - math.cos(B),
            X2 * X3 + Y2 * Y3 - math.cos(P),
        ])

    targets = (lambda1 * math.pi, lambda2 * math.pi, (1.0 - lambda1 - lambda2) * math.pi)

    def geometry(v):
        apex = (v[0], 0.0)
        return list(zip(piecut_sector_areas(apex, v[1:7]), targets))

    filters = RootFilters(
        box=(("x0", 1.0, True), ("s_beta", 1.0, False), ("s_phi", 1.0, False)),
        abs_checks=(
            ("area1", lambda v: two_pi_l1 - v[7] + v[9] - abs(_det1(v))),
            ("area2", lambda v: two_pi_l2 - v[8] + v[10] - abs(_det2(v))),
        ),
        sqrt_checks=(("angle12", lambda v: _blade(v, 1, 3)), ("angle23", lambda v: _blade(v, 3, 5))),
        sin_pairs=(("beta", "s_beta"), ("phi", "s_phi")),
        geometry=geometry,
        cos_args=(("beta", lambda v: v[1] * v[3] + v[2] * v[4]),
                  ("phi", lambda v: v[3] * v[5] + v[4] * v[6])),
        taylor_window=(-0.8, 0.8) if taylor.center == 0.0 else None,
        squared_abs=("area1", "area2"),
        squared_sqrt=("angle12", "angle23"),
    )
    warnings = feasibility_warnings([lambda1, lambda2, 1.0 - lambda1 - lambda2])
    source = f"piecut lambda1={lambda1!r} lambda2={lambda2!r} {_taylor_source(taylor)}"
    return PolySystem(PIECUT_VARS, polys, exact_residual, filters, eq_names, tuple(warnings),
                      source, {"lambdas": (lambda1, lambda2, 1.0 - lambda1 - lambda2)})


def piecut_sector_areas(apex, blade_points) -> list[float]:
    """Areas of the three sectors cut by rays from ``apex`` through three boundary points.

    ``blade_points`` is the flat sequence x1, y1, x2, y2, x3, y3.  The rays are
    taken in the order 1 -> 2 -> 3 -> 1 and the orientation is whichever makes
    that a single turn around the apex.
    """
    pts = [(blade_points[2 * i], blade_points[2 * i + 1]) for i in range(3)]
    angles = [math.atan2(py - apex[1], px - apex[0]) for px, py in pts]
    ccw_turn = sum((angles[(i + 1) % 3] - angles[i]) % (2 * math.pi) for i in range(3))
    orient = Orientation.COUNTERCLOCKWISE if ccw_turn < 3 * math.pi else Orientation.CLOCKWISE
    areas = []
    for i in range(3):
        try:
            sec = EccentricSector(apex, angles[i], angles[(i + 1) % 3], orient)
            areas.append(sector_area_decomposed(sec))
        except ValueError:
            areas.append(float("nan"))
    return areas


def build_single_sector_system(lam: float, apex=0.0, taylor: UniPoly | None = None,
                               first_point=(0.0, 1.0)) -> PolySystem:
    """Four-variable system for one sector of area ``lam * pi``.

    The sector starts at the fixed boundary point ``first_point`` (default (0, 1))
    and ends at the unknown (x2, y2); unknowns are x2, y2, beta, s_beta.
    ``apex`` is either the x coordinate of an apex on the x axis or a point.
    """
    _check_share("lambda", lam)
    ax, ay = (float(apex), 0.0) if np.isscalar(apex) else (float(apex[0]), float(apex[1]))
    if ax * ax + ay * ay >= 1.0:
        raise ValueError(f"apex ({ax}, {ay}) is not strictly inside the unit circle")
    px, py = float(first_point[0]), float(first_point[1])
    if abs(math.hypot(px, py) - 1.0) > 1e-9:
        raise ValueError(f"first point ({px}, {py}) is not on the unit circle")
    taylor = taylor or arccos_taylor(0.0)
    n = len(SINGLE_SECTOR_VARS)
    x2, y2, beta, sb = (MultiPoly.variable(n, i) for i in range(n))
    two_pi_l = 2.0 * math.pi * lam
    dot = px * x2 + py * y2
    det = ax * (py - y2) + px * (y2 - ay) + x2 * (ay - py)
    polys = [
        x2 ** 2 + y2 ** 2 - 1,
        dot ** 2 + sb ** 2 - 1,
        (two_pi_l - beta + sb) ** 2 - det ** 2,
        beta - dot.compose_univariate(taylor),
    ]

    def _det(v):
        return ax * (py - v[1]) + px * (v[1] - ay) + v[0] * (ay - py)

    def exact_residual(v):
        X2, Y2, B, SB = np.asarray(v, dtype=float)
        return np.array([
            X2 * X2 + Y2 * Y2 - 1,
            SB - math.sin(B),
            two_pi_l - B + SB - abs(_det(v)),
            px * X2 + py * Y2 - math.cos(B),
        ])

    def geometry(v):
        orient = Orientation.COUNTERCLOCKWISE if _det(v) >= 0 else Orientation.CLOCKWISE
        try:
            sec = EccentricSector((ax, ay), math.atan2(py - ay, px - ax),
                                  math.atan2(v[1] - ay, v[0] - ax), orient)
            area = sector_area_decomposed(sec)
        except ValueError:
            area = float("nan")
        return [(area, lam * math.pi)]

    filters = RootFilters(
        box=(("s_beta", 1.0, False),),
        abs_checks=(("area", lambda v: two_pi_l - v[2] + v[3] - abs(_det(v))),),
        sin_pairs=(("beta", "s_beta"),),
        geometry=geometry,
        cos_args=(("beta", lambda v: px * v[0] + py * v[1]),),
        taylor_window=(-0.8, 0.8) if taylor.center == 0.0 else None,
        squared_abs=("area",),
    )
    source = (f"single_sector lambda={lam!r} apex={ax!r},{ay!r} first_point={px!r},{py!r} "
              f"{_taylor_source(taylor)}")
    return PolySystem(SINGLE_SECTOR_VARS, polys, exact_residual, filters,
                      ("circle2", "sin_beta", "area", "taylor_beta"), (), source,
                      {"lambda": lam, "apex": (ax, ay), "first_point": (px, py)})


# text format


def _fmt(x: float) -> str:
    return repr(float(x))


def export_system(sys: PolySystem) -> str:
    lines = [f"# format {FORMAT_VERSION}"]
    if sys.source:
        lines.append(f"# source: {sys.source}")
    lines.append(f"vars: {sys.n_vars} {' '.join(sys.var_names)}")
    for k, p in enumerate(sys.polys):
        if k:
            lines.append("")
        lines.append(f"# {sys.eq_names[k]}")
        terms = sorted(p._terms.items(), key=lambda t: (-sum(t[0]), tuple(-e for e in t[0])))
        if not terms:
            terms = [((0,) * sys.n_vars, 0j)]
        for e, c in terms:
            lines.append(" ".join([_fmt(c.real), _fmt(c.imag), *map(str, e)]))
    return "\n".join(lines) + "\n"


_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def parse_system(text: str) -> PolySystem:
    """Inverse of :func:`export_system`; the result has no exact residual or filters."""
    var_names: list[str] | None = None
    blocks: list[dict] = []
    eq_names: list[str] = []
    current: dict | None = None
    pending_name: str | None = None
    source = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("format"):
                parts = body.split()
                if len(parts) != 2 or parts[1] != str(FORMAT_VERSION):
                    raise SystemParseError(lineno, f"unsupported format header {body!r}, expected 'format {FORMAT_VERSION}'")
            elif body.startswith("source:"):
                source = body[len("source:"):].strip()
            elif var_names is not None and body:
                pending_name = body
            continue
        if var_names is None:
            if not line:
                continue
            parts = line.split()
            if parts[0] != "vars:":
                raise SystemParseError(lineno, f"expected 'vars:' header, got {parts[0]!r}")
            try:
                n = int(parts[1])
            except (IndexError, ValueError):
                raise SystemParseError(lineno, "expected variable count after 'vars:'") from None
            names = parts[2:]
            if len(names) != n:
                raise SystemParseError(lineno, f"expected {n} variable names, got {len(names)}")
            bad = [s for s in names if not _NAME.match(s)]
            if bad or len(set(names)) != n:
                raise SystemParseError(lineno, f"invalid or duplicate variable names {names}")
            var_names = names
            continue
        if not line:
            current = None
            continue
        if current is None:
            current = {}
            blocks.append(current)
            eq_names.append(pending_name or f"f{len(blocks) - 1}")
            pending_name = None
        parts = line.split()
        n = len(var_names)
        if len(parts) != n + 2:
            raise SystemParseError(lineno, f"expected 2 coefficients and {n} exponents, got {len(parts)} tokens")
        try:
            c = complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise SystemParseError(lineno, "expected real and imaginary coefficient as decimals") from None
        try:
            e = tuple(int(t) for t in parts[2:])
        except ValueError:
            raise SystemParseError(lineno, "expected integer exponents") from None
        if any(k < 0 for k in e):
            raise SystemParseError(lineno, "expected non-negative exponents")
        if e in current:
            raise SystemParseError(lineno, f"duplicate exponent vector {e}")
        current[e] = c
    if var_names is None:
        raise SystemParseError(len(text.splitlines()) + 1, "expected 'vars:' header")
    polys = [MultiPoly(len(var_names), b) for b in blocks]
    try:
        return PolySystem(var_names, polys, eq_names=tuple(eq_names), source=source)
    except PolynomialError as exc:
        raise SystemParseError(len(text.splitlines()), str(exc)) from None


def rebuild_from_source(source: str) -> PolySystem:
    """Rebuild a system (with exact residual and filters) from its ``# source:`` line."""
    kind, *pairs = source.split()
    kv = dict(p.split("=", 1) for p in pairs)
    taylor = UniPoly(float(kv["taylor_center"]), [float(c) for c in kv["taylor_coeffs"].split(",")])
    if kind == "piecut":
        return build_piecut_system(float(kv["lambda1"]), float(kv["lambda2"]), taylor)
    if kind == "single_sector":
        apex = [float(t) for t in kv["apex"].split(",")]
        first = [float(t) for t in kv["first_point"].split(",")]
        return build_single_sector_system(float(kv["lambda"]), apex, taylor, first)
    raise ValueError(f"unknown system kind {kind!r}")
