"""Deduplication, classification and filtering of polynomial-system roots."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from ..polysys import PolySystem
from .homotopy import PathResult, PathStatus, TrackerConfig, solve_total_degree_paths

DEDUP_TOL = 1e-6
REAL_TOL = 1e-8


class Classification(str, Enum):
    COMPLEX = "complex"
    REAL_REJECTED = "real_rejected"
    REAL_ACCEPTED = "real_accepted"


@dataclass
class Root:
    point: np.ndarray
    classification: Classification
    rejection_reasons: list[str] = field(default_factory=list)
    multiplicity: int = 1
    residual: float = 0.0

    @property
    def rejected(self) -> bool:
        return self.classification is not Classification.REAL_ACCEPTED


@dataclass
class RootSet:
    roots: list[Root]
    var_names: tuple[str, ...] = ()
    n_paths: int = 0
    path_status: dict[str, int] = field(default_factory=dict)
    bezout: int = 0
    warnings: list[str] = field(default_factory=list)

    def by_class(self, cls: Classification) -> list[Root]:
        return [r for r in self.roots if r.classification is cls]

    @property
    def accepted(self) -> list[Root]:
        return self.by_class(Classification.REAL_ACCEPTED)

    @property
    def real(self) -> list[Root]:
        return [r for r in self.roots if r.classification is not Classification.COMPLEX]

    def counts(self) -> dict[str, int]:
        c = Counter(r.classification.value for r in self.roots)
        return {k.value: c.get(k.value, 0) for k in Classification}


@dataclass(frozen=True)
class FilterTolerances:
    algebraic: float = 0.05
    geometric: float = 0.02
    imaginary: float = REAL_TOL


def _sort_key(p: np.ndarray):
    return tuple(np.round(p.real, 9)) + tuple(np.round(p.imag, 9))


def dedup_points(points, residuals=None, tol: float = DEDUP_TOL):
    """Cluster points closer than ``tol``; returns (representative, multiplicity, residual) triples.

    Points are sorted first so the outcome does not depend on input order.
    """
    pts = [np.asarray(p, dtype=complex) for p in points]
    res = list(residuals) if residuals is not None else [0.0] * len(pts)
    order = sorted(range(len(pts)), key=lambda k: _sort_key(pts[k]))
    clusters: list[list[int]] = []
    for k in order:
        for cl in clusters:
            if np.max(np.abs(pts[cl[0]] - pts[k])) < tol:
                cl.append(k)
                break
        else:
            clusters.append([k])
    out = []
    for cl in clusters:
        best = min(cl, key=lambda k: (res[k], _sort_key(pts[k])))
        out.append((pts[best], len(cl), res[best]))
    out.sort(key=lambda item: _sort_key(item[0]))
    return out


def rootset_from_paths(sys: PolySystem, paths: list[PathResult], imag_tol: float = REAL_TOL) -> RootSet:
    finite = [p for p in paths if p.status is PathStatus.CONVERGED]
    roots = []
    for point, mult, res in dedup_points([p.endpoint for p in finite], [p.final_residual for p in finite]):
        if np.max(np.abs(point.imag)) < imag_tol:
            roots.append(Root(point.real.astype(complex), Classification.REAL_ACCEPTED, [], mult, res))
        else:
            roots.append(Root(point, Classification.COMPLEX, ["not_real"], mult, res))
    status = Counter(p.status.value for p in paths)
    return RootSet(roots, sys.var_names, len(paths), {s.value: status.get(s.value, 0) for s in PathStatus},
                   sys.bezout_number, list(sys.warnings))


def total_degree_solve(sys: PolySystem, cfg: TrackerConfig | None = None, path_budget: int = 100_000) -> RootSet:
    """All isolated finite roots reached by the total-degree homotopy, deduplicated.

    Real roots come back provisionally accepted; :func:`filter_roots` applies
    the problem-specific checks.
    """
    paths = solve_total_degree_paths(sys, cfg, path_budget)
    return rootset_from_paths(sys, paths)


def rejection_tags(sys: PolySystem, v: np.ndarray, tol: FilterTolerances) -> list[str]:
    """Failing checks for a real point ``v``, in the order they are applied."""
    flt = sys.filters
    tags = []
    for name, bound, strict in flt.box:
        val = abs(v[sys.index(name)])
        if (val >= bound) if strict else (val > bound + 1e-12):
            tags.append(f"box_{name}")
    for name, check in flt.abs_checks:
        if not abs(check(v)) < tol.algebraic:
            tags.append(f"abs_{name}")
    for name, check in flt.sqrt_checks:
        if not abs(check(v)) < tol.algebraic:
            tags.append(f"sqrt_{name}")
    for ang, s in flt.sin_pairs:
        if not abs(v[sys.index(s)] - math.sin(v[sys.index(ang)])) < tol.algebraic:
            tags.append("sin_mismatch")
            break
    if flt.geometry is not None and "box_x0" not in tags:
        pairs = flt.geometry(v)
        if not all(abs(a - target) < tol.geometric for a, target in pairs):
            tags.append("area_mismatch")
    return tags


def filter_roots(sys: PolySystem, roots: RootSet, tolerances: FilterTolerances | None = None) -> RootSet:
    """Reject real roots that are artifacts of squaring or of the Taylor model."""
    tol = tolerances or FilterTolerances()
    out = []
    warnings = list(roots.warnings)
    for r in roots.roots:
        if np.max(np.abs(r.point.imag)) >= tol.imaginary:
            out.append(replace(r, classification=Classification.COMPLEX, rejection_reasons=["not_real"]))
            continue
        v = r.point.real.copy()
        tags = rejection_tags(sys, v, tol) if sys.filters is not None else []
        cls = Classification.REAL_REJECTED if tags else Classification.REAL_ACCEPTED
        out.append(replace(r, point=v.astype(complex), classification=cls, rejection_reasons=tags))
        if not tags and sys.filters is not None and sys.filters.taylor_window is not None:
            lo, hi = sys.filters.taylor_window
            for name, arg in sys.filters.cos_args:
                c = arg(v)
                if not lo <= c <= hi:
                    warnings.append(
                        f"accepted root has cos({name}) = {c:.4f} outside [{lo}, {hi}] where the "
                        f"Taylor series around 0 is accurate; consider recentering it (e.g. at 0.9)"
                    )
    return replace(roots, roots=out, warnings=warnings)
