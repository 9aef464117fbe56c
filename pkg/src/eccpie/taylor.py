"""Truncated Taylor expansions of arccos.

Coefficients at a nonzero center come from the ODE ``(1 - x**2) g' = x g`` satisfied
by ``g = arccos'``; expanding around ``a`` in powers of ``t = x - a`` gives

    (1 - a**2) (k + 1) b[k+1] = a (2k + 1) b[k] + k b[k-1]

for the coefficients ``b`` of ``g``, and ``c[k+1] = b[k] / (k + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

MAX_TERMS = 16
DEFAULT_TERMS = 6


@dataclass(frozen=True)
class UniPoly:
    """``sum(coeffs[k] * (x - center)**k)``."""

    center: float
    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("UniPoly needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise ValueError("UniPoly coefficients must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "center", float(self.center))

    @property
    def degree(self) -> int:
        nz = [k for k, c in enumerate(self.coeffs) if c != 0.0]
        return nz[-1] if nz else 0

    def __call__(self, x):
        return eval_unipoly(self, x)


def eval_unipoly(p: UniPoly, x):
    t = x - p.center
    acc = p.coeffs[-1]
    for c in reversed(p.coeffs[:-1]):
        acc = acc * t + c
    if len(p.coeffs) == 1 and isinstance(x, (complex, np.ndarray)):
        return acc + 0 * t
    return acc


def _arccos_coeffs_at_zero(n_terms: int) -> list[float]:
    coeffs = [0.0] * n_terms
    coeffs[0] = math.pi / 2
    for n in range((n_terms - 1) // 2 + 1):
        k = 2 * n + 1
        if k < n_terms:
            coeffs[k] = -math.factorial(2 * n) / (4**n * math.factorial(n) ** 2 * (2 * n + 1))
    return coeffs


def arccos_taylor(center: float = 0.0, n_terms: int = DEFAULT_TERMS) -> UniPoly:
    """Taylor polynomial of arccos around ``center`` with ``n_terms`` coefficients."""
    if not abs(center) < 1.0:
        raise ValueError(f"arccos expansion center must satisfy |center| < 1, got {center!r}")
    if not 1 <= n_terms <= MAX_TERMS:
        raise ValueError(f"n_terms must be in [1, {MAX_TERMS}], got {n_terms}")
    if center == 0.0:
        return UniPoly(0.0, _arccos_coeffs_at_zero(n_terms))

    a = float(center)
    w = 1.0 - a * a
    b = [-1.0 / math.sqrt(w)]
    if n_terms > 2:
        b.append(a * b[0] / w)
    for k in range(1, n_terms - 2):
        b.append((a * (2 * k + 1) * b[k] + k * b[k - 1]) / (w * (k + 1)))
    coeffs = [math.acos(a)] + [b[k] / (k + 1) for k in range(n_terms - 1)]
    return UniPoly(a, coeffs)


def max_abs_error(p: UniPoly, lo: float, hi: float, samples: int = 10_000) -> float:
    """Largest deviation from arccos on a uniform grid over [lo, hi]."""
    if not -1.0 < lo <= hi < 1.0:
        raise ValueError(f"[{lo}, {hi}] is not inside (-1, 1)")
    xs = np.linspace(lo, hi, max(int(samples), 1) if hi > lo else 1)
    return float(np.max(np.abs(eval_unipoly(p, xs) - np.arccos(xs))))
