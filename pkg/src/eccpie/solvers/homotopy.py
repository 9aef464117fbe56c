"""Total-degree homotopy continuation.

Paths of ``H(x, t) = gamma * t * G(x) + (1 - t) * F(x)`` are followed from the
known roots of ``G`` at ``t = 1`` to ``t = 0`` with an Euler predictor and a
Newton corrector.  Many paths are advanced at once: every array below carries
one row per active path, each with its own ``t`` and step size.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Sequence

import numpy as np

from ..polysys import CompiledSystem, PolySystem


class PathStatus(str, Enum):
    CONVERGED = "converged"
    DIVERGED = "diverged"
    TRUNCATED = "truncated"
    SINGULAR = "singular"


class PathBudgetExceeded(RuntimeError):
    def __init__(self, bezout: int, budget: int):
        super().__init__(
            f"total-degree homotopy needs {bezout} paths, over the path budget of {budget}; "
            f"raise the budget explicitly to run it"
        )
        self.bezout = bezout
        self.budget = budget


@dataclass(frozen=True)
class TrackerConfig:
    initial_step: float = 0.05
    min_step: float = 1e-7
    max_step: float = 0.1
    corrector_tol: float = 1e-10
    corrector_max_iters: int = 3
    step_expand: float = 2.0
    step_contract: float = 0.5
    expand_after: int = 3
    endgame_start: float = 0.1
    max_path_steps: int = 10_000
    divergence_norm: float = 1e6
    seed: int = 0
    gamma: complex | None = None
    chunk_size: int = 4096

    def __post_init__(self):
        positive = [self.initial_step, self.min_step, self.max_step, self.corrector_tol,
                    self.corrector_max_iters, self.step_expand, self.step_contract,
                    self.endgame_start, self.max_path_steps, self.divergence_norm]
        if not all(v > 0 for v in positive):
            raise ValueError("tracker settings must all be positive")
        if not self.min_step < self.initial_step <= self.max_step:
            raise ValueError("need min_step < initial_step <= max_step")
        if not 0 < self.step_contract < 1 < self.step_expand:
            raise ValueError("need 0 < step_contract < 1 < step_expand")
        if self.gamma is not None and abs(abs(self.gamma) - 1.0) > 1e-12:
            raise ValueError("gamma must have unit modulus")

    @property
    def gamma_value(self) -> complex:
        if self.gamma is not None:
            return complex(self.gamma)
        angle = np.random.default_rng(self.seed).uniform(0.0, 2.0 * math.pi)
        return cmath.exp(1j * angle)


@dataclass
class PathResult:
    endpoint: np.ndarray
    status: PathStatus
    steps: int
    final_residual: float
    start: np.ndarray | None = None


class TotalDegreeStart:
    """Start system ``x_i**d_i - 1 = 0`` whose roots are products of roots of unity."""

    def __init__(self, degrees: Sequence[int]):
        self.degrees = np.array([int(d) for d in degrees])
        if np.any(self.degrees < 1):
            raise ValueError("start system degrees must be >= 1")
        self.n_vars = len(self.degrees)

    @property
    def n_roots(self) -> int:
        return math.prod(int(d) for d in self.degrees)

    def roots(self) -> Iterator[np.ndarray]:
        unity = [np.exp(2j * np.pi * np.arange(d) / d) for d in self.degrees]
        for combo in itertools.product(*unity):
            yield np.array(combo)

    def values_and_jacobians(self, X):
        X = np.atleast_2d(X)
        d = self.degrees
        pw = X ** (d - 1)
        G = pw * X - 1.0
        N, n = X.shape
        J = np.zeros((N, n, n), dtype=complex)
        J[:, np.arange(n), np.arange(n)] = d * pw
        return G, J


def _as_evaluator(system):
    if isinstance(system, PolySystem):
        return system.compiled
    return system


def _batch_solve(A, b):
    """Solve A[k] x[k] = b[k]; rows whose matrix is singular come back as NaN."""
    try:
        out = np.linalg.solve(A, b[..., None])[..., 0]
    except np.linalg.LinAlgError:
        out = np.full(b.shape, np.nan + 0j)
        for k in range(A.shape[0]):
            try:
                out[k] = np.linalg.solve(A[k], b[k])
            except np.linalg.LinAlgError:
                pass
    return out


def _rownorm(v):
    return np.max(np.abs(v), axis=-1)


def _polish(target, X, tol, iters=8):
    """Newton on F alone; returns polished points and max-norm residuals."""
    X = X.copy()
    F, J = target.values_and_jacobians(X)
    res = _rownorm(F)
    for _ in range(iters):
        todo = res >= tol * 1e-3
        if not np.any(todo):
            break
        dx = _batch_solve(J[todo], F[todo])
        ok = np.all(np.isfinite(dx), axis=1)
        cand = X[todo] - np.where(ok[:, None], dx, 0)
        Fc, Jc = target.values_and_jacobians(cand)
        rc = _rownorm(Fc)
        better = rc < res[todo]
        sel = np.flatnonzero(todo)[better]
        X[sel] = cand[better]
        F[sel] = Fc[better]
        J[sel] = Jc[better]
        res[sel] = rc[better]
        if not np.any(better):
            break
    return X, res


def track_paths(target, start, start_roots, cfg: TrackerConfig | None = None) -> list[PathResult]:
    """Track every row of ``start_roots`` from t = 1 to t = 0."""
    cfg = cfg or TrackerConfig()
    F_sys = _as_evaluator(target)
    G_sys = _as_evaluator(start)
    gamma = cfg.gamma_value
    X0 = np.array(start_roots, dtype=complex, ndmin=2)
    N, n = X0.shape

    x = X0.copy()
    t = np.ones(N)
    h = np.full(N, cfg.initial_step)
    steps = np.zeros(N, dtype=int)
    streak = np.zeros(N, dtype=int)
    status: list[PathStatus | None] = [None] * N
    active = np.ones(N, dtype=bool)

    def homotopy(xs, ts):
        F, JF = F_sys.values_and_jacobians(xs)
        G, JG = G_sys.values_and_jacobians(xs)
        a = (gamma * ts)[:, None]
        b = (1.0 - ts)[:, None]
        H = a * G + b * F
        Hx = a[..., None] * JG + b[..., None] * JF
        Ht = gamma * G - F
        return H, Hx, Ht

    while np.any(active):
        idx = np.flatnonzero(active)
        xa, ta, ha = x[idx], t[idx], h[idx]
        step = np.minimum(ha, ta)
        t_new = ta - step
        # in the endgame land exactly on t = 0 rather than leaving a sliver
        t_new = np.where(t_new < cfg.min_step * 1e-3, 0.0, t_new)
        step = ta - t_new

        _, Hx, Ht = homotopy(xa, ta)
        dxdt = -_batch_solve(Hx, Ht)
        xp = xa - step[:, None] * dxdt

        ok = np.all(np.isfinite(xp), axis=1)
        converged = np.zeros(len(idx), dtype=bool)
        xc = np.where(ok[:, None], xp, xa)
        for _ in range(cfg.corrector_max_iters):
            H, Hx, _ = homotopy(xc, t_new)
            dx = _batch_solve(Hx, H)
            ok &= np.all(np.isfinite(dx), axis=1)
            xc = xc - np.where(ok[:, None], dx, 0)
            converged = ok & (_rownorm(dx) <= cfg.corrector_tol * (1.0 + _rownorm(xc)))
            if np.all(converged | ~ok):
                break

        # accepted steps
        acc = idx[converged]
        x[acc] = xc[converged]
        t[acc] = t_new[converged]
        steps[acc] += 1
        streak[acc] += 1
        grow = acc[streak[acc] >= cfg.expand_after]
        h[grow] = np.minimum(h[grow] * cfg.step_expand, cfg.max_step)
        streak[grow] = 0

        # rejected steps
        rej = idx[~converged]
        h[rej] *= cfg.step_contract
        streak[rej] = 0

        for k in idx:
            norm = float(np.max(np.abs(x[k])))
            if not math.isfinite(norm) or norm > cfg.divergence_norm:
                status[k] = PathStatus.DIVERGED
            elif t[k] == 0.0:
                status[k] = PathStatus.CONVERGED  # provisional, decided by the polish below
            elif h[k] < cfg.min_step:
                status[k] = PathStatus.DIVERGED if t[k] < cfg.endgame_start and norm > 1e3 else PathStatus.TRUNCATED
            elif steps[k] >= cfg.max_path_steps:
                status[k] = PathStatus.TRUNCATED
            else:
                continue
            active[k] = False

    results = []
    landed = np.array([s is PathStatus.CONVERGED for s in status])
    res = np.full(N, np.inf)
    if np.any(landed):
        xpol, rpol = _polish(F_sys, x[landed], cfg.corrector_tol)
        x[landed] = xpol
        res[landed] = rpol
    others = ~landed & np.all(np.isfinite(x), axis=1)
    if np.any(others):
        res[others] = _rownorm(F_sys.values(x[others]))
    for k in range(N):
        st = status[k]
        if st is PathStatus.CONVERGED and not res[k] < cfg.corrector_tol:
            st = PathStatus.SINGULAR
        results.append(PathResult(x[k].copy(), st, int(steps[k]), float(res[k]), X0[k].copy()))
    return results


def track_path(target, start_system, start_root, cfg: TrackerConfig | None = None) -> PathResult:
    return track_paths(target, start_system, np.asarray(start_root)[None, :], cfg)[0]


def iter_chunks(it: Iterable, size: int) -> Iterator[list]:
    it = iter(it)
    while chunk := list(itertools.islice(it, size)):
        yield chunk


def solve_total_degree_paths(sys: PolySystem, cfg: TrackerConfig | None = None,
                             path_budget: int = 100_000) -> list[PathResult]:
    """Track all Bezout-many paths of the total-degree homotopy for ``sys``."""
    cfg = cfg or TrackerConfig()
    bezout = sys.bezout_number
    if bezout > path_budget:
        raise PathBudgetExceeded(bezout, path_budget)
    start = TotalDegreeStart(sys.degrees)
    results: list[PathResult] = []
    for chunk in iter_chunks(start.roots(), cfg.chunk_size):
        results.extend(track_paths(sys, start, np.array(chunk), cfg))
    return results
