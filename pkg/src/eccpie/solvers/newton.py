"""Damped multivariate Newton iteration."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


class NewtonError(RuntimeError):
    def __init__(self, message: str, x=None, residual: float = np.inf, iterations: int = 0):
        super().__init__(message)
        self.x = x
        self.residual = residual
        self.iterations = iterations


class SingularJacobianError(NewtonError):
    pass


@dataclass
class NewtonResult:
    x: np.ndarray
    residual: float
    iterations: int
    history: list[float] = field(default_factory=list)


def fd_jacobian(fun: Callable, x: np.ndarray, f0: np.ndarray | None = None, rel_step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian."""
    x = np.asarray(x)
    cols = []
    for j in range(x.size):
        h = rel_step * max(1.0, abs(x[j]))
        xp = x.copy()
        xm = x.copy()
        xp[j] += h
        xm[j] -= h
        cols.append((np.asarray(fun(xp)) - np.asarray(fun(xm))) / (2 * h))
    return np.stack(cols, axis=-1)


def _norm(f) -> float:
    f = np.asarray(f)
    if not np.all(np.isfinite(f)):
        return np.inf
    return float(np.max(np.abs(f))) if f.size else 0.0


def _safe_eval(fun, x):
    try:
        return np.asarray(fun(x))
    except (ValueError, ArithmeticError):
        return np.full(np.shape(x), np.nan)


def newton(
    fun: Callable,
    x0,
    jac: Callable | None = None,
    tol: float = 1e-12,
    max_iters: int = 50,
    max_halvings: int = 8,
    cond_limit: float = 1e14,
    singular: str = "raise",
) -> NewtonResult:
    """Solve ``fun(x) = 0`` from ``x0``.

    A full step that does not decrease ``max|fun|`` is halved up to
    ``max_halvings`` times.  Without ``jac`` a central-difference Jacobian is
    used.  ``singular="lstsq"`` takes minimum-norm steps instead of raising when
    the Jacobian is rank deficient (solution manifolds).
    """
    x = np.array(x0, dtype=complex if np.iscomplexobj(x0) else float)
    f = _safe_eval(fun, x)
    r = _norm(f)
    if not np.isfinite(r):
        raise NewtonError("residual is not finite at the starting point", x, r, 0)
    history = [r]
    best_x, best_r = x.copy(), r
    for it in range(max_iters):
        if r < tol:
            return NewtonResult(x, r, it, history)
        J = np.asarray(jac(x)) if jac is not None else fd_jacobian(fun, x, f)
        J = J.reshape(f.size, x.size)
        cond = np.linalg.cond(J)
        if not np.isfinite(cond) or cond > cond_limit:
            if singular != "lstsq":
                raise SingularJacobianError(
                    f"Jacobian is singular (condition number {cond:.3g})", best_x, best_r, it
                )
            dx = np.linalg.lstsq(J, f, rcond=None)[0]
        else:
            dx = np.linalg.solve(J, f)
        lam = 1.0
        cand_x, cand_f, cand_r = None, None, np.inf
        for _ in range(max_halvings + 1):
            trial = x - lam * dx
            ft = _safe_eval(fun, trial)
            rt = _norm(ft)
            if rt < cand_r:
                cand_x, cand_f, cand_r = trial, ft, rt
            if rt < r:
                break
            lam *= 0.5
        if cand_x is None:
            raise NewtonError("every damped step left the domain", best_x, best_r, it + 1)
        x, f, r = cand_x, cand_f, cand_r
        history.append(r)
        if r < best_r:
            best_x, best_r = x.copy(), r
    if r < tol:
        return NewtonResult(x, r, max_iters, history)
    raise NewtonError(
        f"no convergence in {max_iters} iterations (best residual {best_r:.3g})", best_x, best_r, max_iters
    )
