"""Box-constrained quasi-Newton minimization.

A projected BFGS method in the style of Bertsekas' projected Newton: variables
sitting on a bound with the gradient pushing outward are held fixed, the rest
take a quasi-Newton step from the reduced Hessian approximation, and an Armijo
backtracking search runs along the projection arc. Equality constraints enter
as a quadratic penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

CONVERGED = "converged"
MAX_ITER = "max_iter"
NUMERICAL_FAILURE = "numerical_failure"

_ARMIJO = 1e-4
_MAX_BACKTRACK = 60


@dataclass(frozen=True)
class MinimizeSettings:
    gradient_tolerance: float = 1e-10
    step_tolerance: float = 1e-12
    max_iterations: int = 200
    objective_target: float = 0.0
    penalty_weight: float = 1e3
    finite_difference_step: float = 1e-7

    def __post_init__(self):
        if self.gradient_tolerance <= 0 or self.step_tolerance <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    nit: int
    status: str
    nfev: int = 0
    constraint_violation: float = 0.0
    message: str = ""


def finite_difference_gradient(fun: Callable, x: np.ndarray, step: float = 1e-7) -> np.ndarray:
    """Central differences with a per-variable step ``step * max(1, |x_i|)``."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        h = step * max(1.0, abs(x[i]))
        xp = x.copy()
        xm = x.copy()
        xp[i] += h
        xm[i] -= h
        g[i] = (fun(xp) - fun(xm)) / (xp[i] - xm[i])
    return g


def constrained_minimize(
    fun: Callable[[np.ndarray], float],
    x0,
    bounds,
    grad: Callable[[np.ndarray], np.ndarray] | None = None,
    equality: Callable[[np.ndarray], np.ndarray] | None = None,
    equality_jac: Callable[[np.ndarray], np.ndarray] | None = None,
    settings: MinimizeSettings | None = None,
    hess0: np.ndarray | None = None,
) -> MinimizeResult:
    """Minimize ``fun`` subject to ``lower <= x <= upper``.

    ``bounds`` is a pair of arrays (infinite entries allowed). ``equality``
    returns a vector that should vanish; it is folded in as
    ``penalty_weight * ||h(x)||^2`` and its final norm is reported as
    ``constraint_violation``. Missing derivatives fall back to central
    differences. ``hess0`` optionally seeds the (positive definite) Hessian
    estimate; otherwise the identity is used and rescaled after the first step.

    Stops on any of: projected-gradient norm below ``gradient_tolerance``,
    step below ``step_tolerance``, objective at or below ``objective_target``.
    """
    s = settings or MinimizeSettings()
    lo, hi = (np.asarray(b, dtype=float) for b in bounds)
    x = np.clip(np.asarray(x0, dtype=float).copy(), lo, hi)
    n = x.size
    nfev = 0

    if equality is not None:
        w = s.penalty_weight

        def total(z):
            h = np.atleast_1d(equality(z))
            return fun(z) + w * float(h @ h)
    else:
        total = fun

    def gradient(z):
        if grad is None and equality is None:
            return finite_difference_gradient(total, z, s.finite_difference_step)
        g = (np.asarray(grad(z), dtype=float) if grad is not None
             else finite_difference_gradient(fun, z, s.finite_difference_step))
        if equality is not None:
            h = np.atleast_1d(equality(z))
            if equality_jac is not None:
                A = np.atleast_2d(equality_jac(z))
            else:
                A = np.array([finite_difference_gradient(lambda v, k=k: np.atleast_1d(equality(v))[k],
                                                         z, s.finite_difference_step)
                              for k in range(h.size)])
            g = g + 2.0 * w * (A.T @ h)
        return g

    def violation(z):
        if equality is None:
            return 0.0
        return float(np.linalg.norm(np.atleast_1d(equality(z))))

    def result(status, nit, msg=""):
        return MinimizeResult(x, float(f), nit, status, nfev, violation(x), msg)

    f = float(total(x))
    nfev += 1
    if not np.isfinite(f):
        return result(NUMERICAL_FAILURE, 0, "objective not finite at x0")
    if f <= s.objective_target:
        return result(CONVERGED, 0, "objective target reached")
    g = gradient(x)
    if not np.all(np.isfinite(g)):
        return result(NUMERICAL_FAILURE, 0, "gradient not finite at x0")

    B = np.eye(n) if hess0 is None else np.array(hess0, dtype=float)
    scaled = hess0 is not None

    def clip(z):
        return np.minimum(np.maximum(z, lo), hi)

    def norm(z):
        return math.sqrt(float(z @ z))

    for k in range(1, s.max_iterations + 1):
        pg = x - clip(x - g)
        pg_norm = norm(pg)
        if pg_norm <= s.gradient_tolerance:
            return result(CONVERGED, k - 1, "projected gradient below tolerance")

        eps = min(1e-8, pg_norm)
        active = ((x <= lo + eps) & (g > 0)) | ((x >= hi - eps) & (g < 0))
        free = ~active
        d = np.zeros(n)
        try:
            if free.all():
                d = -np.linalg.solve(B, g)
            elif free.any():
                d[free] = -np.linalg.solve(B[np.ix_(free, free)], g[free])
        except np.linalg.LinAlgError:
            d = np.zeros(n)
        if not g @ d < 0:
            B = np.eye(n)
            scaled = False
            d = np.where(free, -g, 0.0)

        alpha = 1.0
        if not scaled:
            alpha = min(1.0, 1.0 / max(norm(d), 1e-300))
        for _ in range(_MAX_BACKTRACK):
            x_new = clip(x + alpha * d)
            f_new = float(total(x_new))
            nfev += 1
            if np.isfinite(f_new) and f_new <= f + _ARMIJO * float(g @ (x_new - x)):
                break
            alpha *= 0.5
        else:
            return result(CONVERGED if pg_norm <= np.sqrt(s.gradient_tolerance) else MAX_ITER,
                          k, "line search could not make progress")

        step = x_new - x
        x, f = x_new, f_new
        if f <= s.objective_target:
            return result(CONVERGED, k, "objective target reached")
        g_new = gradient(x)
        if not np.all(np.isfinite(g_new)):
            return result(NUMERICAL_FAILURE, k, "gradient not finite")
        if norm(step) <= s.step_tolerance:
            g = g_new
            return result(CONVERGED, k, "step below tolerance")

        y = g_new - g
        g = g_new
        sy = float(step @ y)
        if sy > 1e-12 * norm(step) * norm(y):
            if not scaled:
                B = np.eye(n) * (float(y @ y) / sy)
                scaled = True
            Bs = B @ step
            B = B + np.outer(y, y) / sy - np.outer(Bs, Bs) / float(step @ Bs)

    return result(MAX_ITER, s.max_iterations, "iteration limit reached")
