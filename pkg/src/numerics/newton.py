"""Damped Newton iteration with finite-difference Jacobians."""

from __future__ import annotations

from collections.abc import Callable

import numpy as np
import scipy.linalg as la

from src.core.errors import NoConvergence, NonFinite, SingularJacobian
from src.core.logging import numerics_logger

VectorFunction = Callable[[np.ndarray], np.ndarray]


def finite_difference_jacobian(func: VectorFunction, x: np.ndarray, rel_step: float = 1e-6) -> np.ndarray:
    """Central differences with step ``rel_step * max(1, |x_i|)``."""
    point = np.asarray(x, dtype=float)
    columns = []
    for index in range(point.size):
        h = rel_step * max(1.0, abs(point[index]))
        forward = point.copy()
        backward = point.copy()
        forward[index] += h
        backward[index] -= h
        columns.append((np.atleast_1d(func(forward)) - np.atleast_1d(func(backward))) / (2.0 * h))
    return np.column_stack(columns) if columns else np.zeros((0, 0))


def newton_solve(
    func: VectorFunction,
    x0: np.ndarray | float,
    tol: float = 1e-10,
    max_iter: int = 50,
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None,
    rel_step: float = 1e-6,
    cond_limit: float = 1e12,
) -> np.ndarray:
    """Solve F(x) = 0 by Newton's method with a halving line search.

    Returns an array shaped like ``x0``.  Non-square systems are handled in
    the least-squares (Gauss-Newton) sense.
    """
    shape = np.shape(x0)
    x = np.atleast_1d(np.asarray(x0, dtype=float)).copy()

    def residual(point: np.ndarray) -> np.ndarray:
        value = np.atleast_1d(np.asarray(func(point.reshape(shape)), dtype=float))
        if not np.all(np.isfinite(value)):
            raise NonFinite("Newton residual is not finite", x=tuple(point.tolist()))
        return value

    def jac(point: np.ndarray) -> np.ndarray:
        if jacobian is not None:
            return np.atleast_2d(np.asarray(jacobian(point.reshape(shape)), dtype=float))
        return finite_difference_jacobian(residual, point, rel_step)

    f = residual(x)
    norm = float(np.linalg.norm(f))
    for iteration in range(max_iter + 1):
        if norm < tol:
            numerics_logger.debug(f"newton converged in {iteration} iterations, |F|={norm:.3e}")
            return x.reshape(shape)
        if iteration == max_iter:
            break
        matrix = jac(x)
        singular = la.svdvals(matrix)
        if singular.size == 0 or singular[-1] <= singular[0] / cond_limit or singular[-1] == 0.0:
            raise SingularJacobian("Newton Jacobian is singular", iteration=iteration, sigma_min=float(singular[-1]) if singular.size else 0.0)
        if matrix.shape[0] == matrix.shape[1]:
            delta = la.solve(matrix, -f)
        else:
            delta = la.lstsq(matrix, -f)[0]
        step = 1.0
        while True:
            candidate = x + step * delta
            try:
                trial = residual(candidate)
                trial_norm = float(np.linalg.norm(trial))
            except NonFinite:
                trial_norm = float("inf")
            if trial_norm <= (1.0 - 1e-4 * step) * norm or step < 1.0 / 1024:
                break
            step *= 0.5
        if not np.isfinite(trial_norm):
            raise NoConvergence("Newton line search left the domain", iteration=iteration, residual=norm)
        x, f, norm = candidate, trial, trial_norm
    raise NoConvergence("Newton iteration did not converge", iterations=max_iter, residual=norm)


__all__ = ["finite_difference_jacobian", "newton_solve"]
