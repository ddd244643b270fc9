"""ODE kernels: orthonormalized subspace transport and trajectory shooting."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass

import numpy as np
from scipy.integrate import RK45, solve_ivp

from src.core.errors import NonFinite, StepFailure
from src.core.logging import numerics_logger

from .linalg import SubspaceBasis, polar_orthonormalize

DEFAULT_MIN_STEP = 1e-12


@dataclass
class IntegrationStats:
    """Counters filled in by integrate_subspace."""

    steps: int = 0
    smallest_step: float = float("inf")
    evaluations: int = 0


def integrate_subspace(
    rhs: Callable[[float], np.ndarray],
    z_from: float,
    z_to: float,
    init: SubspaceBasis,
    tol: float = 1e-10,
    min_step: float = DEFAULT_MIN_STEP,
    stats: IntegrationStats | None = None,
) -> SubspaceBasis:
    """Carry span(init) under U' = G(z)U from ``z_from`` down to ``z_to``.

    The columns follow the projected flow Q' = (I - QQ^H) G Q, which keeps
    them orthonormal to first order; after every accepted step they are polar
    re-orthonormalized.  Polar factors have positive determinant, so phases of
    determinants against a fixed basis vary continuously with parameters of G.
    """
    if not z_from > z_to >= 0.0:
        raise ValueError(f"integrate_subspace needs z_from > z_to >= 0, got {z_from} -> {z_to}")
    n, k = init.columns.shape
    if k == 0 or k == n:
        return init
    counters = stats if stats is not None else IntegrationStats()

    def flow(z: float, y: np.ndarray) -> np.ndarray:
        counters.evaluations += 1
        q = y.reshape(n, k)
        gq = np.asarray(rhs(z), dtype=complex) @ q
        return (gq - q @ (q.conj().T @ gq)).ravel()

    q = init.columns.astype(complex)
    z = float(z_from)
    step: float | None = None
    while z > z_to:
        first_step = None if step is None else min(step, z - z_to)
        solver = RK45(flow, z, q.ravel(), z_to, rtol=tol, atol=tol, first_step=first_step)
        message = solver.step()
        if solver.status == "failed":
            raise StepFailure("adaptive controller failed", z=z, reason=str(message))
        taken = abs(z - solver.t)
        if taken < min_step and solver.t > z_to:
            raise StepFailure("step size underflow", z=float(solver.t), step=taken, min_step=min_step)
        values = solver.y.reshape(n, k)
        if not np.all(np.isfinite(values)):
            raise NonFinite("subspace transport produced non-finite values", z=float(solver.t))
        q = polar_orthonormalize(values)
        z = float(solver.t)
        step = max(taken, min_step) if solver.h_abs is None else max(float(solver.h_abs), min_step)
        counters.steps += 1
        counters.smallest_step = min(counters.smallest_step, taken)
    numerics_logger.debug(
        f"subspace transport {z_from:g}->{z_to:g}: {counters.steps} steps, "
        f"{counters.evaluations} evaluations, smallest step {counters.smallest_step:.3g}"
    )
    return SubspaceBasis(q)


def shoot(
    fun: Callable[[float, np.ndarray], np.ndarray],
    z_span: tuple[float, float],
    y0: np.ndarray,
    rtol: float = 1e-12,
    atol: float = 1e-14,
    method: str = "DOP853",
    events: Callable | None = None,
):
    """Integrate a trajectory with dense output; failures become StepFailure."""
    solution = solve_ivp(fun, z_span, np.asarray(y0, dtype=float), method=method, rtol=rtol, atol=atol, dense_output=True, events=events)
    if solution.status == -1:
        raise StepFailure("trajectory integration failed", z=float(solution.t[-1]), reason=solution.message)
    if not np.all(np.isfinite(solution.y)):
        raise NonFinite("trajectory has non-finite values", z=float(solution.t[-1]))
    return solution


__all__ = ["DEFAULT_MIN_STEP", "IntegrationStats", "integrate_subspace", "shoot"]
