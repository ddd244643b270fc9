"""Profile equation A_nu(w) w' = (B_nu(w) w')' in first-order form."""

from __future__ import annotations

import numpy as np
from scipy.interpolate import make_interp_spline

from src.core.errors import BadParams, DimensionMismatch, NoConvergence
from src.systems import BlockSystem, ProfileReduction, invert_block

DIRECTIONAL_STEP = 1e-6
GRID_RESIDUAL_TOL = 1e-4
SPLINE_DEGREE = 5


def require_reduction(system: BlockSystem) -> ProfileReduction:
    if system.reduction is None:
        raise BadParams(f"{system.name} has no integrated profile relations")
    return system.reduction


def check_normal(system: BlockSystem, nu: np.ndarray | None) -> np.ndarray:
    """Profiles are built along the last axis only."""
    if nu is None:
        return system.normal
    direction = np.asarray(nu, dtype=float)
    if direction.shape != (system.d,) or not np.allclose(direction, system.normal):
        raise BadParams("profiles are computed for the normal e_d only", nu=tuple(direction.tolist()))
    return system.normal


def directional_derivative(func, point: np.ndarray, direction: np.ndarray) -> np.ndarray:
    """Central difference of ``func`` at ``point`` along ``direction``."""
    size = float(np.linalg.norm(direction))
    if size == 0.0:
        return np.zeros_like(np.asarray(func(point), dtype=float))
    t = DIRECTIONAL_STEP * max(1.0, float(np.linalg.norm(point))) / size
    return (np.asarray(func(point + t * direction), dtype=float) - np.asarray(func(point - t * direction), dtype=float)) / (2.0 * t)


def profile_rhs(system: BlockSystem, U: np.ndarray, nu: np.ndarray | None = None) -> np.ndarray:
    """dU/dz for U = (w1, w2, w3), w3 = dw2/dz.

    w1' = -(A11)^-1 A12 w3, w2' = w3 and
    B22 w3' = A21 w1' + A22 w3 - (B22)'[w'] w3.
    """
    direction = check_normal(system, nu)
    vector = np.asarray(U, dtype=float)
    n1, n2 = system.n1, system.Nprime
    if vector.shape != (system.N + n2,):
        raise DimensionMismatch(f"profile vectors need {system.N + n2} components", shape=vector.shape)
    w, w3 = vector[: system.N], vector[system.N :]
    if not np.any(w3):
        return np.zeros_like(vector)
    a11, a12, a21, a22 = system.blocks(system.A_xi(w, direction))
    w1p = -invert_block(a11, "A11_nu") @ a12 @ w3 if n1 else np.zeros(0)
    wp = np.concatenate([w1p, w3])
    b22 = lambda state: system.blocks(system.B_xi(state, direction))[3]  # noqa: E731
    db22 = directional_derivative(b22, w, wp)
    w3p = invert_block(b22(w), "B22_nu") @ ((a21 @ w1p if n1 else 0.0) + a22 @ w3 - db22 @ w3)
    return np.concatenate([wp, w3p])


def grid_residual(reduction: ProfileReduction, q: np.ndarray, grid: np.ndarray, parabolic: np.ndarray) -> float:
    """max |dX/dz - F(X; q)| / max |F| with dX/dz from a quintic spline through the nodes."""
    z = np.asarray(grid, dtype=float)
    rows = np.atleast_2d(np.asarray(parabolic, dtype=float))
    if z.shape != (rows.shape[0],):
        raise DimensionMismatch("one grid node per row of reduced unknowns", grid=z.shape, rows=rows.shape)
    if z.size <= SPLINE_DEGREE:
        return 0.0
    slopes = make_interp_spline(z, rows, k=SPLINE_DEGREE, axis=0).derivative()(z)
    flow = np.asarray(reduction.rhs(rows.T, q), dtype=float).T
    peak = float(np.max(np.abs(flow)))
    if peak <= 1e-13:
        return float(np.max(np.abs(slopes)))
    return float(np.max(np.abs(slopes - flow))) / peak


def profile_residual(
    system: BlockSystem,
    endstate: np.ndarray,
    parabolic: np.ndarray,
    grid: np.ndarray | None = None,
    grid_tol: float = GRID_RESIDUAL_TOL,
) -> float:
    """Largest relative mismatch between the reduced flow and the first-order form.

    ``parabolic`` holds the reduced unknowns X on the nodes (one row per node).
    Exact derivatives along X' = F(X; q) are obtained from the chain rule,
    d/dz recover(X) = D recover [F] and d/dz F = DF [F], and compared with
    profile_rhs at the interior nodes.  With ``grid`` the stored nodes must
    also solve the flow: a quintic spline derivative of X on the grid has to
    match F(X; q) to ``grid_tol`` relative to max |F|, else NoConvergence.
    """
    reduction = require_reduction(system)
    q = system.state(endstate)
    rows = np.atleast_2d(np.asarray(parabolic, dtype=float))
    if grid is not None:
        mismatch = grid_residual(reduction, q, grid, rows)
        if mismatch > grid_tol:
            raise NoConvergence("stored profile does not solve the profile equation", residual=mismatch, tolerance=grid_tol)
    if rows.shape[0] < 3:
        return 0.0
    mismatch, peak = 0.0, 0.0
    for X in rows[1:-1]:
        F = np.asarray(reduction.rhs(X, q), dtype=float)
        chain = np.concatenate(
            [
                directional_derivative(lambda x: reduction.recover(x, q), X, F),
                directional_derivative(lambda x: reduction.rhs(x, q), X, F),
            ]
        )
        U = np.concatenate([np.asarray(reduction.recover(X, q), dtype=float), F])
        mismatch = max(mismatch, float(np.max(np.abs(chain - profile_rhs(system, U)))))
        peak = max(peak, float(np.max(np.abs(chain))))
    if peak <= 1e-13:
        return 0.0
    return mismatch / peak


__all__ = ["check_normal", "directional_derivative", "grid_residual", "profile_residual", "profile_rhs", "require_reduction"]
