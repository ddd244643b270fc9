"""Stable-manifold charts of rest points and profile construction by collocation.

A layer profile is a solution X of the reduced profile equation X' = F(X; q)
on z >= 0 that converges to the parabolic part q2 of the endstate.  The
stable manifold of q2 is parametrized by the stable component of X'(0):
Pi_-(q) X'(0) = alpha(q; a).  Profiles are computed as two-point problems on
[0, Z_max] with the projective condition Pi_+(q)(X(Z_max) - q2) = 0.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.integrate import solve_bvp
from scipy.optimize import brentq

from src.core.errors import (
    BadParams,
    ChartRadiusExceeded,
    DecayTooSlow,
    DimensionMismatch,
    GapCollapse,
    GapTooSmall,
    NoConvergence,
)
from src.core.logging import numerics_logger, performance_monitor
from src.numerics import polar_orthonormalize, spectral_projector
from src.systems import BlockSystem, BoundaryOperator, G_nu, boundary_operator_eval

from .equations import check_normal, profile_residual, require_reduction
from .models import Profile

PROFILE_NODES = 400
GRID_GRADING = 50.0
DECAY_LENGTHS = 25.0
COLLOCATION_TOL = 1e-10
DECAY_TOL = 1e-10
BOUNDARY_TOL = 1e-10
RESIDUAL_TOL = 1e-8
MAX_DOUBLINGS = 3
MAX_MESH_NODES = 200000
GAP_TOL = 1e-9
CHART_RADIUS_FRACTION = 0.1


def geometric_grid(length: float, nodes: int = PROFILE_NODES, grading: float = GRID_GRADING) -> np.ndarray:
    """Nodes on [0, length], spacing growing by the factor 1 + grading end to end."""
    if not length > 0.0 or nodes < 2:
        raise ValueError(f"grid needs a positive length and two nodes, got {length}, {nodes}")
    s = np.linspace(0.0, 1.0, nodes)
    grid = length * np.expm1(np.log1p(grading) * s) / grading
    grid[0], grid[-1] = 0.0, length
    return grid


def stable_projector(system: BlockSystem, q: np.ndarray) -> tuple[np.ndarray, int]:
    """Real spectral projector Pi_- of G_nu(q) and the stable dimension."""
    G = G_nu(system, q)
    eigenvalues = la.eigvals(G)
    gap = float(np.min(np.abs(eigenvalues.real)))
    if gap < GAP_TOL:
        raise GapTooSmall("G_nu has an eigenvalue on the imaginary axis", gap=gap)
    projector, _ = spectral_projector(G, lambda value: value.real < 0.0)
    return np.real(projector), int(np.count_nonzero(eigenvalues.real < 0.0))


def decay_estimate(system: BlockSystem, q: np.ndarray) -> float:
    """Smallest decay rate of the linearization at q, inf without stable modes."""
    eigenvalues = la.eigvals(G_nu(system, q))
    stable = eigenvalues[eigenvalues.real < 0.0]
    return float(np.min(-stable.real)) if stable.size else float("inf")


def canonical_basis(projector: np.ndarray, dim: int) -> np.ndarray:
    """Orthonormal basis of range(projector) from a pivoted QR, R diagonal positive."""
    n = projector.shape[0]
    if dim == 0:
        return np.zeros((n, 0))
    q, r, _ = la.qr(np.real(projector), pivoting=True)
    signs = np.sign(np.diag(r)[:dim])
    signs[signs == 0.0] = 1.0
    return q[:, :dim] * signs


def unstable_basis(projector: np.ndarray, stable_dim: int) -> np.ndarray:
    """Orthonormal basis W of range(I - Pi_-)."""
    left, _, _ = la.svd(np.eye(projector.shape[0]) - projector)
    return left[:, : projector.shape[0] - stable_dim]


def unstable_rows(projector: np.ndarray, stable_dim: int) -> np.ndarray:
    """W^T (I - Pi_-), the rows of the projective condition at Z_max."""
    return unstable_basis(projector, stable_dim).T @ (np.eye(projector.shape[0]) - projector)


def default_chart_radius(state: np.ndarray) -> float:
    return CHART_RADIUS_FRACTION * max(1.0, float(np.linalg.norm(state)))


@dataclass(frozen=True, eq=False)
class StableManifoldChart:
    """Coordinates a on the stable manifold of q2, identified across endstates.

    ``alpha_basis(q)`` is the polar orthonormalization of Pi_-(q) applied to
    the canonical basis at the base state, so alpha(q; a) = alpha_basis(q) a
    moves continuously with q and is the identity at the base state.
    """

    system: BlockSystem
    base_state: np.ndarray
    base_basis: np.ndarray
    radius: float

    @classmethod
    def at(cls, system: BlockSystem, state: np.ndarray, radius: float | None = None) -> "StableManifoldChart":
        base = system.require_domain(state)
        projector, dim = stable_projector(system, base)
        size = default_chart_radius(base) if radius is None else float(radius)
        if not size > 0.0:
            raise BadParams("chart radius must be positive", radius=size)
        return cls(system=system, base_state=base, base_basis=canonical_basis(projector, dim), radius=size)

    @property
    def dimension(self) -> int:
        return int(self.base_basis.shape[1])

    def frame(self, q: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Pi_-(q) and alpha_basis(q)."""
        projector, dim = stable_projector(self.system, q)
        if dim != self.dimension:
            raise GapCollapse("stable dimension changed across the chart", expected=self.dimension, found=dim)
        if dim == 0:
            return projector, self.base_basis
        return projector, np.real(polar_orthonormalize(projector @ self.base_basis))

    def alpha_basis(self, q: np.ndarray) -> np.ndarray:
        return self.frame(q)[1]

    def alpha(self, q: np.ndarray, a: np.ndarray) -> np.ndarray:
        return self.alpha_basis(q) @ np.asarray(a, dtype=float)

    def coordinates(self, q: np.ndarray, derivative: np.ndarray) -> np.ndarray:
        """a with Pi_-(q) derivative = alpha(q; a)."""
        projector, basis = self.frame(q)
        return basis.T @ (projector @ np.asarray(derivative, dtype=float))

    def profile(self, q: np.ndarray, a: np.ndarray, z_max: float | None = None, **options) -> Profile:
        return phi_stable_manifold(self.system, q, a, z_max, chart=self, **options)

    def phi(self, z: float, q: np.ndarray, a: np.ndarray) -> np.ndarray:
        return self.profile(q, a).state_at(z)


def fit_decay_rate(grid: np.ndarray, w2z: np.ndarray, fallback: float) -> float:
    """Exponential rate of |w2z| fitted where it has dropped by 1e2..1e6 from its peak."""
    sizes = np.linalg.norm(np.asarray(w2z, dtype=float), axis=1)
    peak_index = int(np.argmax(sizes))
    peak = float(sizes[peak_index])
    if peak < 1e-13:
        return fallback
    mask = (sizes >= 1e-6 * peak) & (sizes <= 1e-2 * peak)
    mask[:peak_index] = False
    if int(np.count_nonzero(mask)) < 4:
        return fallback
    slope = np.polyfit(np.asarray(grid)[mask], np.log(sizes[mask]), 1)[0]
    return float(-slope)


def constant_profile(
    system: BlockSystem,
    q: np.ndarray,
    nodes: int = PROFILE_NODES,
    boundary_data: tuple[np.ndarray, np.ndarray] | None = None,
) -> Profile:
    state = system.require_domain(q)
    rate = decay_estimate(system, state)
    length = DECAY_LENGTHS / rate if np.isfinite(rate) else 1.0
    grid = geometric_grid(length, nodes)
    stable = int(np.count_nonzero(la.eigvals(G_nu(system, state)).real < 0.0))
    return Profile(
        system=system,
        nu=system.normal,
        grid=grid,
        w=np.tile(state, (grid.size, 1)),
        w2z=np.zeros((grid.size, system.Nprime)),
        endstate=state,
        decay_rate=rate,
        amplitude=np.zeros(stable),
        boundary_data=boundary_data,
    )


def assemble_profile(
    system: BlockSystem,
    q: np.ndarray,
    grid: np.ndarray,
    parabolic: np.ndarray,
    amplitude: np.ndarray,
    boundary_data: tuple[np.ndarray, np.ndarray] | None = None,
) -> Profile:
    """Profile from reduced unknowns X on the grid (one row per node)."""
    reduction = require_reduction(system)
    columns = np.asarray(parabolic, dtype=float).T
    w = np.asarray(reduction.recover(columns, q), dtype=float).T
    w2z = np.asarray(reduction.rhs(columns, q), dtype=float).T
    return Profile(
        system=system,
        nu=system.normal,
        grid=grid,
        w=w,
        w2z=w2z,
        endstate=q,
        decay_rate=fit_decay_rate(grid, w2z, decay_estimate(system, q)),
        amplitude=amplitude,
        boundary_data=boundary_data,
    )


def verify_profile(profile: Profile, bc: BoundaryOperator | None = None) -> Profile:
    """Re-check equation residual, decay and boundary condition of a computed profile."""
    system = profile.system
    residual = profile_residual(system, profile.endstate, profile.w[:, system.n1 :], grid=profile.grid)
    if residual > RESIDUAL_TOL:
        raise NoConvergence("profile violates the first-order profile equation", residual=residual)
    if profile.decay_residual > DECAY_TOL:
        raise DecayTooSlow("profile has not reached its endstate", z_max=profile.z_max, residual=profile.decay_residual)
    if bc is not None:
        values, _ = boundary_operator_eval(system, bc, np.concatenate([profile.w[0], profile.w2z[0]]))
        mismatch = float(np.max(np.abs(values))) if values.size else 0.0
        if mismatch > BOUNDARY_TOL:
            raise NoConvergence("profile misses its boundary condition", residual=mismatch)
    return profile


def collocate(
    fun: Callable,
    bc: Callable,
    grid: np.ndarray,
    guess: np.ndarray,
    parameters: np.ndarray | None = None,
    tol: float = COLLOCATION_TOL,
):
    """scipy.integrate.solve_bvp with failures mapped onto NoConvergence."""
    with np.errstate(all="ignore"):
        try:
            if parameters is None or parameters.size == 0:
                solution = solve_bvp(fun, bc, grid, guess, tol=tol, max_nodes=MAX_MESH_NODES)
            else:
                solution = solve_bvp(fun, bc, grid, guess, p=parameters, tol=tol, max_nodes=MAX_MESH_NODES)
        except (ValueError, np.linalg.LinAlgError, FloatingPointError) as error:
            raise NoConvergence("collocation failed", reason=str(error)) from error
    if solution.status != 0 or not np.all(np.isfinite(solution.y)):
        raise NoConvergence("collocation did not converge", status=int(solution.status), reason=solution.message, nodes=int(solution.x.size))
    numerics_logger.debug(
        f"collocation converged on {solution.x.size} nodes in {solution.niter} iterations, "
        f"max rms residual {float(np.max(solution.rms_residuals)):.2e}"
    )
    return solution


def _linear_expansion(G: np.ndarray, q2: np.ndarray, start: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    """z -> q2 + exp(G z) start, one column per z."""

    def guess(grid: np.ndarray) -> np.ndarray:
        return q2[:, None] + np.column_stack([np.real(la.expm(G * z) @ start) for z in grid])

    return guess


def _continued(solution, length: float) -> Callable[[np.ndarray], np.ndarray]:
    return lambda grid: solution.sol(np.minimum(grid, length))


@performance_monitor("profiles.phi_stable_manifold")
def phi_stable_manifold(
    system: BlockSystem,
    q: np.ndarray,
    a: np.ndarray,
    z_max: float | None = None,
    *,
    nu: np.ndarray | None = None,
    chart: StableManifoldChart | None = None,
    nodes: int = PROFILE_NODES,
    tol: float = COLLOCATION_TOL,
) -> Profile:
    """Profile on the stable manifold of q with coordinate a.

    Solves X' = F(X; q) with Pi_- X'(0) = alpha(q; a) and the projective
    condition at Z_max (default 25 / delta), starting from the linear
    expansion q2 + exp(G z) G^-1 alpha(q; a).  Z_max is doubled up to three
    times when the profile has not decayed to DECAY_TOL.
    """
    check_normal(system, nu)
    reduction = require_reduction(system)
    state = system.require_domain(q)
    chart = chart or StableManifoldChart.at(system, state)
    coords = np.atleast_1d(np.asarray(a, dtype=float))
    if coords.shape != (chart.dimension,):
        raise DimensionMismatch(f"stable manifold coordinates have {chart.dimension} components", shape=coords.shape)
    size = float(np.linalg.norm(coords))
    if size > chart.radius:
        raise ChartRadiusExceeded("stable-manifold coordinate outside the chart", norm=size, radius=chart.radius)
    if size == 0.0:
        return constant_profile(system, state, nodes)

    projector, basis = chart.frame(state)
    G = G_nu(system, state)
    q2 = state[system.n1 :]
    far = unstable_rows(projector, chart.dimension)

    def fun(z: np.ndarray, X: np.ndarray) -> np.ndarray:
        return reduction.rhs(X, state)

    def boundary(Xa: np.ndarray, Xb: np.ndarray) -> np.ndarray:
        start = basis.T @ (projector @ reduction.rhs(Xa, state)) - coords
        return np.concatenate([start, far @ (Xb - q2)])

    guess = _linear_expansion(G, q2, la.solve(G, basis @ coords))
    length = float(z_max) if z_max is not None else DECAY_LENGTHS / decay_estimate(system, state)
    for attempt in range(MAX_DOUBLINGS + 1):
        grid = geometric_grid(length, nodes)
        solution = collocate(fun, boundary, grid, guess(grid), tol=tol)
        profile = assemble_profile(system, state, grid, solution.sol(grid).T, coords)
        if profile.decay_residual <= DECAY_TOL:
            return verify_profile(profile)
        numerics_logger.debug(f"decay residual {profile.decay_residual:.2e} at Z_max={length:g}; doubling")
        guess = _continued(solution, length)
        length *= 2.0
    raise DecayTooSlow("profile did not decay within the doubled truncation", z_max=length / 2.0, residual=profile.decay_residual)


def dominant_direction(chart: StableManifoldChart, q: np.ndarray) -> np.ndarray:
    """Unit chart coordinate along the slowest stable eigenvector of G_nu(q)."""
    if chart.dimension == 0:
        return np.zeros(0)
    eigenvalues, vectors = la.eig(G_nu(chart.system, q))
    stable = np.flatnonzero(eigenvalues.real < 0.0)
    index = stable[int(np.argmax(eigenvalues.real[stable]))]
    vector = np.real(vectors[:, index])
    if np.linalg.norm(vector) == 0.0:
        vector = np.imag(vectors[:, index])
    coords = chart.coordinates(q, vector)
    coords = coords / np.linalg.norm(coords)
    return coords * (1.0 if coords[int(np.argmax(np.abs(coords)))] > 0 else -1.0)


def small_amplitude_family(
    system: BlockSystem,
    q: np.ndarray,
    amplitudes: Sequence[float],
    radius: float | None = None,
    **options,
) -> list[Profile]:
    """Profiles Phi(.; q, eps e) for each eps, e the dominant stable direction.

    Without an explicit ``radius`` the chart grows to admit the largest
    requested amplitude.
    """
    state = system.require_domain(q)
    if radius is None and len(amplitudes):
        radius = max(default_chart_radius(state), max(abs(float(eps)) for eps in amplitudes))
    chart = StableManifoldChart.at(system, state, radius)
    direction = dominant_direction(chart, state)
    return [phi_stable_manifold(system, state, float(eps) * direction, chart=chart, **options) for eps in amplitudes]


def _first_sign_change(h: Callable[[float], float], values: np.ndarray) -> float | None:
    previous, previous_value = float(values[0]), h(float(values[0]))
    for current in values[1:]:
        value = h(float(current))
        if value == 0.0:
            return float(current)
        if np.sign(value) != np.sign(previous_value):
            return float(brentq(h, previous, float(current), xtol=1e-14, rtol=1e-13))
        previous, previous_value = float(current), value
    return None


def connection_interval(system: BlockSystem, q: np.ndarray) -> tuple[float, float]:
    """Open range of boundary normal velocities v0 joined to the endstate q.

    The normal-velocity profile equation of isentropic Navier-Stokes is the
    scalar ODE v' = h(v); v0 must lie between the nearest rest points on either
    side of v_inf (0 and +-inf when there is none).  A repelling v_inf gives
    the degenerate interval (v_inf, v_inf).
    """
    if system.name != "isentropic_ns":
        raise BadParams("connection intervals are available for isentropic_ns only", model=system.name)
    reduction = require_reduction(system)
    state = system.require_domain(q)
    u_inf, v_inf = float(state[1]), float(state[2])
    if v_inf == 0.0:
        raise BadParams("characteristic endstate has no normal-velocity profiles")

    def h(v: float) -> float:
        return float(reduction.rhs(np.array([u_inf, v]), state)[1])

    step = 1e-6 * abs(v_inf)
    if (h(v_inf + step) - h(v_inf - step)) / (2.0 * step) >= 0.0:
        return v_inf, v_inf
    toward_zero = v_inf * np.clip(1.0 - np.geomspace(1e-6, 1.0, 4000), 1e-12, None)
    toward_infinity = v_inf * (1.0 + np.geomspace(1e-6, 1e6, 4000))
    inner = _first_sign_change(h, toward_zero)
    outer = _first_sign_change(h, toward_infinity)
    inner = 0.0 if inner is None else inner
    outer = float(np.copysign(np.inf, v_inf)) if outer is None else outer
    return min(inner, outer), max(inner, outer)


__all__ = [
    "BOUNDARY_TOL",
    "COLLOCATION_TOL",
    "DECAY_LENGTHS",
    "DECAY_TOL",
    "MAX_DOUBLINGS",
    "PROFILE_NODES",
    "RESIDUAL_TOL",
    "StableManifoldChart",
    "assemble_profile",
    "canonical_basis",
    "collocate",
    "connection_interval",
    "constant_profile",
    "decay_estimate",
    "dominant_direction",
    "fit_decay_rate",
    "geometric_grid",
    "phi_stable_manifold",
    "small_amplitude_family",
    "stable_projector",
    "unstable_basis",
    "unstable_rows",
    "verify_profile",
]
