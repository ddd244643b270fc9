"""Layers with prescribed boundary data and local charts of their endstates."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from src.core.errors import DecayTooSlow, DimensionMismatch, NontransversalSeed
from src.core.logging import get_logger, performance_monitor
from src.numerics import finite_difference_jacobian, newton_solve
from src.systems import BlockSystem, BoundaryOperator, boundary_operator_eval, counts

from .equations import check_normal, require_reduction
from .manifold import (
    COLLOCATION_TOL,
    DECAY_LENGTHS,
    DECAY_TOL,
    MAX_DOUBLINGS,
    PROFILE_NODES,
    StableManifoldChart,
    assemble_profile,
    collocate,
    constant_profile,
    decay_estimate,
    geometric_grid,
    phi_stable_manifold,
    unstable_basis,
    verify_profile,
)
from .models import Profile
from .transversality import transversality_matrix

chart_logger = get_logger("profiles")

SEED_RATIO_TOL = 1e-8
TRACE_STEP = 1e-5


def _boundary_residual(system: BlockSystem, bc: BoundaryOperator, profile: Profile) -> np.ndarray:
    values, _ = boundary_operator_eval(system, bc, np.concatenate([profile.w[0], profile.w2z[0]]))
    return values


def select_coordinates(jacobian_q: np.ndarray, jacobian_a: np.ndarray, n_plus: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Split endstate coordinates into solved (N+ of them) and free ones.

    The a-block is eliminated first; the solved coordinates are the leading
    pivots of a column-pivoted QR of the remaining q-block.
    """
    n = jacobian_q.shape[1]
    if jacobian_a.size:
        q, _ = np.linalg.qr(jacobian_a)
        reduced = jacobian_q - q @ (q.T @ jacobian_q)
    else:
        reduced = jacobian_q
    if n_plus:
        _, _, pivots = la.qr(reduced, pivoting=True)
        solved = tuple(sorted(int(index) for index in pivots[:n_plus]))
    else:
        solved = ()
    free = tuple(index for index in range(n) if index not in solved)
    square = np.hstack([jacobian_q[:, list(solved)], jacobian_a])
    singular = la.svdvals(square) if square.size else np.ones(1)
    if singular[-1] <= SEED_RATIO_TOL * singular[0]:
        raise NontransversalSeed("boundary-value Jacobian at the seed is rank deficient", ratio=float(singular[-1] / singular[0]))
    return solved, free


@dataclass(frozen=True, eq=False)
class ProfileChart:
    """Local parametrization q(q_free), a(q_free) of endstates reachable with data g.

    ``free`` lists the N - N+ endstate coordinates that parametrize the chart
    and ``solved`` the N+ coordinates determined by the boundary condition.
    """

    system: BlockSystem
    bc: BoundaryOperator
    manifold: StableManifoldChart
    free: tuple[int, ...]
    solved: tuple[int, ...]
    seed: np.ndarray
    far_rows: np.ndarray
    length: float
    nodes: int = PROFILE_NODES
    tol: float = COLLOCATION_TOL

    @property
    def dimension(self) -> int:
        return len(self.free)

    def _compose(self, q_free: np.ndarray) -> np.ndarray:
        base = self.seed.copy()
        base[list(self.free)] = q_free
        return base

    def endstate(self, q_free: Sequence[float]) -> np.ndarray:
        return self.solve(q_free).endstate

    def solve(self, q_free: Sequence[float], guess: Profile | None = None) -> Profile:
        values = np.asarray(q_free, dtype=float).ravel()
        if values.shape != (self.dimension,):
            raise DimensionMismatch(f"chart coordinates have {self.dimension} components", shape=values.shape)
        base = self._compose(values)
        solved = list(self.solved)
        start = (guess.endstate if guess is not None else self.seed)[solved]

        def compose(p: np.ndarray) -> np.ndarray:
            state = base.copy()
            state[solved] = p
            return state

        if self.manifold.dimension == 0:
            return self._solve_constant(compose, start)
        return self._solve_layer(compose, start, guess)

    def _solve_constant(self, compose, start: np.ndarray) -> Profile:
        n2 = self.system.Nprime

        def residual(p: np.ndarray) -> np.ndarray:
            values, _ = boundary_operator_eval(self.system, self.bc, np.concatenate([compose(p), np.zeros(n2)]))
            return values

        p = newton_solve(residual, start, tol=1e-12) if start.size else start
        state = self.system.require_domain(compose(p))
        return verify_profile(constant_profile(self.system, state, self.nodes, (self.bc.g1, self.bc.g2)), self.bc)

    def _solve_layer(self, compose, start: np.ndarray, guess: Profile | None) -> Profile:
        system, bc = self.system, self.bc
        reduction = require_reduction(system)
        n1 = system.n1

        def boundary_rows(Xa: np.ndarray, Xb: np.ndarray, q: np.ndarray) -> np.ndarray:
            projector, _ = self.manifold.frame(q)
            U = np.concatenate([reduction.recover(Xa, q), reduction.rhs(Xa, q)])
            values, _ = boundary_operator_eval(system, bc, U)
            far = self.far_rows @ ((np.eye(projector.shape[0]) - projector) @ (Xb - q[n1:]))
            return np.concatenate([values, far])

        if start.size:
            fun = lambda z, X, p: reduction.rhs(X, compose(p))  # noqa: E731
            boundary = lambda Xa, Xb, p: boundary_rows(Xa, Xb, compose(p))  # noqa: E731
        else:
            fun = lambda z, X: reduction.rhs(X, compose(start))  # noqa: E731
            boundary = lambda Xa, Xb: boundary_rows(Xa, Xb, compose(start))  # noqa: E731

        if guess is not None:
            source_grid, source = guess.grid, guess.w[:, n1:]
            initial = lambda grid: np.vstack(  # noqa: E731
                [np.interp(grid, source_grid, source[:, column]) for column in range(source.shape[1])]
            )
        else:
            resting = compose(start)[n1:]
            initial = lambda grid: np.tile(resting[:, None], (1, grid.size))  # noqa: E731

        length = self.length
        parameters = start
        for attempt in range(MAX_DOUBLINGS + 1):
            grid = geometric_grid(length, self.nodes)
            solution = collocate(fun, boundary, grid, initial(grid), parameters=parameters, tol=self.tol)
            q = system.require_domain(compose(solution.p if start.size else start))
            X = solution.sol(grid)
            amplitude = self.manifold.coordinates(q, reduction.rhs(X[:, 0], q))
            profile = assemble_profile(system, q, grid, X.T, amplitude, (bc.g1, bc.g2))
            if profile.decay_residual <= DECAY_TOL:
                chart_logger.debug(f"chart solve reached q={np.round(q, 12).tolist()} with |a|={np.linalg.norm(amplitude):.3e}")
                return verify_profile(profile, bc)
            initial = lambda grid, s=solution, L=length: s.sol(np.minimum(grid, L))  # noqa: E731
            parameters = solution.p if start.size else start
            length *= 2.0
        raise DecayTooSlow("layer did not decay within the doubled truncation", z_max=length / 2.0, residual=profile.decay_residual)


def trace_jacobian(system: BlockSystem, bc: BoundaryOperator, manifold: StableManifoldChart, seed: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Finite-difference derivative of (q, a) -> Upsilon(Phi(0; q, a)) - g."""
    n = system.N

    def trace(values: np.ndarray) -> np.ndarray:
        profile = phi_stable_manifold(system, values[:n], values[n:], chart=manifold)
        return _boundary_residual(system, bc, profile)

    return finite_difference_jacobian(trace, np.concatenate([seed, a]), rel_step=TRACE_STEP)


@performance_monitor("profiles.solve_profile_bc")
def solve_profile_bc(
    system: BlockSystem,
    bc: BoundaryOperator,
    q_guess: np.ndarray,
    a_guess: np.ndarray | None = None,
    *,
    nu: np.ndarray | None = None,
    g: tuple[np.ndarray, np.ndarray] | None = None,
    radius: float | None = None,
    nodes: int = PROFILE_NODES,
    tol: float = COLLOCATION_TOL,
) -> tuple[Profile, ProfileChart]:
    """Layer with boundary data g near a seed, and the chart of nearby solutions.

    The seed Jacobian of (q, a) -> Upsilon(Phi(0; q, a)) - g selects the N+
    endstate coordinates that are solved for; the remaining N - N+ are kept at
    their seed values and parametrize the returned chart.
    """
    check_normal(system, nu)
    if g is not None:
        bc = bc.with_data(g[0], g[1])
    seed = system.require_domain(q_guess)
    char = counts(system, bc, seed)
    manifold = StableManifoldChart.at(system, seed, radius)
    a = np.zeros(manifold.dimension) if a_guess is None else np.atleast_1d(np.asarray(a_guess, dtype=float))
    if a.shape != (manifold.dimension,):
        raise DimensionMismatch(f"stable manifold coordinates have {manifold.dimension} components", shape=a.shape)

    seed_profile = None
    if np.any(a):
        seed_profile = phi_stable_manifold(system, seed, a, chart=manifold, nodes=nodes, tol=tol)
        jacobian = trace_jacobian(system, bc, manifold, seed, a)
    else:
        jacobian, _ = transversality_matrix(system, bc, seed)
    solved, free = select_coordinates(jacobian[:, : system.N], jacobian[:, system.N :], char.Nplus)
    chart_logger.debug(f"{system.name}/{bc.name}: solving endstate coordinates {solved}, chart coordinates {free}")

    projector, _ = manifold.frame(seed)
    rate = decay_estimate(system, seed)
    length = seed_profile.z_max if seed_profile is not None else (DECAY_LENGTHS / rate if np.isfinite(rate) else 1.0)
    chart = ProfileChart(
        system=system,
        bc=bc,
        manifold=manifold,
        free=free,
        solved=solved,
        seed=seed,
        far_rows=unstable_basis(projector, manifold.dimension).T,
        length=length,
        nodes=nodes,
        tol=tol,
    )
    return chart.solve(seed[list(free)], guess=seed_profile), chart


def chart_overlap_residual(first: ProfileChart, second: ProfileChart, points: Sequence[Sequence[float]]) -> float:
    """Largest endstate disagreement of two charts over points of the first one."""
    worst = 0.0
    for point in points:
        state = first.endstate(point)
        other = second.endstate(state[list(second.free)])
        worst = max(worst, float(np.max(np.abs(state - other))))
    return worst


__all__ = ["ProfileChart", "chart_overlap_residual", "select_coordinates", "solve_profile_bc", "trace_jacobian"]
