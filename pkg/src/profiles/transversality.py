"""Transversality of layers: small-amplitude matrix test and general profiles."""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

from src.core.errors import DecayTooSlow, GapTooSmall
from src.numerics import integrate_subspace, invariant_subspace, min_singular_value, numerical_rank
from src.systems import BlockSystem, BoundaryOperator, G_nu, boundary_operator_eval, counts, invert_block

from .equations import check_normal
from .manifold import DECAY_TOL, canonical_basis, stable_projector
from .models import RANK_TOL, Profile, TransversalityReport


def stable_lift(system: BlockSystem, state: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Boundary values (u1, u2, u3) of the linear decaying solutions with u3(0) in span(basis)."""
    n1, k = system.n1, basis.shape[1]
    lifted = la.solve(G_nu(system, state), basis) if k else np.zeros((system.Nprime, 0))
    if n1:
        a11, a12, _, _ = system.blocks(system.A_normal(state))
        hyperbolic = -invert_block(a11, "A11_nu") @ a12 @ lifted
    else:
        hyperbolic = np.zeros((0, k))
    return np.vstack([hyperbolic, lifted, basis])


def transversality_matrix(system: BlockSystem, bc: BoundaryOperator, p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Derivative of (q, a) -> Upsilon(Phi(0; q, a)) at the constant layer p.

    Returns the Nb x (N + N2-) matrix [Gamma_w | Gamma lift(E)] and the
    orthonormal stable basis E of G_nu(p) used for the a-block.
    """
    state = system.require_domain(p)
    projector, dim = stable_projector(system, state)
    basis = canonical_basis(projector, dim)
    _, gamma = boundary_operator_eval(system, bc, np.concatenate([state, np.zeros(system.Nprime)]))
    gamma = np.real(gamma)
    return np.hstack([gamma[:, : system.N], gamma @ stable_lift(system, state, basis)]), basis


def transversality_small(
    system: BlockSystem,
    bc: BoundaryOperator,
    p: np.ndarray,
    nu: np.ndarray | None = None,
) -> TransversalityReport:
    """(i) the a-block is injective on E_-(G_nu(p)); (ii) K_nu has full rank on it."""
    check_normal(system, nu)
    char = counts(system, bc, p)
    matrix, basis = transversality_matrix(system, bc, p)
    k = basis.shape[1]
    block = matrix[:, system.N :]
    rank_i = numerical_rank(block, RANK_TOL)
    if bc.Ndoubleprime:
        restricted = bc.K_nu @ basis
        rank_ii = numerical_rank(restricted, RANK_TOL)
        sigma_ii = min_singular_value(restricted) if k else 0.0
        condition_ii = rank_ii == bc.Ndoubleprime
    else:
        rank_ii, sigma_ii, condition_ii = 0, float("inf"), True
    return TransversalityReport(
        condition_i=rank_i == k,
        condition_ii=condition_ii,
        rank_i=rank_i,
        rank_ii=rank_ii,
        sigma_min_i=min_singular_value(block) if k else float("inf"),
        sigma_min_ii=sigma_ii,
        dim_S=system.N + k,
        dim_S0=k,
        Nb=char.Nb,
        method="small",
    )


def transversality_general(profile: Profile, bc: BoundaryOperator) -> TransversalityReport:
    """Gamma on decaying (S0) and bounded-limit (S) solutions of the linearized profile equation.

    Both subspaces are seeded at z = Z_max from the stable and center-stable
    spectral subspaces of the limiting matrix at zero frequency and carried to
    z = 0.
    """
    from src.evans.linearized import linearized_system
    from src.evans.models import Frequency

    system = profile.system
    if profile.decay_residual > DECAY_TOL or not profile.decay_rate > 0.0:
        raise DecayTooSlow("profile has not decayed to its endstate", residual=profile.decay_residual, z_max=profile.z_max)
    eigenvalues = la.eigvals(G_nu(system, profile.endstate))
    gap = float(np.min(np.abs(eigenvalues.real)))
    if gap < 1e-9:
        raise GapTooSmall("profile endstate has a neutral direction", gap=gap)

    linear = linearized_system(profile, Frequency.zero(system.d))
    limit = linear.G_infinity
    center_stable = invariant_subspace(limit, lambda value: value.real < 0.5 * gap)
    stable = invariant_subspace(limit, lambda value: value.real < -0.5 * gap)
    if not profile.is_constant:
        center_stable = integrate_subspace(linear.G, profile.z_max, 0.0, center_stable)
        stable = integrate_subspace(linear.G, profile.z_max, 0.0, stable)

    gamma = linear.boundary_matrix(bc)
    decaying = gamma @ stable.columns
    bounded = gamma @ center_stable.columns
    rank_i = numerical_rank(decaying, RANK_TOL) if stable.dim else 0
    rank_ii = numerical_rank(bounded, RANK_TOL)
    singular = la.svdvals(bounded) if bounded.size else np.zeros(0)
    return TransversalityReport(
        condition_i=rank_i == stable.dim,
        condition_ii=rank_ii == bc.Nb,
        rank_i=rank_i,
        rank_ii=rank_ii,
        sigma_min_i=min_singular_value(decaying) if stable.dim else float("inf"),
        sigma_min_ii=float(singular[bc.Nb - 1]) if singular.size >= bc.Nb else 0.0,
        dim_S=center_stable.dim,
        dim_S0=stable.dim,
        Nb=bc.Nb,
        method="general",
    )


__all__ = ["stable_lift", "transversality_general", "transversality_matrix", "transversality_small"]
