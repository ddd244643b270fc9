"""Evans function D(zeta) = det(E_minus(zeta), ker Gamma(zeta))."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import scipy.linalg as la

from src.core.errors import DimensionMismatch
from src.core.logging import get_logger
from src.numerics import (
    IntegrationStats,
    SubspaceBasis,
    extrapolate_ladder,
    integrate_subspace,
    min_singular_value,
    oriented_det,
    stable_subspace,
    transport_along,
    winding_number,
)
from src.numerics.linalg import spectral_gap
from src.profiles.models import Profile
from src.systems import BoundaryOperator

from .linearized import LinearizedSystem, ProfileCoefficients, linearized_system
from .models import ContourSpec, EvansEvaluation, Frequency

evans_logger = get_logger("evans")

DEFAULT_LADDER = (1e-2, 5e-3, 2.5e-3)
TRANSPORT_TOL = 1e-10


def _carry(linear: LinearizedSystem, basis: SubspaceBasis, stats: IntegrationStats | None = None) -> SubspaceBasis:
    if linear.profile.is_constant:
        return basis
    return integrate_subspace(linear.G, linear.profile.z_max, 0.0, basis, tol=TRANSPORT_TOL, stats=stats)


def kernel_basis(gamma: np.ndarray) -> SubspaceBasis:
    """Orthonormal basis of ker Gamma."""
    matrix = np.atleast_2d(np.asarray(gamma, dtype=complex))
    if matrix.shape[0] == 0:
        return SubspaceBasis.full(matrix.shape[1])
    return SubspaceBasis(la.null_space(matrix))


def E_minus(
    profile: Profile,
    zeta: Frequency,
    coefficients: ProfileCoefficients | None = None,
    stats: IntegrationStats | None = None,
) -> SubspaceBasis:
    """Decaying solutions at z = 0, seeded by the stable subspace of G(infinity, zeta)."""
    linear = linearized_system(profile, zeta, coefficients)
    return _carry(linear, stable_subspace(linear.G_infinity), stats)


def evans(
    profile: Profile,
    bc: BoundaryOperator,
    zeta: Frequency,
    coefficients: ProfileCoefficients | None = None,
) -> EvansEvaluation:
    linear = linearized_system(profile, zeta, coefficients)
    limit = linear.G_infinity
    stats = IntegrationStats()
    decaying = _carry(linear, stable_subspace(limit), stats)
    kernel = kernel_basis(linear.boundary_matrix(bc))
    if decaying.dim + kernel.dim != decaying.ambient_dim:
        raise DimensionMismatch(
            "decaying subspace dimension differs from the number of boundary conditions",
            dim=decaying.dim,
            Nb=bc.Nb,
            zeta=tuple(zeta.vector.tolist()),
        )
    value = oriented_det(decaying, kernel)
    conditioning = {
        "sigma_min": min_singular_value(np.hstack([decaying.columns, kernel.columns])),
        "gap": spectral_gap(la.eigvals(limit)),
        "steps": float(stats.steps),
        "smallest_step": stats.smallest_step,
    }
    return EvansEvaluation(zeta, value, decaying, kernel, conditioning)


def evans_polar_limit(
    profile: Profile,
    bc: BoundaryOperator,
    zeta_hat: Frequency,
    rho_ladder: Sequence[float] = DEFAULT_LADDER,
    coefficients: ProfileCoefficients | None = None,
) -> tuple[float, float]:
    """|D(zeta_hat, rho)| extrapolated to rho = 0, with the largest ladder difference."""
    hat = zeta_hat.hat
    if coefficients is None and not profile.is_constant:
        coefficients = ProfileCoefficients.from_profile(profile)
    values = [evans(profile, bc, hat.scaled(rho), coefficients).modulus for rho in rho_ladder]
    extrapolate, residual = extrapolate_ladder(rho_ladder, values)
    evans_logger.debug(f"polar limit along {np.round(hat.vector, 6).tolist()}: {extrapolate:.6g} (residual {residual:.3g})")
    return max(extrapolate, 0.0), residual


def evans_winding(
    profile: Profile,
    bc: BoundaryOperator,
    contour: ContourSpec,
    coefficients: ProfileCoefficients | None = None,
) -> tuple[int, np.ndarray]:
    """Zeros of D enclosed by a closed lambda contour at fixed eta.

    The stable subspace of G(infinity) is continued along the contour, each
    basis is carried to z = 0 and paired with a fixed kernel basis; the phase
    of the unitary factor between the first and last basis closes the loop.
    """
    if coefficients is None and not profile.is_constant:
        coefficients = ProfileCoefficients.from_profile(profile)
    eta = np.asarray(contour.eta, dtype=float)
    systems = [LinearizedSystem(profile, lam, eta, coefficients) for lam in contour.lambdas()]
    bases = transport_along([linear.G_infinity for linear in systems], parameters=contour.parameters())
    kernel = kernel_basis(systems[0].boundary_matrix(bc))
    values = np.array([oriented_det(_carry(linear, basis), kernel) for linear, basis in zip(systems, bases)])
    closure = float(np.angle(np.linalg.det(bases[0].columns.conj().T @ bases[-1].columns))) if bases[0].dim else 0.0
    winding = winding_number(values, closure)
    evans_logger.info(f"winding {winding} on |lambda - {contour.center:.4g}| = {contour.radius:g}")
    return winding, values


__all__ = ["DEFAULT_LADDER", "E_minus", "evans", "evans_polar_limit", "evans_winding", "kernel_basis"]
