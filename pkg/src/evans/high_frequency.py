"""High-frequency Evans analysis with the parabolic weight Lambda.

The rescaling J = diag((1 + gamma)^1/2, Lambda^1/2, Lambda^-1/2) acting on
(u1, u2, u3) turns the Evans function into D_sc, which for large |zeta|
decouples into a hyperbolic factor D1 (frozen at w(0)) and a parabolic
factor D2.  Nonvanishing of the parabolic factor on the sphere
tau^2 + gamma^2 + |eta|^4 = 1 is the high-frequency Evans condition.
"""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from src.core.errors import DimensionMismatch
from src.numerics import SubspaceBasis, stable_subspace, subspace_det, subspace_distance, transport_along
from src.profiles.models import Profile
from src.systems import BlockSystem, BoundaryOperator, invert_block

from .evans import evans, evans_logger, kernel_basis
from .linearized import ProfileCoefficients
from .models import Frequency, HighFrequencyEvaluation

GAMMA_START = 1e-4
CONTINUATION_SAMPLES = 16


def scaling_matrix(system: BlockSystem, zeta: Frequency) -> np.ndarray:
    weight = zeta.parabolic_weight
    n1, n2 = system.n1, system.Nprime
    return np.diag(
        np.concatenate(
            [
                np.full(n1, np.sqrt(1.0 + zeta.gamma)),
                np.full(n2, np.sqrt(weight)),
                np.full(n2, 1.0 / np.sqrt(weight)),
            ]
        )
    )


def hyperbolic_block(system: BlockSystem, state: np.ndarray, zeta: Frequency) -> np.ndarray:
    """-(A_d^11)^-1 (lambda A0^11 + sum_j i eta_j A_j^11) at the frozen state."""
    last = system.d - 1
    matrix = zeta.lam * system.blocks(system.A0(state))[0] + 0j
    for j, eta in enumerate(zeta.eta):
        matrix = matrix + 1j * eta * system.blocks(system.A(state, j))[0]
    return -invert_block(system.blocks(system.A(state, last))[0], "A11_nu") @ matrix


def incoming_subspace(system: BlockSystem, state: np.ndarray, zeta: Frequency) -> SubspaceBasis:
    """Stable subspace of the hyperbolic block; near gamma = 0 the gamma -> 0+ limit by transport."""
    start = GAMMA_START * max(zeta.magnitude, 1.0)
    if zeta.gamma >= start:
        return stable_subspace(hyperbolic_block(system, state, zeta))
    gammas = np.linspace(start, zeta.gamma, CONTINUATION_SAMPLES)
    path = [hyperbolic_block(system, state, Frequency(zeta.tau, gamma, zeta.eta)) for gamma in gammas]
    if not np.any(np.linalg.eigvals(path[0]).real < 0.0):
        return SubspaceBasis.empty(system.n1)
    return transport_along(path, parameters=gammas)[-1]


def parabolic_block(system: BlockSystem, state: np.ndarray, zeta: Frequency) -> np.ndarray:
    """Principal parabolic part at frozen coefficients, acting on (u2, u3)."""
    last, n2 = system.d - 1, system.Nprime
    part = lambda matrix: system.blocks(matrix)[3]  # noqa: E731
    zeroth = zeta.lam * part(system.A0(state)) + 0j
    first = np.zeros((n2, n2), dtype=complex)
    for k, eta_k in enumerate(zeta.eta):
        first = first - 1j * eta_k * part(system.B(state, last, k) + system.B(state, k, last))
        for j, eta_j in enumerate(zeta.eta):
            zeroth = zeroth + eta_j * eta_k * part(system.B(state, j, k))
    inverse = invert_block(part(system.B(state, last, last)), "B22_nu")
    return np.block([[np.zeros((n2, n2)), np.eye(n2)], [inverse @ zeroth, inverse @ first]])


def parabolic_boundary(system: BlockSystem, bc: BoundaryOperator, state: np.ndarray, zeta: Frequency) -> np.ndarray:
    """Rows (Upsilon2' u2, K_nu u3 + Lambda^-1 i K_T(eta) u2) of the rescaled boundary matrix."""
    n1, n2 = system.n1, system.Nprime
    rows = []
    if bc.g2.size:
        rows.append(np.hstack([np.asarray(bc.upsilon2_jac(state[n1:]), dtype=complex), np.zeros((bc.g2.size, n2))]))
    if bc.Ndoubleprime:
        tangential = 1j * bc.tangential(zeta.eta_vector, n2) / zeta.parabolic_weight
        rows.append(np.hstack([tangential, bc.K_nu.astype(complex)]))
    return np.vstack(rows) if rows else np.zeros((0, 2 * n2), dtype=complex)


def _hyperbolic_factor(system: BlockSystem, bc: BoundaryOperator, state: np.ndarray, zeta: Frequency) -> float:
    if system.n1 == 0:
        return 1.0
    incoming = incoming_subspace(system, state, zeta)
    jacobian = np.asarray(bc.upsilon1_jac(state[: system.n1]), dtype=complex).reshape(bc.N1plus, system.n1)
    return subspace_det(incoming, kernel_basis(jacobian))


def parabolic_stable(system: BlockSystem, state: np.ndarray, zeta: Frequency) -> SubspaceBasis:
    """Rescaled decaying subspace of the frozen parabolic block."""
    n2 = system.Nprime
    weight = zeta.parabolic_weight
    decaying = stable_subspace(parabolic_block(system, state, zeta))
    scale = np.diag(np.concatenate([np.full(n2, np.sqrt(weight)), np.full(n2, 1.0 / np.sqrt(weight))]))
    return SubspaceBasis.from_columns(scale @ decaying.columns)


def _parabolic_factor(system: BlockSystem, bc: BoundaryOperator, state: np.ndarray, zeta: Frequency) -> float:
    return subspace_det(parabolic_stable(system, state, zeta), kernel_basis(parabolic_boundary(system, bc, state, zeta)))


def d2_on_sphere(profile: Profile, bc: BoundaryOperator, zeta: Frequency) -> float:
    """|d2| at the parabolic projection of zeta."""
    return _parabolic_factor(profile.system, bc, profile.w[0], zeta.parabolic_projection())


def rescaled_evans_hf(
    profile: Profile,
    bc: BoundaryOperator,
    zeta: Frequency,
    coefficients: ProfileCoefficients | None = None,
) -> HighFrequencyEvaluation:
    system = profile.system
    state = profile.w[0]
    evaluation = evans(profile, bc, zeta, coefficients)
    scale = scaling_matrix(system, zeta)
    Dsc = subspace_det(
        SubspaceBasis.from_columns(scale @ evaluation.E_minus.columns),
        SubspaceBasis.from_columns(scale @ evaluation.kernel_basis.columns),
    )
    D1 = _hyperbolic_factor(system, bc, state, zeta)
    D2 = _parabolic_factor(system, bc, state, zeta)
    return HighFrequencyEvaluation(zeta, Dsc, D1, D2, d2_on_sphere(profile, bc, zeta))


def decoupled_subspace(profile: Profile, zeta: Frequency) -> SubspaceBasis:
    """Frozen hyperbolic stable subspace plus the rescaled parabolic one, embedded in (u1, u2, u3)."""
    system = profile.system
    n1, n2 = system.n1, system.Nprime
    state = profile.w[0]
    blocks = []
    if n1:
        incoming = incoming_subspace(system, state, zeta)
        blocks.append(np.vstack([incoming.columns, np.zeros((2 * n2, incoming.dim))]))
    parabolic = parabolic_stable(system, state, zeta)
    blocks.append(np.vstack([np.zeros((n1, parabolic.dim)), parabolic.columns]))
    return SubspaceBasis(np.hstack(blocks))


def hf_tracking_check(
    profile: Profile,
    bc: BoundaryOperator,
    ray: Frequency,
    magnitudes: Sequence[float],
    coefficients: ProfileCoefficients | None = None,
) -> list[float]:
    """Principal-angle distance of J E_minus from the decoupled frozen subspaces along a ray."""
    sizes = [float(value) for value in magnitudes]
    if any(later <= earlier for earlier, later in zip(sizes, sizes[1:])):
        raise ValueError("tracking magnitudes must increase")
    if coefficients is None and not profile.is_constant:
        coefficients = ProfileCoefficients.from_profile(profile)
    hat = ray.hat
    distances = []
    for size in sizes:
        zeta = hat.scaled(size)
        evaluation = evans(profile, bc, zeta, coefficients)
        scaled = SubspaceBasis.from_columns(scaling_matrix(profile.system, zeta) @ evaluation.E_minus.columns)
        frozen = decoupled_subspace(profile, zeta)
        if frozen.dim != scaled.dim:
            raise DimensionMismatch("decoupled subspaces do not match the decaying subspace", dims=(frozen.dim, scaled.dim))
        distances.append(subspace_distance(scaled, frozen))
    evans_logger.debug(f"tracking distances {np.round(distances, 8).tolist()} at |zeta| = {sizes}")
    return distances


__all__ = [
    "d2_on_sphere",
    "decoupled_subspace",
    "hf_tracking_check",
    "hyperbolic_block",
    "incoming_subspace",
    "parabolic_block",
    "parabolic_boundary",
    "parabolic_stable",
    "rescaled_evans_hf",
    "scaling_matrix",
]
