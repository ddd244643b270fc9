"""Dense linear algebra and ODE kernels shared by every layerlab module."""

from .linalg import (
    SubspaceBasis,
    extrapolate_ladder,
    invariant_subspace,
    min_singular_value,
    numerical_rank,
    oriented_det,
    polar_orthonormalize,
    spectral_projector,
    stable_subspace,
    subspace_det,
    subspace_distance,
    transport_along,
    transport_basis,
    winding_number,
)
from .newton import finite_difference_jacobian, newton_solve
from .ode import IntegrationStats, integrate_subspace, shoot

__all__ = [
    "IntegrationStats",
    "SubspaceBasis",
    "extrapolate_ladder",
    "finite_difference_jacobian",
    "integrate_subspace",
    "invariant_subspace",
    "min_singular_value",
    "newton_solve",
    "numerical_rank",
    "oriented_det",
    "polar_orthonormalize",
    "shoot",
    "spectral_projector",
    "stable_subspace",
    "subspace_det",
    "subspace_distance",
    "transport_along",
    "transport_basis",
    "winding_number",
]
