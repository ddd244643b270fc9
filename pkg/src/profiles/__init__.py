"""Layer profiles, stable-manifold charts and transversality."""

from .chart import ProfileChart, chart_overlap_residual, select_coordinates, solve_profile_bc, trace_jacobian
from .equations import profile_residual, profile_rhs
from .manifold import (
    StableManifoldChart,
    connection_interval,
    constant_profile,
    decay_estimate,
    default_chart_radius,
    fit_decay_rate,
    geometric_grid,
    phi_stable_manifold,
    small_amplitude_family,
)
from .models import Profile, TransversalityReport
from .transversality import transversality_general, transversality_matrix, transversality_small

__all__ = [
    "Profile",
    "ProfileChart",
    "StableManifoldChart",
    "TransversalityReport",
    "chart_overlap_residual",
    "connection_interval",
    "constant_profile",
    "decay_estimate",
    "default_chart_radius",
    "fit_decay_rate",
    "geometric_grid",
    "phi_stable_manifold",
    "profile_residual",
    "profile_rhs",
    "select_coordinates",
    "small_amplitude_family",
    "solve_profile_bc",
    "trace_jacobian",
    "transversality_general",
    "transversality_matrix",
    "transversality_small",
]
