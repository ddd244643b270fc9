"""Residual hyperbolic boundary conditions, Lopatinski determinants and dissipativity."""

from .counterexample import counterexample_system, lopatinski_witness
from .dissipativity import dissipative_subspace, maximal_dissipativity, restricted_form_max
from .lopatinski import H_matrix, hemisphere_grid, lopatinski, lopatinski_scan, stable_H
from .models import DissipativityReport, LopPoint, LopReport, ResidualBC
from .residual import decaying_directions, residual_tangent_space, tangent_agreement

__all__ = [
    "DissipativityReport",
    "H_matrix",
    "LopPoint",
    "LopReport",
    "ResidualBC",
    "counterexample_system",
    "decaying_directions",
    "dissipative_subspace",
    "hemisphere_grid",
    "lopatinski",
    "lopatinski_scan",
    "lopatinski_witness",
    "maximal_dissipativity",
    "residual_tangent_space",
    "restricted_form_max",
    "stable_H",
    "tangent_agreement",
]
