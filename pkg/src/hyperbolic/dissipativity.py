"""Maximal dissipativity of residual boundary conditions."""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

from src.core.errors import NoSymmetrizer
from src.systems import BlockSystem

from .models import DissipativityReport, ResidualBC
from .residual import decaying_directions

DISSIPATIVE_TOL = 1e-10


def restricted_form_max(matrix: np.ndarray, basis: np.ndarray) -> float:
    """Largest eigenvalue of the symmetric part of ``matrix`` restricted to span(basis)."""
    columns = np.asarray(basis, dtype=float)
    if columns.ndim != 2 or columns.shape[1] == 0:
        return float("-inf")
    orthonormal = la.orth(columns)
    symmetric = 0.5 * (matrix + matrix.T)
    return float(np.max(la.eigvalsh(orthonormal.T @ symmetric @ orthonormal)))


def dissipative_subspace(A: np.ndarray, B: np.ndarray, N: np.ndarray) -> np.ndarray:
    """Orthonormal basis of E_-(A^-1 B) + (N intersected with ker B).

    With A symmetric and B symmetric semidefinite, A is negative definite on
    this sum whenever it is negative on N and N lies in ker B.
    """
    subspace = np.asarray(N, dtype=float)
    pieces = [decaying_directions(A, B)]
    if subspace.size:
        restricted = np.asarray(B, dtype=float) @ subspace
        pieces.append(subspace @ la.null_space(restricted))
    stacked = np.hstack(pieces)
    return la.orth(stacked) if stacked.size else stacked


def maximal_dissipativity(system: BlockSystem, residual: ResidualBC) -> DissipativityReport:
    """S A_nu negative definite on ker Gamma_res."""
    if system.S is None:
        raise NoSymmetrizer(f"{system.name} provides no symmetrizer")
    state = residual.state
    flux = system.S(state) @ system.A_normal(state)
    tangent = residual.tangent
    if tangent.shape[1] == 0:
        return DissipativityReport(True, float("-inf"), np.zeros((0, 0)))
    form = tangent.T @ (0.5 * (flux + flux.T)) @ tangent
    largest = float(np.max(la.eigvalsh(form)))
    return DissipativityReport(largest < -DISSIPATIVE_TOL, largest, form)


__all__ = ["dissipative_subspace", "maximal_dissipativity", "restricted_form_max"]
