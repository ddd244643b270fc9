"""Nonlinear boundary residual and its linearization Gamma(zeta)."""

from __future__ import annotations

import numpy as np

from src.core.errors import DimensionMismatch

from .models import BlockSystem, BoundaryOperator


def boundary_operator_eval(
    system: BlockSystem,
    bc: BoundaryOperator,
    U: np.ndarray,
    eta: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Residual (Upsilon1(u1) - g1, Upsilon2(u2) - g2, K_nu u3) and Gamma(zeta).

    ``U = (u1, u2, u3)`` with u3 = du2/dz.  Gamma acts on perturbations of U:
    rows (Upsilon1' u1, Upsilon2' u2, K_nu u3 + i K_T(eta) u2).
    """
    vector = np.asarray(U)
    n1, n2 = system.n1, system.Nprime
    if vector.shape != (system.N + n2,):
        raise DimensionMismatch(f"boundary values need {system.N + n2} components", shape=vector.shape)
    tangential = np.zeros(system.d - 1) if eta is None else np.asarray(eta, dtype=float)
    if tangential.shape != (system.d - 1,):
        raise DimensionMismatch(f"tangential frequency needs {system.d - 1} components", shape=tangential.shape)
    u1, u2, u3 = vector[:n1].real, vector[n1 : n1 + n2].real, vector[n1 + n2 :]
    bc.require_full_rank(u1, u2)
    residual = np.concatenate(
        [
            np.asarray(bc.upsilon1(u1), dtype=float) - bc.g1 if bc.N1plus else np.zeros(0),
            np.asarray(bc.upsilon2(u2), dtype=float) - bc.g2 if bc.g2.size else np.zeros(0),
            bc.K_nu @ u3 if bc.Ndoubleprime else np.zeros(0),
        ]
    )
    gamma = np.zeros((bc.Nb, system.N + n2), dtype=complex)
    rows = bc.N1plus
    if rows:
        gamma[:rows, :n1] = bc.upsilon1_jac(u1)
    if bc.g2.size:
        gamma[rows : rows + bc.g2.size, n1 : n1 + n2] = bc.upsilon2_jac(u2)
        rows += bc.g2.size
    if bc.Ndoubleprime:
        gamma[rows:, n1 : n1 + n2] = 1j * bc.tangential(tangential, n2)
        gamma[rows:, n1 + n2 :] = bc.K_nu
    return residual, gamma


__all__ = ["boundary_operator_eval"]
