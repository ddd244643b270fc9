"""Frozen symbols, characteristic counts and the profile matrix G_nu."""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

from src.core.errors import Characteristic, DimensionMismatch, NumericalError
from src.numerics import stable_subspace

from .models import BlockSystem, BoundaryOperator, CharCounts, MhdSpeeds, SymbolEvaluation, invert_block

CHARACTERISTIC_TOL = 1e-9


def _direction(system: BlockSystem, xi: np.ndarray | None) -> np.ndarray:
    if xi is None:
        return system.normal
    direction = np.asarray(xi, dtype=float)
    if direction.shape != (system.d,):
        raise DimensionMismatch(f"direction must have {system.d} components", shape=direction.shape)
    return direction


def mhd_speeds(system: BlockSystem, u: np.ndarray, xi: np.ndarray) -> MhdSpeeds:
    """Characteristic speeds relative to the flow in the unit direction xi/|xi|.

    c_f^2, c_s^2 = (c^2 + |v|^2 +- sqrt((c^2 - |v|^2)^2 + 4 b^2 c^2)) / 2 with
    v = H/sqrt(rho) and b = |xi_hat x v|.
    """
    rho, H = u[0], u[1:4]
    # the MHD symmetrizer starts with c^2/rho
    c2 = float(system.S(u)[0, 0] * rho) if system.S is not None else 0.0
    xi_hat = np.asarray(xi, dtype=float) / np.linalg.norm(xi)
    v = H / np.sqrt(rho)
    v2 = float(v @ v)
    b = float(np.linalg.norm(np.cross(xi_hat, v)))
    radical = np.sqrt((c2 - v2) ** 2 + 4.0 * b * b * c2)
    fast = np.sqrt(max(0.5 * (c2 + v2 + radical), 0.0))
    slow = np.sqrt(max(0.5 * (c2 + v2 - radical), 0.0))
    return MhdSpeeds(c=float(np.sqrt(c2)), v=v, b=b, alfven=float(abs(v @ xi_hat)), slow=float(slow), fast=float(fast))


def eval_bars(system: BlockSystem, u: np.ndarray, xi: np.ndarray) -> SymbolEvaluation:
    """Abar = A0^-1 sum xi_j A_j, Bbar = A0^-1 sum xi_j xi_k B_jk and the sorted speeds."""
    state = system.require_domain(u)
    direction = _direction(system, xi)
    a0 = system.A0(state)
    abar = la.solve(a0, system.A_xi(state, direction))
    bbar = la.solve(a0, system.B_xi(state, direction))
    speeds = np.sort(la.eigvals(abar).real)
    mhd = None
    if system.name == "mhd" and np.linalg.norm(direction) > 0.0:
        mhd = mhd_speeds(system, state, direction)
    return SymbolEvaluation(Abar=abar, Bbar=bbar, speeds=speeds, mhd=mhd)


def G_nu(system: BlockSystem, q: np.ndarray, nu: np.ndarray | None = None) -> np.ndarray:
    """(B22_nu)^-1 (A22_nu - A21_nu (A11_nu)^-1 A12_nu) at q."""
    state = system.state(q)
    direction = _direction(system, nu)
    a11, a12, a21, a22 = system.blocks(system.A_xi(state, direction))
    b22 = system.blocks(system.B_xi(state, direction))[3]
    inner = a22 - a21 @ invert_block(a11, "A11_nu") @ a12 if system.n1 else a22
    return invert_block(b22, "B22_nu") @ inner


def _count_positive(matrix: np.ndarray, what: str, scale: float) -> int:
    if matrix.size == 0:
        return 0
    eigenvalues = la.eigvals(matrix)
    closest = float(np.min(np.abs(eigenvalues)))
    if closest < CHARACTERISTIC_TOL * max(1.0, scale):
        raise Characteristic(f"{what} has an eigenvalue at zero", smallest=closest)
    return int(np.count_nonzero(eigenvalues.real > 0.0))


def counts(system: BlockSystem, bc: BoundaryOperator | None, u: np.ndarray, nu: np.ndarray | None = None) -> CharCounts:
    """N+, N1+, N2- and Nb at a noncharacteristic state."""
    state = system.require_domain(u)
    direction = _direction(system, nu)
    abar = la.solve(system.A0(state), system.A_xi(state, direction))
    scale = float(np.max(np.abs(abar))) if abar.size else 1.0
    n_plus = _count_positive(abar, "Abar_nu", scale)
    a0_11 = system.blocks(system.A0(state))[0]
    a11 = system.blocks(system.A_xi(state, direction))[0]
    n1_plus = _count_positive(la.solve(a0_11, a11), "Abar11_nu", scale) if system.n1 else 0
    n2_minus = stable_subspace(G_nu(system, state, direction)).dim
    nb = system.Nprime + n1_plus
    if bc is not None and bc.N1plus != n1_plus:
        raise DimensionMismatch("boundary operator prescribes the wrong number of hyperbolic data", expected=n1_plus, got=bc.N1plus)
    if n_plus + n2_minus != nb:
        raise NumericalError("characteristic counts violate N+ + N2- = Nb", Nplus=n_plus, N2minus=n2_minus, Nb=nb)
    return CharCounts(Nplus=n_plus, N1plus=n1_plus, N2minus=n2_minus, Nb=nb)


__all__ = ["CHARACTERISTIC_TOL", "G_nu", "counts", "eval_bars", "mhd_speeds"]
