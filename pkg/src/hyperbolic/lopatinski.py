"""Frozen hyperbolic symbol H(p, zeta) and the Lopatinski determinant."""

from __future__ import annotations

import numpy as np
import scipy.linalg as la
from scipy.optimize import minimize

from src.batch import GridEvaluator
from src.core.errors import Characteristic
from src.core.logging import get_logger, performance_monitor
from src.evans.models import Frequency
from src.numerics import SubspaceBasis, stable_subspace, subspace_det, transport_along
from src.systems import BlockSystem

from .models import LopPoint, LopReport, ResidualBC

lop_logger = get_logger("hyperbolic")

GAMMA_START = 1e-4
CONTINUATION_SAMPLES = 16
CHARACTERISTIC_COND = 1e12
ETA_DIRECTIONS = 8


def H_matrix(system: BlockSystem, p: np.ndarray, zeta: Frequency) -> np.ndarray:
    """-A_d^-1 ((i tau + gamma) A0 + sum_j i eta_j A_j) at the frozen state p."""
    state = system.require_domain(p)
    normal = system.A_normal(state)
    if np.linalg.cond(normal) > CHARACTERISTIC_COND:
        raise Characteristic("normal flux matrix is singular at the frozen state", state=tuple(state.tolist()))
    matrix = zeta.lam * system.A0(state) + 0j
    for j, eta in enumerate(zeta.eta):
        matrix = matrix + 1j * eta * system.A(state, j)
    return -la.solve(normal, matrix)


def stable_H(system: BlockSystem, p: np.ndarray, zeta: Frequency) -> SubspaceBasis:
    """E_-(H(p, zeta)); on gamma = 0 the gamma -> 0+ limit by continuation."""
    start = GAMMA_START * max(zeta.magnitude, 1.0)
    if zeta.gamma >= start:
        return stable_subspace(H_matrix(system, p, zeta))
    gammas = np.linspace(start, zeta.gamma, CONTINUATION_SAMPLES)
    path = [H_matrix(system, p, Frequency(zeta.tau, gamma, zeta.eta)) for gamma in gammas]
    return transport_along(path, parameters=gammas)[-1]


def lopatinski(system: BlockSystem, residual: ResidualBC, zeta: Frequency) -> float:
    """|det(E_-(H), ker Gamma_res)| with orthonormal bases; 1 when the kernel is trivial."""
    if residual.tangent.shape[1] == 0:
        return 1.0
    stable = stable_H(system, residual.state, zeta)
    return subspace_det(stable, SubspaceBasis(residual.tangent.astype(complex)))


def _eta_directions(m: int) -> list[np.ndarray]:
    """Unit tangential directions: +-1 when m = 1, else a fixed circle-like set."""
    if m == 1:
        return [np.ones(1)]
    directions = []
    for index in range(ETA_DIRECTIONS):
        angle = 2.0 * np.pi * index / ETA_DIRECTIONS
        vector = np.zeros(m)
        vector[0], vector[1] = np.cos(angle), np.sin(angle)
        directions.append(vector)
    return directions


def _snap(gamma: float) -> float:
    return float(gamma) if gamma > 1e-12 else 0.0


def hemisphere_grid(d: int, size: int = 64) -> list[Frequency]:
    """Unit frequencies (cos phi cos theta, cos phi sin theta, sin phi e) with theta in [0, pi].

    For d = 2 the tangential sign is carried by phi in [-pi/2, pi/2]; for
    d > 2 phi runs over [0, pi/2] and e over a fixed set of directions.
    """
    m = d - 1
    thetas = np.linspace(0.0, np.pi, size)
    if m == 0:
        return [Frequency(np.cos(theta), _snap(np.sin(theta)), ()) for theta in thetas]
    phis = np.linspace(-np.pi / 2, np.pi / 2, size) if m == 1 else np.linspace(0.0, np.pi / 2, size)
    points = []
    for direction in _eta_directions(m):
        for phi in phis:
            for theta in thetas:
                points.append(
                    Frequency(
                        np.cos(phi) * np.cos(theta),
                        _snap(np.cos(phi) * np.sin(theta)),
                        tuple(np.sin(phi) * direction),
                    )
                )
    return points


def equator_point(x: np.ndarray, d: int) -> Frequency:
    """gamma = 0 unit frequency from angles (alpha, psi_1, ...)."""
    alpha = float(x[0])
    m = d - 1
    if m == 0:
        return Frequency(np.sign(np.cos(alpha)) or 1.0, 0.0, ())
    direction = np.ones(1)
    if m > 1:
        direction = np.zeros(m)
        direction[0], direction[1] = np.cos(x[1]), np.sin(x[1])
    return Frequency(np.cos(alpha), 0.0, tuple(np.sin(alpha) * direction))


def _equator_angles(zeta: Frequency) -> np.ndarray:
    eta = zeta.eta_vector
    size = float(np.linalg.norm(eta))
    alpha = np.arctan2(size if eta.size != 1 else float(eta[0]), zeta.tau)
    if eta.size > 1:
        return np.array([alpha, np.arctan2(eta[1], eta[0])])
    return np.array([alpha])


def refine_on_equator(system: BlockSystem, residual: ResidualBC, start: Frequency) -> LopPoint:
    """Nelder-Mead minimization of |D_Lop| along gamma = 0 from a grid witness."""
    d = system.d

    def objective(x: np.ndarray) -> float:
        try:
            return lopatinski(system, residual, equator_point(x, d))
        except Exception:
            return float("inf")

    if d == 1:
        frequency = equator_point(np.zeros(1), d)
        return LopPoint(-1, frequency, value=objective(np.zeros(1)))
    result = minimize(objective, _equator_angles(start), method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 2000})
    frequency = equator_point(result.x, d)
    if not np.isfinite(result.fun):
        return LopPoint(-1, frequency, error="NoConvergence", error_message=str(result.message))
    lop_logger.debug(f"equator refinement reached |D_Lop| = {result.fun:.3e} after {result.nit} iterations")
    return LopPoint(-1, frequency, value=float(result.fun))


@performance_monitor("hyperbolic.lopatinski_scan")
def lopatinski_scan(
    system: BlockSystem,
    residual: ResidualBC,
    grid: int = 64,
    *,
    jobs: int = 1,
    floor: float = 1e-8,
    refine: bool = True,
) -> LopReport:
    frequencies = hemisphere_grid(system.d, grid)
    lop_logger.info(f"{system.name}: Lopatinski scan over {len(frequencies)} hemisphere points")
    results = GridEvaluator(jobs).map_ordered(frequencies, lambda zeta: lopatinski(system, residual, zeta))
    points = tuple(
        LopPoint(result.index, result.item, value=result.value)
        if result.succeeded
        else LopPoint(result.index, result.item, error=result.error_code, error_message=result.error_message)
        for result in results
    )
    report = LopReport(system.name, system.d, residual, points, None, floor, grid)
    witness = report.witness
    if refine and witness is not None and residual.tangent.shape[1]:
        refined = refine_on_equator(system, residual, witness.frequency)
        report = LopReport(system.name, system.d, residual, points, refined, floor, grid)
    lop_logger.info(f"{system.name}: min |D_Lop| = {report.minimum}, {len(report.failures)} failed points")
    return report


__all__ = [
    "H_matrix",
    "equator_point",
    "hemisphere_grid",
    "lopatinski",
    "lopatinski_scan",
    "refine_on_equator",
    "stable_H",
]
