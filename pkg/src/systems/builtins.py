"""Builtin models: isentropic and full Navier-Stokes, isentropic MHD and test systems.

Coefficients are flux Jacobians of the conservative system written in the
primitive unknowns, so the integrated profile relations are exact first
integrals.  MHD uses the symmetrizable nonconservative form with
A_0 = diag(1, I_3, rho I_3).  The boundary normal is always the last axis.
"""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.core.errors import BadParams
from src.core.logging import get_logger

from .models import BlockSystem, BoundaryOperator, ProfileReduction

BoundaryTemplate = Callable[[np.ndarray], BoundaryOperator]

model_logger = get_logger("systems")


@dataclass(frozen=True)
class GammaLaw:
    """P(rho) = kp * rho**gamma."""

    gamma: float = 5.0 / 3.0
    kp: float = 1.0

    def pressure(self, rho: float) -> float:
        return self.kp * rho**self.gamma

    def sound_speed_sq(self, rho: float) -> float:
        return self.kp * self.gamma * rho ** (self.gamma - 1.0)


@dataclass(frozen=True, eq=False)
class CallbackPressure:
    """User pressure law; P' by central differences when not supplied."""

    law: Callable[[float], float]
    derivative: Callable[[float], float] | None = None

    def pressure(self, rho):
        return np.asarray(self.law(rho), dtype=float)

    def sound_speed_sq(self, rho):
        if self.derivative is not None:
            return np.asarray(self.derivative(rho), dtype=float)
        h = 1e-6 * np.maximum(1.0, np.abs(rho))
        return (np.asarray(self.law(rho + h)) - np.asarray(self.law(rho - h))) / (2.0 * h)


PARAMETER_DEFAULTS: dict[str, dict[str, Any]] = {
    "isentropic_ns": {"gamma": 5.0 / 3.0, "pressure_coeff": 1.0, "mu": 1.0, "eta": 0.0, "pressure": None, "pressure_derivative": None},
    "full_ns": {"gamma": 5.0 / 3.0, "gas_constant": 1.0, "mu": 1.0, "eta": 0.0, "kappa": 1.0},
    "mhd": {"gamma": 5.0 / 3.0, "pressure_coeff": 1.0, "mu": 1.0, "eta": 0.0, "pressure": None, "pressure_derivative": None},
    "scalar": {"speed": -1.0, "tangential_speed": 0.0},
    "counterexample": {"a": 2.0, "b": 3.0},
}


def _resolve(model_id: str, params: Mapping[str, Any] | None) -> dict[str, Any]:
    defaults = PARAMETER_DEFAULTS[model_id]
    supplied = {key: value for key, value in (params or {}).items() if value is not None}
    unknown = sorted(set(supplied) - set(defaults))
    if unknown:
        raise BadParams(f"unknown parameters for {model_id}", keys=tuple(unknown))
    return {**defaults, **supplied}


def _check_viscosity(mu: float, eta: float) -> None:
    if not mu > abs(eta) >= 0.0:
        raise BadParams("viscosities must satisfy mu > |eta|", mu=mu, eta=eta)


def _equation_of_state(values: Mapping[str, Any]) -> GammaLaw | CallbackPressure:
    if values.get("pressure") is not None:
        return CallbackPressure(values["pressure"], values.get("pressure_derivative"))
    gamma, kp = float(values["gamma"]), float(values["pressure_coeff"])
    if gamma < 1.0 or kp <= 0.0:
        raise BadParams("gamma-law needs gamma >= 1 and a positive coefficient", gamma=gamma, pressure_coeff=kp)
    return GammaLaw(gamma, kp)


def _check_index(j: int, d: int) -> None:
    if not 0 <= j < d:
        raise IndexError(f"space index {j} outside 0..{d - 1}")


def viscosity_tensor(mu: float, eta: float, d: int) -> np.ndarray:
    """V[j, k, i, l] of the Newtonian stress mu(du_i/dx_j + du_j/dx_i) + eta div u delta_ij."""
    eye = np.eye(d)
    return (
        mu * np.einsum("jk,il->jkil", eye, eye)
        + mu * np.einsum("ik,jl->jkil", eye, eye)
        + eta * np.einsum("ij,kl->jkil", eye, eye)
    )


def _euler_rows(rho: float, w: np.ndarray, j: int, p_rho: float) -> np.ndarray:
    """Mass and momentum rows of d f_j / d(rho, w) for f_j = (rho w_j, rho w w_j + p e_j)."""
    d = w.size
    rows = np.zeros((d + 1, d + 1))
    rows[0, 0] = w[j]
    rows[0, 1 + j] = rho
    for i in range(d):
        rows[1 + i, 0] = w[i] * w[j] + (p_rho if i == j else 0.0)
        rows[1 + i, 1 + i] += rho * w[j]
        rows[1 + i, 1 + j] += rho * w[i]
    return rows


def _isentropic_ns(values: dict[str, Any]) -> BlockSystem:
    eos = _equation_of_state(values)
    mu, eta = float(values["mu"]), float(values["eta"])
    _check_viscosity(mu, eta)
    nu = 2.0 * mu + eta
    tensor = viscosity_tensor(mu, eta, 2)

    def A0(u: np.ndarray) -> np.ndarray:
        rho, vx, vy = u
        return np.array([[1.0, 0.0, 0.0], [vx, rho, 0.0], [vy, 0.0, rho]])

    def A(u: np.ndarray, j: int) -> np.ndarray:
        _check_index(j, 2)
        return _euler_rows(u[0], u[1:], j, eos.sound_speed_sq(u[0]))

    def B(u: np.ndarray, j: int, k: int) -> np.ndarray:
        matrix = np.zeros((3, 3))
        matrix[1:, 1:] = tensor[j, k]
        return matrix

    def S(u: np.ndarray) -> np.ndarray:
        rho = u[0]
        return np.diag([eos.sound_speed_sq(rho) / rho**2, 1.0, 1.0]) @ np.linalg.inv(A0(u))

    def rhs(X: np.ndarray, q: np.ndarray) -> np.ndarray:
        m = q[0] * q[2]
        rho = m / X[1]
        return np.array(
            [
                m * (X[0] - q[1]) / mu,
                (m * (X[1] - q[2]) + eos.pressure(rho) - eos.pressure(q[0])) / nu,
            ]
        )

    def recover(X: np.ndarray, q: np.ndarray) -> np.ndarray:
        return np.array([q[0] * q[2] / X[1], X[0], X[1]])

    return BlockSystem(
        name="isentropic_ns",
        N=3,
        Nprime=2,
        d=2,
        names=("rho", "u", "v"),
        A0=A0,
        A=A,
        B=B,
        S=S,
        domain=lambda u: bool(np.all(np.isfinite(u)) and u[0] > 0.0),
        params={"mu": mu, "eta": eta, "nu": nu, **({"gamma": eos.gamma, "pressure_coeff": eos.kp} if isinstance(eos, GammaLaw) else {})},
        reduction=ProfileReduction(rhs, recover),
    )


def _full_ns(values: dict[str, Any]) -> BlockSystem:
    gamma, R = float(values["gamma"]), float(values["gas_constant"])
    mu, eta, kappa = float(values["mu"]), float(values["eta"]), float(values["kappa"])
    _check_viscosity(mu, eta)
    if gamma <= 1.0 or R <= 0.0 or kappa <= 0.0:
        raise BadParams("full Navier-Stokes needs gamma > 1, R > 0 and kappa > 0", gamma=gamma, gas_constant=R, kappa=kappa)
    cv = R / (gamma - 1.0)
    nu = 2.0 * mu + eta
    tensor = viscosity_tensor(mu, eta, 2)

    def energy(u: np.ndarray) -> float:
        return cv * u[3] + 0.5 * (u[1] ** 2 + u[2] ** 2)

    def A0(u: np.ndarray) -> np.ndarray:
        rho, vx, vy, _ = u
        return np.array(
            [
                [1.0, 0.0, 0.0, 0.0],
                [vx, rho, 0.0, 0.0],
                [vy, 0.0, rho, 0.0],
                [energy(u), rho * vx, rho * vy, rho * cv],
            ]
        )

    def A(u: np.ndarray, j: int) -> np.ndarray:
        _check_index(j, 2)
        rho, w, T = u[0], u[1:3], u[3]
        p, p_rho, p_T = R * rho * T, R * T, R * rho
        E = energy(u)
        matrix = np.zeros((4, 4))
        matrix[:3, :3] = _euler_rows(rho, w, j, p_rho)
        matrix[1 + j, 3] = p_T
        matrix[3, 0] = w[j] * (E + p_rho)
        matrix[3, 1:3] = rho * w[j] * w
        matrix[3, 1 + j] += rho * E + p
        matrix[3, 3] = w[j] * (rho * cv + p_T)
        return matrix

    def B(u: np.ndarray, j: int, k: int) -> np.ndarray:
        matrix = np.zeros((4, 4))
        matrix[1:3, 1:3] = tensor[j, k]
        matrix[3, 1:3] = u[1:3] @ tensor[j, k]
        matrix[3, 3] = kappa if j == k else 0.0
        return matrix

    def S(u: np.ndarray) -> np.ndarray:
        rho, T = u[0], u[3]
        return np.diag([R / rho, rho / T, rho / T, rho * cv / T**2]) @ np.linalg.inv(A0(u))

    def rhs(X: np.ndarray, q: np.ndarray) -> np.ndarray:
        m = q[0] * q[2]
        vx, vy, T = X
        p = R * m / vy * T
        p_inf = R * q[0] * q[3]
        return np.array(
            [
                m * (vx - q[1]) / mu,
                (m * (vy - q[2]) + p - p_inf) / nu,
                (
                    m * cv * (T - q[3])
                    - 0.5 * m * (vx - q[1]) ** 2
                    - 0.5 * m * (vy - q[2]) ** 2
                    + p_inf * (vy - q[2])
                )
                / kappa,
            ]
        )

    def recover(X: np.ndarray, q: np.ndarray) -> np.ndarray:
        return np.array([q[0] * q[2] / X[1], X[0], X[1], X[2]])

    return BlockSystem(
        name="full_ns",
        N=4,
        Nprime=3,
        d=2,
        names=("rho", "u", "v", "T"),
        A0=A0,
        A=A,
        B=B,
        S=S,
        domain=lambda u: bool(np.all(np.isfinite(u)) and u[0] > 0.0 and u[3] > 0.0),
        params={"gamma": gamma, "gas_constant": R, "cv": cv, "mu": mu, "eta": eta, "nu": nu, "kappa": kappa},
        reduction=ProfileReduction(rhs, recover),
    )


def _mhd(values: dict[str, Any]) -> BlockSystem:
    eos = _equation_of_state(values)
    mu, eta = float(values["mu"]), float(values["eta"])
    _check_viscosity(mu, eta)
    nu = 2.0 * mu + eta
    tensor = viscosity_tensor(mu, eta, 3)

    def A0(u: np.ndarray) -> np.ndarray:
        return np.diag([1.0, 1.0, 1.0, 1.0, u[0], u[0], u[0]])

    def A(u: np.ndarray, j: int) -> np.ndarray:
        _check_index(j, 3)
        rho, H, w = u[0], u[1:4], u[4:7]
        c2 = eos.sound_speed_sq(rho)
        matrix = np.zeros((7, 7))
        matrix[0, 0] = w[j]
        matrix[0, 4 + j] = rho
        for i in range(3):
            matrix[1 + i, 1 + i] += w[j]
            matrix[1 + i, 4 + j] += H[i]
            matrix[1 + i, 4 + i] -= H[j]
            matrix[4 + i, 4 + i] += rho * w[j]
            matrix[4 + i, 1 + i] -= H[j]
        matrix[4 + j, 0] += c2
        matrix[4 + j, 1:4] += H
        return matrix

    def B(u: np.ndarray, j: int, k: int) -> np.ndarray:
        matrix = np.zeros((7, 7))
        matrix[4:, 4:] = tensor[j, k]
        return matrix

    def S(u: np.ndarray) -> np.ndarray:
        return np.diag([eos.sound_speed_sq(u[0]) / u[0], 1.0, 1.0, 1.0, 1.0, 1.0, 1.0])

    def invariants(q: np.ndarray) -> tuple[float, float, float, float]:
        rho, H, w = q[0], q[1:4], q[4:7]
        return rho * w[2], H[0] * w[2] - w[0] * H[2], H[1] * w[2] - w[1] * H[2], H[2]

    def recover(X: np.ndarray, q: np.ndarray) -> np.ndarray:
        m, alpha, beta, h3 = invariants(q)
        normal_field = np.full_like(np.asarray(X[2], dtype=float), h3)
        return np.array([m / X[2], (alpha + X[0] * h3) / X[2], (beta + X[1] * h3) / X[2], normal_field, X[0], X[1], X[2]])

    def rhs(X: np.ndarray, q: np.ndarray) -> np.ndarray:
        m, _, _, h3 = invariants(q)
        w = recover(X, q)
        return np.array(
            [
                (m * (X[0] - q[4]) - h3 * (w[1] - q[1])) / mu,
                (m * (X[1] - q[5]) - h3 * (w[2] - q[2])) / mu,
                (
                    m * (X[2] - q[6])
                    + eos.pressure(w[0])
                    - eos.pressure(q[0])
                    + 0.5 * (w[1] ** 2 - q[1] ** 2)
                    + 0.5 * (w[2] ** 2 - q[2] ** 2)
                )
                / nu,
            ]
        )

    def critical_directions(u: np.ndarray) -> list[np.ndarray]:
        H = u[1:4]
        size = float(np.linalg.norm(H))
        if size == 0.0:
            return []
        along = H / size
        helper = np.eye(3)[int(np.argmin(np.abs(along)))]
        across = np.cross(along, helper)
        return [along, across / np.linalg.norm(across)]

    return BlockSystem(
        name="mhd",
        N=7,
        Nprime=3,
        d=3,
        names=("rho", "H1", "H2", "H3", "u1", "u2", "u3"),
        A0=A0,
        A=A,
        B=B,
        S=S,
        domain=lambda u: bool(np.all(np.isfinite(u)) and u[0] > 0.0),
        params={"mu": mu, "eta": eta, "nu": nu, **({"gamma": eos.gamma, "pressure_coeff": eos.kp} if isinstance(eos, GammaLaw) else {})},
        reduction=ProfileReduction(rhs, recover),
        critical_directions=critical_directions,
    )


def _scalar(values: dict[str, Any]) -> BlockSystem:
    a, b = float(values["speed"]), float(values["tangential_speed"])
    if a == 0.0:
        raise BadParams("the normal speed of the scalar model must be nonzero", speed=a)

    def A(u: np.ndarray, j: int) -> np.ndarray:
        _check_index(j, 2)
        return np.array([[b if j == 0 else a]])

    return BlockSystem(
        name="scalar",
        N=1,
        Nprime=1,
        d=2,
        names=("u",),
        A0=lambda u: np.eye(1),
        A=A,
        B=lambda u, j, k: np.eye(1) if j == k else np.zeros((1, 1)),
        S=lambda u: np.eye(1),
        params={"speed": a, "tangential_speed": b},
        reduction=ProfileReduction(lambda X, q: a * (X - q), lambda X, q: np.array(X, dtype=float)),
    )


def _counterexample(values: dict[str, Any]) -> BlockSystem:
    a, b = float(values["a"]), float(values["b"])
    if not (b > 0.0 and b - a * a < 0.0):
        raise BadParams("the counterexample needs b > 0 and b - a^2 < 0", a=a, b=b)
    coefficients = (np.array([[0.0, 1.0], [1.0, 0.0]]), np.array([[1.0, a], [a, b]]))
    viscosity = np.diag([0.0, 1.0])

    def A(u: np.ndarray, j: int) -> np.ndarray:
        _check_index(j, 2)
        return coefficients[j]

    def rhs(X: np.ndarray, q: np.ndarray) -> np.ndarray:
        return (b - a * a) * (np.asarray(X) - q[1:])

    def recover(X: np.ndarray, q: np.ndarray) -> np.ndarray:
        return np.array([q[0] - a * (X[0] - q[1]), X[0]])

    return BlockSystem(
        name="counterexample",
        N=2,
        Nprime=1,
        d=2,
        names=("u1", "u2"),
        A0=lambda u: np.eye(2),
        A=A,
        B=lambda u, j, k: viscosity if j == k else np.zeros((2, 2)),
        S=lambda u: np.eye(2),
        params={"a": a, "b": b},
        reduction=ProfileReduction(rhs, recover),
    )


MODEL_BUILDERS: dict[str, Callable[[dict[str, Any]], BlockSystem]] = {
    "isentropic_ns": _isentropic_ns,
    "full_ns": _full_ns,
    "mhd": _mhd,
    "scalar": _scalar,
    "counterexample": _counterexample,
}


def is_inflow(system: BlockSystem, state: np.ndarray) -> bool:
    """True when A_nu^11 has only positive eigenvalues (incoming hyperbolic modes)."""
    if system.n1 == 0:
        return False
    a11 = system.blocks(system.A_normal(system.state(state)))[0]
    eigenvalues = np.linalg.eigvals(np.linalg.solve(system.blocks(system.A0(state))[0], a11))
    return bool(np.all(eigenvalues.real > 0.0))


def _selection(rows: list[int], size: int) -> np.ndarray:
    return np.eye(size)[rows] if rows else np.zeros((0, size))


def _template(system: BlockSystem, name: str, dirichlet: list[int], require: str | None = None) -> BoundaryTemplate:
    """Dirichlet on the listed parabolic coordinates, Neumann on the others."""
    neumann = [index for index in range(system.Nprime) if index not in dirichlet]

    def build(state: np.ndarray) -> BoundaryOperator:
        inflow = is_inflow(system, state)
        if require == "inflow" and not inflow:
            raise BadParams(f"template {name} needs an inflow state", state=tuple(np.asarray(state, dtype=float).tolist()))
        if require == "outflow" and not _all_outgoing(system, state):
            raise BadParams(f"template {name} needs an outflow state", state=tuple(np.asarray(state, dtype=float).tolist()))
        select1 = np.eye(system.n1) if inflow else np.zeros((0, system.n1))
        bc = BoundaryOperator.linear(
            name,
            select1,
            _selection(dirichlet, system.Nprime),
            _selection(neumann, system.Nprime),
        )
        return bc.data_from_state(system, state)

    return build


def _all_outgoing(system: BlockSystem, state: np.ndarray) -> bool:
    a11 = system.blocks(system.A_normal(system.state(state)))[0]
    eigenvalues = np.linalg.eigvals(np.linalg.solve(system.blocks(system.A0(state))[0], a11))
    return bool(np.all(eigenvalues.real < 0.0))


def builtin_templates(system: BlockSystem) -> dict[str, BoundaryTemplate]:
    everything = list(range(system.Nprime))
    templates = {
        "dirichlet": _template(system, "dirichlet", everything),
        "neumann": _template(system, "neumann", []),
    }
    if system.name in {"isentropic_ns", "full_ns", "mhd"}:
        tangential = list(range(system.d - 1))
        templates["outflow"] = _template(system, "outflow", everything, require="outflow")
        templates["mixed"] = _template(system, "mixed", tangential)
        templates["inflow_mixed"] = _template(system, "inflow_mixed", [], require="inflow")
    return templates


def make_builtin(model_id: str, params: Mapping[str, Any] | None = None) -> tuple[BlockSystem, dict[str, BoundaryTemplate]]:
    """Instantiate a builtin model and its boundary-operator templates.

    Templates map a boundary state to a BoundaryOperator whose data g make the
    constant layer at that state exact.
    """
    if model_id not in MODEL_BUILDERS:
        raise BadParams(f"unknown model {model_id!r}", known=tuple(sorted(MODEL_BUILDERS)))
    values = _resolve(model_id, params)
    system = MODEL_BUILDERS[model_id](values)
    model_logger.debug(f"built {model_id} with N={system.N}, N'={system.Nprime}, d={system.d}")
    return system, builtin_templates(system)


__all__ = [
    "BoundaryTemplate",
    "CallbackPressure",
    "GammaLaw",
    "MODEL_BUILDERS",
    "PARAMETER_DEFAULTS",
    "builtin_templates",
    "is_inflow",
    "make_builtin",
    "viscosity_tensor",
]
