"""Linearized eigenvalue equations about a layer in first-order form.

About the profile w(z) and at frequency zeta the Laplace-Fourier transformed
linearized system reads

    B_dd U'' = cA U' + cM U,

    cA = A_d - (B_dd)' - C[B_dd] - sum_k i eta_k (B_dk + B_kd),
    cM = lambda A0 + sum_j i eta_j A_j + sum_jk eta_j eta_k B_jk
         + C[A_d] - C[B_dd]' - sum_k i eta_k ((B_dk)' + C[B_kd]),

where C[M] is the matrix with columns (d M / d w_l) w' and a prime is d/dz
along the profile.  With U = (u1, u2, u3), u3 = u2', the system becomes
U' = G(z, zeta) U.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.interpolate import CubicSpline

from src.core.logging import get_logger
from src.profiles.equations import directional_derivative
from src.profiles.models import Profile
from src.systems import BlockSystem, BoundaryOperator, boundary_operator_eval, invert_block

from .models import Frequency

linear_logger = get_logger("evans")

STENCIL_STEP = 1e-2
COUPLING_STEP = 1e-6

MatrixField = Callable[[np.ndarray], np.ndarray]


def coupling_matrix(matrix: MatrixField, state: np.ndarray, slope: np.ndarray) -> np.ndarray:
    """C[M](w, w') with columns (d M / d w_l)(w) w'."""
    n = state.size
    columns = []
    for index in range(n):
        h = COUPLING_STEP * max(1.0, abs(float(state[index])))
        step = np.zeros(n)
        step[index] = h
        derivative = (np.asarray(matrix(state + step), dtype=float) - np.asarray(matrix(state - step), dtype=float)) / (2.0 * h)
        columns.append(derivative @ slope)
    return np.column_stack(columns)


def stencil_derivative(func: Callable[[float], np.ndarray], z: float, z_max: float, step: float = STENCIL_STEP) -> np.ndarray:
    """Fourth-order difference of ``func`` at z; one-sided near the ends of [0, z_max]."""
    if z - 2.0 * step < 0.0:
        sign = 1.0
    elif z + 2.0 * step > z_max:
        sign = -1.0
    else:
        return (-func(z + 2 * step) + 8 * func(z + step) - 8 * func(z - step) + func(z - 2 * step)) / (12.0 * step)
    h = sign * step
    values = [func(z + index * h) for index in range(5)]
    return (-25 * values[0] + 48 * values[1] - 36 * values[2] + 16 * values[3] - 3 * values[4]) / (12.0 * h)


@dataclass(frozen=True, eq=False)
class ProfileCoefficients:
    """Frequency-independent terms of the linearization, splined over the profile grid.

    Built once per profile and shared by every frequency evaluated on it.
    """

    profile: Profile
    tables: dict[str, CubicSpline] = field(default_factory=dict)

    @classmethod
    def from_profile(cls, profile: Profile) -> "ProfileCoefficients":
        system = profile.system
        if profile.is_constant:
            return cls(profile, {})
        last = system.d - 1
        normal = lambda j: (lambda u: system.B(u, last, j))  # noqa: E731
        transposed = lambda j: (lambda u: system.B(u, j, last))  # noqa: E731
        A_d = lambda u: system.A(u, last)  # noqa: E731

        def c_bdd(z: float) -> np.ndarray:
            return coupling_matrix(normal(last), profile.state_at(z), profile.derivative_at(z))

        samples: dict[str, list[np.ndarray]] = {}
        for z in profile.grid:
            state, slope = profile.state_at(z), profile.derivative_at(z)
            entries = {
                "C_Ad": coupling_matrix(A_d, state, slope),
                "C_Bdd": coupling_matrix(normal(last), state, slope),
                "dB_dd": directional_derivative(normal(last), state, slope),
                "dC_Bdd": stencil_derivative(c_bdd, float(z), profile.z_max),
            }
            for k in range(last):
                entries[f"dB_d{k}"] = directional_derivative(normal(k), state, slope)
                entries[f"C_B{k}d"] = coupling_matrix(transposed(k), state, slope)
            for name, value in entries.items():
                samples.setdefault(name, []).append(value)
        tables = {name: CubicSpline(profile.grid, np.array(values), axis=0) for name, values in samples.items()}
        linear_logger.debug(f"tabulated {len(tables)} coefficient fields on {profile.grid.size} nodes")
        return cls(profile, tables)

    def at(self, name: str, z: float) -> np.ndarray:
        n = self.profile.system.N
        if name not in self.tables:
            return np.zeros((n, n))
        return np.asarray(self.tables[name](min(max(float(z), 0.0), self.profile.z_max)), dtype=float)


@dataclass(frozen=True, eq=False)
class LinearizedSystem:
    """U' = G(z) U at fixed (lambda, eta); lambda may leave the closed right half plane."""

    profile: Profile
    lam: complex
    eta: np.ndarray
    coefficients: ProfileCoefficients | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "lam", complex(self.lam))
        object.__setattr__(self, "eta", np.asarray(self.eta, dtype=float).reshape(self.profile.system.d - 1))

    @property
    def system(self) -> BlockSystem:
        return self.profile.system

    @property
    def dimension(self) -> int:
        return self.system.N + self.system.Nprime

    def coefficient_matrices(self, z: float | None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(B_dd, cA, cM) at z; ``None`` means the endstate."""
        system, eta = self.system, self.eta
        last = system.d - 1
        at_infinity = z is None or self.coefficients is None or self.profile.is_constant
        w = self.profile.endstate if z is None else self.profile.state_at(z)
        term = (lambda name: np.zeros((system.N, system.N))) if at_infinity else (lambda name: self.coefficients.at(name, z))  # noqa: E731

        b_dd = system.B(w, last, last)
        script_a = system.A(w, last) - term("dB_dd") - term("C_Bdd") + 0j
        script_m = self.lam * system.A0(w) + term("C_Ad") - term("dC_Bdd") + 0j
        for k in range(last):
            script_a = script_a - 1j * eta[k] * (system.B(w, last, k) + system.B(w, k, last))
            script_m = script_m + 1j * eta[k] * system.A(w, k) - 1j * eta[k] * (term(f"dB_d{k}") + term(f"C_B{k}d"))
            for j in range(last):
                script_m = script_m + eta[j] * eta[k] * system.B(w, j, k)
        return b_dd, script_a, script_m

    def _assemble(self, z: float | None) -> np.ndarray:
        system = self.system
        n1, n2 = system.n1, system.Nprime
        b_dd, script_a, script_m = self.coefficient_matrices(z)
        a11, a12, a21, a22 = system.blocks(script_a)
        m11, m12, m21, m22 = system.blocks(script_m)
        script_b = invert_block(system.blocks(b_dd)[3], "B22_nu")
        if n1:
            g1 = -invert_block(a11, "A11_nu") @ np.hstack([m11, m12, a12])
        else:
            g1 = np.zeros((0, system.N + n2), dtype=complex)
        g2 = np.hstack([np.zeros((n2, system.N)), np.eye(n2)])
        g3 = script_b @ (a21 @ g1 + np.hstack([m21, m22, a22]))
        return np.vstack([g1, g2, g3]).astype(complex)

    def G(self, z: float) -> np.ndarray:
        return self._assemble(float(z))

    @property
    def G_infinity(self) -> np.ndarray:
        return self._assemble(None)

    def boundary_matrix(self, bc: BoundaryOperator) -> np.ndarray:
        """Gamma(zeta) at the boundary values (w(0), dw2/dz(0))."""
        U0 = np.concatenate([self.profile.w[0], self.profile.w2z[0]])
        _, gamma = boundary_operator_eval(self.system, bc, U0, self.eta)
        return gamma


def linearized_system(
    profile: Profile,
    zeta: Frequency,
    coefficients: ProfileCoefficients | None = None,
) -> LinearizedSystem:
    if coefficients is None and not profile.is_constant:
        coefficients = ProfileCoefficients.from_profile(profile)
    return LinearizedSystem(profile, zeta.lam, zeta.eta_vector, coefficients)


__all__ = [
    "LinearizedSystem",
    "ProfileCoefficients",
    "coupling_matrix",
    "linearized_system",
    "stencil_derivative",
]
