"""Layer profiles and transversality reports."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from src.core.errors import DimensionMismatch
from src.systems import BlockSystem, invert_block

CONSTANT_TOL = 1e-13
RANK_TOL = 1e-8


def _floats(values: Any) -> list[float]:
    return [float(x) for x in np.asarray(values, dtype=float).ravel()]


def _finite_or_none(value: float) -> float | None:
    return float(value) if np.isfinite(value) else None


@dataclass(frozen=True, eq=False)
class Profile:
    """A computed layer w(z), z >= 0, on a graded grid.

    ``w`` holds one state per grid node and ``w2z`` the parabolic derivative
    dw2/dz.  Between nodes the parabolic variables are interpolated by cubic
    Hermite splines and the hyperbolic ones are recovered from the integrated
    profile relations.
    """

    system: BlockSystem
    nu: np.ndarray
    grid: np.ndarray
    w: np.ndarray
    w2z: np.ndarray
    endstate: np.ndarray
    decay_rate: float
    amplitude: np.ndarray = field(default_factory=lambda: np.zeros(0))
    boundary_data: tuple[np.ndarray, np.ndarray] | None = None

    def __post_init__(self) -> None:
        grid = np.asarray(self.grid, dtype=float)
        w = np.asarray(self.w, dtype=float)
        w2z = np.asarray(self.w2z, dtype=float)
        n, n2 = self.system.N, self.system.Nprime
        if grid.ndim != 1 or grid.size < 2 or grid[0] != 0.0 or np.any(np.diff(grid) <= 0.0):
            raise ValueError("profile grid must increase strictly from z = 0")
        if w.shape != (grid.size, n) or w2z.shape != (grid.size, n2):
            raise DimensionMismatch("profile arrays do not match the grid", w=w.shape, w2z=w2z.shape, nodes=grid.size)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "w2z", w2z)
        object.__setattr__(self, "endstate", self.system.state(self.endstate))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float))
        object.__setattr__(self, "amplitude", np.asarray(self.amplitude, dtype=float).ravel())
        object.__setattr__(self, "_spline", CubicHermiteSpline(grid, w[:, self.system.n1 :], w2z, axis=0))

    @property
    def z_max(self) -> float:
        return float(self.grid[-1])

    @property
    def is_constant(self) -> bool:
        return float(np.max(np.abs(self.w2z))) <= CONSTANT_TOL

    @property
    def decay_residual(self) -> float:
        """|w(Z_max) - q| + |w2z(Z_max)|."""
        return float(np.linalg.norm(self.w[-1] - self.endstate) + np.linalg.norm(self.w2z[-1]))

    def _parabolic(self, z: float) -> np.ndarray:
        return np.asarray(self._spline(min(max(float(z), 0.0), self.z_max)), dtype=float)

    def state_at(self, z: float) -> np.ndarray:
        if self.is_constant:
            return self.endstate.copy()
        reduction = self.system.reduction
        if reduction is None:
            return np.concatenate([self.w[0, : self.system.n1], self._parabolic(z)])
        return np.asarray(reduction.recover(self._parabolic(z), self.endstate), dtype=float)

    def parabolic_derivative_at(self, z: float) -> np.ndarray:
        if self.is_constant:
            return np.zeros(self.system.Nprime)
        if self.system.reduction is None:
            return np.asarray(self._spline(min(max(float(z), 0.0), self.z_max), 1), dtype=float)
        return np.asarray(self.system.reduction.rhs(self._parabolic(z), self.endstate), dtype=float)

    def derivative_at(self, z: float) -> np.ndarray:
        """Full dw/dz; the hyperbolic part follows from A11 w1' + A12 w2' = 0."""
        w2p = self.parabolic_derivative_at(z)
        n1 = self.system.n1
        if n1 == 0 or not np.any(w2p):
            return np.concatenate([np.zeros(n1), w2p])
        a11, a12, _, _ = self.system.blocks(self.system.A_normal(self.state_at(z)))
        return np.concatenate([-invert_block(a11, "A11_nu") @ a12 @ w2p, w2p])

    def columns(self) -> list[str]:
        names = self.system.names
        return ["z", *names, *(f"d{name}/dz" for name in names[self.system.n1 :])]

    def rows(self) -> list[list[float]]:
        return [[float(z), *_floats(state), *_floats(slope)] for z, state, slope in zip(self.grid, self.w, self.w2z)]

    def to_dict(self) -> dict[str, Any]:
        return {
            "system": self.system.name,
            "nu": _floats(self.nu),
            "endstate": _floats(self.endstate),
            "decay_rate": _finite_or_none(self.decay_rate),
            "z_max": self.z_max,
            "nodes": int(self.grid.size),
            "amplitude": _floats(self.amplitude),
            "boundary_state": _floats(self.w[0]),
            "decay_residual": self.decay_residual,
        }


@dataclass(frozen=True)
class TransversalityReport:
    """Injectivity of Gamma on decaying solutions and its rank on bounded ones."""

    condition_i: bool
    condition_ii: bool
    rank_i: int
    rank_ii: int
    sigma_min_i: float
    sigma_min_ii: float
    dim_S: int
    dim_S0: int
    Nb: int
    method: str

    @property
    def transversal(self) -> bool:
        return self.condition_i and self.condition_ii

    def to_dict(self) -> dict[str, Any]:
        return {
            "transversal": self.transversal,
            "condition_i": self.condition_i,
            "condition_ii": self.condition_ii,
            "rank_i": self.rank_i,
            "rank_ii": self.rank_ii,
            "sigma_min_i": _finite_or_none(self.sigma_min_i),
            "sigma_min_ii": _finite_or_none(self.sigma_min_ii),
            "dim_S": self.dim_S,
            "dim_S0": self.dim_S0,
            "Nb": self.Nb,
            "method": self.method,
        }


__all__ = ["CONSTANT_TOL", "RANK_TOL", "Profile", "TransversalityReport"]
