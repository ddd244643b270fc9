"""Residual boundary conditions, Lopatinski scan and dissipativity records."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg as la

from src.core.errors import DimensionMismatch
from src.evans.models import Frequency

ANNIHILATOR_TOL = 1e-10


def _floats(values: Any) -> list[float]:
    return [float(x) for x in np.asarray(values, dtype=float).ravel()]


def _matrix(values: np.ndarray) -> list[list[float]]:
    return [_floats(row) for row in np.atleast_2d(values)]


@dataclass(frozen=True, eq=False)
class ResidualBC:
    """Linearized residual hyperbolic boundary condition at an endstate p.

    ``tangent`` has orthonormal columns spanning the tangent space of the
    endstate manifold, ``annihilator`` orthonormal rows with that kernel.
    """

    system_name: str
    state: np.ndarray
    nu: np.ndarray
    tangent: np.ndarray
    annihilator: np.ndarray
    method: str = "linear"

    def __post_init__(self) -> None:
        tangent = np.asarray(self.tangent, dtype=float)
        rows = np.asarray(self.annihilator, dtype=float)
        n = np.asarray(self.state).size
        tangent = tangent.reshape(n, -1)
        rows = rows.reshape(-1, n)
        if tangent.shape[1] + rows.shape[0] != n:
            raise DimensionMismatch("tangent space and annihilator do not split the state space", tangent=tangent.shape, annihilator=rows.shape)
        if tangent.size and rows.size and np.max(np.abs(rows @ tangent)) > ANNIHILATOR_TOL:
            raise ValueError("annihilator does not vanish on the tangent space")
        object.__setattr__(self, "tangent", tangent)
        object.__setattr__(self, "annihilator", rows)
        object.__setattr__(self, "state", np.asarray(self.state, dtype=float))
        object.__setattr__(self, "nu", np.asarray(self.nu, dtype=float))

    @classmethod
    def from_tangent(cls, system_name: str, state: np.ndarray, nu: np.ndarray, vectors: np.ndarray, method: str) -> "ResidualBC":
        tangent = la.orth(np.asarray(vectors, dtype=float)) if np.asarray(vectors).size else np.zeros((len(state), 0))
        complement = la.null_space(tangent.T) if tangent.shape[1] else np.eye(len(state))
        return cls(system_name, state, nu, tangent, _canonical_rows(complement.T), method)

    @classmethod
    def from_annihilator(cls, system_name: str, state: np.ndarray, nu: np.ndarray, rows: np.ndarray, method: str = "given") -> "ResidualBC":
        matrix = np.atleast_2d(np.asarray(rows, dtype=float))
        tangent = la.null_space(matrix) if matrix.size else np.eye(len(state))
        return cls(system_name, state, nu, tangent, _canonical_rows(la.orth(matrix.T).T if matrix.size else matrix), method)

    @property
    def Nplus(self) -> int:
        return int(self.annihilator.shape[0])

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "residual_bc",
            "system": self.system_name,
            "state": _floats(self.state),
            "nu": _floats(self.nu),
            "tangent_basis": _matrix(self.tangent.T) if self.tangent.size else [],
            "annihilator": _matrix(self.annihilator) if self.annihilator.size else [],
            "Nplus": self.Nplus,
            "method": self.method,
        }


def _canonical_rows(rows: np.ndarray) -> np.ndarray:
    """Orthonormal rows with the first nonzero entry of each row positive."""
    matrix = np.atleast_2d(np.asarray(rows, dtype=float))
    if matrix.shape[0] == 1:
        row = matrix[0]
        pivot = int(np.argmax(np.abs(row) > 1e-12))
        return matrix * np.sign(row[pivot])
    return matrix


@dataclass(frozen=True)
class LopPoint:
    index: int
    frequency: Frequency
    value: float | None = None
    error: str | None = None
    error_message: str | None = None

    @property
    def succeeded(self) -> bool:
        return self.error is None

    def row(self, d: int) -> list[Any]:
        eta = list(self.frequency.eta) + [0.0] * (d - 1 - len(self.frequency.eta))
        return [self.frequency.tau, self.frequency.gamma, *eta, self.value, self.error or ""]


@dataclass(frozen=True)
class LopReport:
    """|D_Lop| on the unit hemisphere; scale invariance makes |zeta| = 1 enough."""

    system: str
    d: int
    residual: ResidualBC
    points: tuple[LopPoint, ...]
    refined: LopPoint | None = None
    floor: float = 1e-8
    grid: int = 64

    @property
    def witness(self) -> LopPoint | None:
        candidates = [point for point in self.points if point.succeeded and point.value is not None]
        if self.refined is not None and self.refined.succeeded:
            candidates.append(self.refined)
        return min(candidates, key=lambda point: point.value) if candidates else None

    @property
    def minimum(self) -> float | None:
        witness = self.witness
        return None if witness is None else witness.value

    @property
    def failures(self) -> list[LopPoint]:
        return [point for point in self.points if not point.succeeded]

    @property
    def failure_fraction(self) -> float:
        return len(self.failures) / len(self.points) if self.points else 0.0

    @property
    def violation(self) -> bool:
        return self.minimum is not None and self.minimum <= self.floor

    def columns(self) -> list[str]:
        return ["tau", "gamma", *(f"eta{j + 1}" for j in range(self.d - 1)), "lopatinski", "error"]

    def rows(self) -> list[list[Any]]:
        return [point.row(self.d) for point in self.points]

    def to_dict(self) -> dict[str, Any]:
        witness = self.witness
        return {
            "kind": "lop_scan",
            "system": self.system,
            "grid": self.grid,
            "floor": self.floor,
            "points": len(self.points),
            "failed": len(self.failures),
            "failure_fraction": self.failure_fraction,
            "minimum": self.minimum,
            "witness": None if witness is None else witness.frequency.to_dict(),
            "refined": self.refined is not None and self.refined.succeeded,
            "empty_kernel_convention": "|D_Lop| = 1 when the residual condition has trivial kernel",
            "failure_classes": sorted({point.error for point in self.failures if point.error}),
            "residual_bc": self.residual.to_dict(),
            "violation": self.violation,
        }


@dataclass(frozen=True)
class DissipativityReport:
    """Largest eigenvalue of the symmetrized normal flux restricted to ker Gamma_res."""

    dissipative: bool
    max_eigenvalue: float
    form: np.ndarray

    def to_dict(self) -> dict[str, Any]:
        return {
            "dissipative": self.dissipative,
            "max_eigenvalue": self.max_eigenvalue if np.isfinite(self.max_eigenvalue) else None,
            "form": _matrix(self.form) if self.form.size else [],
        }


__all__ = ["DissipativityReport", "LopPoint", "LopReport", "ResidualBC"]
