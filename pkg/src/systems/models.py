"""Hyperbolic-parabolic block systems, boundary operators and audit records."""

from __future__ import annotations

from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from src.core.errors import BadParams, DimensionMismatch, DomainViolation, SingularBlock

MatrixOfState = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class ProfileReduction:
    """Integrated form of the profile equation of a builtin model.

    The conserved quantities are algebraic constraints fixed by the endstate
    ``q``: ``rhs(X, q)`` is the right side of X' = F(X; q) for the parabolic
    variables X = w2, and ``recover(X, q)`` rebuilds the full state w.
    """

    rhs: Callable[[np.ndarray, np.ndarray], np.ndarray]
    recover: Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class BlockSystem:
    """A_0 u_t + sum_j A_j u_j = sum_jk (B_jk u_k)_j with u = (u1, u2).

    ``A(u, j)`` and ``B(u, j, k)`` use zero-based space indices; the boundary
    normal is the last coordinate, z = x_d.
    """

    name: str
    N: int
    Nprime: int
    d: int
    names: tuple[str, ...]
    A0: MatrixOfState
    A: Callable[[np.ndarray, int], np.ndarray]
    B: Callable[[np.ndarray, int, int], np.ndarray]
    S: MatrixOfState | None = None
    domain: Callable[[np.ndarray], bool] = lambda u: bool(np.all(np.isfinite(u)))
    params: Mapping[str, float] = field(default_factory=dict)
    reduction: ProfileReduction | None = None
    critical_directions: Callable[[np.ndarray], list[np.ndarray]] | None = None

    def __post_init__(self) -> None:
        if not 0 < self.Nprime <= self.N:
            raise ValueError(f"parabolic block size must lie in 1..N, got {self.Nprime}")
        if len(self.names) != self.N:
            raise ValueError("one coordinate label per state component is required")
        if self.d < 1:
            raise ValueError("space dimension must be positive")

    @property
    def n1(self) -> int:
        """Size of the hyperbolic block u1."""
        return self.N - self.Nprime

    @property
    def normal(self) -> np.ndarray:
        nu = np.zeros(self.d)
        nu[-1] = 1.0
        return nu

    def state(self, values: Any) -> np.ndarray:
        u = np.asarray(values, dtype=float)
        if u.shape != (self.N,):
            raise DimensionMismatch(f"{self.name} states have {self.N} components", shape=u.shape)
        return u

    def require_domain(self, u: np.ndarray) -> np.ndarray:
        state = self.state(u)
        if not self.domain(state):
            raise DomainViolation(f"state outside the {self.name} domain", state=tuple(state.tolist()))
        return state

    def A_xi(self, u: np.ndarray, xi: np.ndarray) -> np.ndarray:
        return sum(float(xi[j]) * self.A(u, j) for j in range(self.d))

    def B_xi(self, u: np.ndarray, xi: np.ndarray) -> np.ndarray:
        total = np.zeros((self.N, self.N))
        for j in range(self.d):
            for k in range(self.d):
                if xi[j] != 0.0 and xi[k] != 0.0:
                    total = total + float(xi[j] * xi[k]) * self.B(u, j, k)
        return total

    def A_normal(self, u: np.ndarray) -> np.ndarray:
        return self.A(u, self.d - 1)

    def B_normal(self, u: np.ndarray) -> np.ndarray:
        return self.B(u, self.d - 1, self.d - 1)

    def blocks(self, matrix: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """Split an N x N matrix into its (u1, u2) blocks."""
        n1 = self.n1
        return matrix[:n1, :n1], matrix[:n1, n1:], matrix[n1:, :n1], matrix[n1:, n1:]


def invert_block(matrix: np.ndarray, block: str, cond_limit: float = 1e12) -> np.ndarray:
    """Inverse of a coefficient block; empty blocks invert to empty blocks."""
    if matrix.size == 0:
        return np.zeros(matrix.shape[::-1], dtype=matrix.dtype)
    if not np.all(np.isfinite(matrix)) or np.linalg.cond(matrix) > cond_limit:
        raise SingularBlock(f"{block} is singular", block=block)
    return np.linalg.inv(matrix)


@dataclass(frozen=True, eq=False)
class BoundaryOperator:
    """Upsilon = (Upsilon1(u1), Upsilon2(u2), K_nu du2/dnu + sum_j K_j du2/dx_j)."""

    name: str
    N1plus: int
    Ndoubleprime: int
    upsilon1: Callable[[np.ndarray], np.ndarray]
    upsilon1_jac: Callable[[np.ndarray], np.ndarray]
    upsilon2: Callable[[np.ndarray], np.ndarray]
    upsilon2_jac: Callable[[np.ndarray], np.ndarray]
    K_nu: np.ndarray
    K_T: Callable[[np.ndarray], np.ndarray] | None = None
    g1: np.ndarray = field(default_factory=lambda: np.zeros(0))
    g2: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        k_nu = np.asarray(self.K_nu, dtype=float)
        if k_nu.ndim != 2:
            raise BadParams("K_nu must be a 2-D matrix", shape=k_nu.shape)
        object.__setattr__(self, "K_nu", k_nu)
        object.__setattr__(self, "g1", np.asarray(self.g1, dtype=float).ravel())
        object.__setattr__(self, "g2", np.asarray(self.g2, dtype=float).ravel())
        if self.g1.size != self.N1plus:
            raise BadParams(f"{self.name}: g1 needs {self.N1plus} components", found=self.g1.size)
        if k_nu.shape[0] != self.Ndoubleprime:
            raise BadParams(f"{self.name}: K_nu needs one row per Neumann-type condition", rows=k_nu.shape[0])
        if self.Ndoubleprime and np.linalg.matrix_rank(k_nu) != self.Ndoubleprime:
            raise BadParams(f"{self.name}: K_nu must have maximal rank", rank=int(np.linalg.matrix_rank(k_nu)))
        # K_nu has N' columns; the remaining N' - N'' conditions belong to Upsilon2
        if k_nu.shape[1] and self.g2.size != k_nu.shape[1] - self.Ndoubleprime:
            raise BadParams(
                f"{self.name}: g2 needs N' - N'' = {k_nu.shape[1] - self.Ndoubleprime} components",
                found=self.g2.size,
            )

    @property
    def Nb(self) -> int:
        return self.N1plus + int(self.g2.size) + self.Ndoubleprime

    def require_full_rank(self, u1: np.ndarray, u2: np.ndarray) -> None:
        """Upsilon1'(u1) and Upsilon2'(u2) must have full row rank."""
        for label, jacobian, rows, point in (
            ("Upsilon1'", self.upsilon1_jac, self.N1plus, u1),
            ("Upsilon2'", self.upsilon2_jac, int(self.g2.size), u2),
        ):
            if not rows:
                continue
            matrix = np.atleast_2d(np.asarray(jacobian(np.asarray(point, dtype=float)), dtype=float))
            if matrix.shape[0] != rows:
                raise BadParams(f"{self.name}: {label} needs {rows} rows", shape=matrix.shape)
            rank = int(np.linalg.matrix_rank(matrix))
            if rank != rows:
                raise BadParams(f"{self.name}: {label} must have full rank", rank=rank, rows=rows)

    @classmethod
    def linear(
        cls,
        name: str,
        select1: np.ndarray,
        select2: np.ndarray,
        K_nu: np.ndarray,
        g1: np.ndarray | None = None,
        g2: np.ndarray | None = None,
        K_T: Callable[[np.ndarray], np.ndarray] | None = None,
    ) -> "BoundaryOperator":
        """Boundary operator whose Upsilon1, Upsilon2 are constant matrices."""
        m1 = np.atleast_2d(np.asarray(select1, dtype=float))
        m2 = np.atleast_2d(np.asarray(select2, dtype=float))
        k = np.asarray(K_nu, dtype=float)
        k = k.reshape(1, -1) if k.ndim == 1 else k
        return cls(
            name=name,
            N1plus=m1.shape[0] if m1.size else 0,
            Ndoubleprime=k.shape[0] if k.size else 0,
            upsilon1=lambda u1, m=m1: m @ u1 if m.size else np.zeros(0),
            upsilon1_jac=lambda u1, m=m1: m,
            upsilon2=lambda u2, m=m2: m @ u2 if m.size else np.zeros(0),
            upsilon2_jac=lambda u2, m=m2: m,
            K_nu=k,
            K_T=K_T,
            g1=np.zeros(m1.shape[0] if m1.size else 0) if g1 is None else g1,
            g2=np.zeros(m2.shape[0] if m2.size else 0) if g2 is None else g2,
        )

    def with_data(self, g1: np.ndarray, g2: np.ndarray) -> "BoundaryOperator":
        return BoundaryOperator(
            name=self.name,
            N1plus=self.N1plus,
            Ndoubleprime=self.Ndoubleprime,
            upsilon1=self.upsilon1,
            upsilon1_jac=self.upsilon1_jac,
            upsilon2=self.upsilon2,
            upsilon2_jac=self.upsilon2_jac,
            K_nu=self.K_nu,
            K_T=self.K_T,
            g1=np.asarray(g1, dtype=float),
            g2=np.asarray(g2, dtype=float),
        )

    def data_from_state(self, system: BlockSystem, state: np.ndarray) -> "BoundaryOperator":
        """Boundary data g making the constant layer at ``state`` exact."""
        u = system.state(state)
        self.require_full_rank(u[: system.n1], u[system.n1 :])
        return self.with_data(self.upsilon1(u[: system.n1]), self.upsilon2(u[system.n1 :]))

    def tangential(self, eta: np.ndarray, nprime: int) -> np.ndarray:
        if self.K_T is None:
            return np.zeros((self.Ndoubleprime, nprime))
        return np.asarray(self.K_T(np.asarray(eta, dtype=float)), dtype=float).reshape(self.Ndoubleprime, nprime)


@dataclass(frozen=True)
class CharCounts:
    Nplus: int
    N1plus: int
    N2minus: int
    Nb: int

    def __post_init__(self) -> None:
        if self.Nplus + self.N2minus != self.Nb:
            raise ValueError("characteristic counts violate N+ + N2- = Nb")

    def to_dict(self) -> dict[str, int]:
        return {"Nplus": self.Nplus, "N1plus": self.N1plus, "N2minus": self.N2minus, "Nb": self.Nb}


@dataclass(frozen=True, eq=False)
class MhdSpeeds:
    """Sound, Alfven, slow and fast speeds of isentropic MHD in direction xi."""

    c: float
    v: np.ndarray
    b: float
    alfven: float
    slow: float
    fast: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "c": self.c,
            "v": [float(x) for x in self.v],
            "b": self.b,
            "alfven": self.alfven,
            "slow": self.slow,
            "fast": self.fast,
        }


@dataclass(frozen=True, eq=False)
class SymbolEvaluation:
    Abar: np.ndarray
    Bbar: np.ndarray
    speeds: np.ndarray
    mhd: MhdSpeeds | None = None


def _finite_or_none(value: float) -> float | None:
    number = float(value)
    return number if np.isfinite(number) else None


class AuditStatus(Enum):
    PASS = "pass"
    FAIL = "fail"
    INDETERMINATE = "indeterminate"
    ADVISORY = "advisory"


@dataclass(frozen=True)
class HypothesisResult:
    """Outcome of one structural hypothesis over all samples."""

    name: str
    status: AuditStatus
    measured: Mapping[str, float]
    witness_state: tuple[float, ...] | None = None
    witness_direction: tuple[float, ...] | None = None
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status is AuditStatus.PASS

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "status": self.status.value,
            "measured": {key: _finite_or_none(value) for key, value in sorted(self.measured.items())},
            "witness_state": list(self.witness_state) if self.witness_state is not None else None,
            "witness_direction": list(self.witness_direction) if self.witness_direction is not None else None,
            "note": self.note,
        }


@dataclass(frozen=True)
class AuditReport:
    system: str
    sample_count: int
    direction_count: int
    results: tuple[HypothesisResult, ...]

    def result(self, name: str) -> HypothesisResult:
        for item in self.results:
            if item.name == name:
                return item
        raise KeyError(name)

    def passed(self, requested: tuple[str, ...] | None = None) -> bool:
        names = requested or tuple(item.name for item in self.results if item.status is not AuditStatus.ADVISORY)
        return all(self.result(name).passed for name in names)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "audit",
            "system": self.system,
            "sample_count": self.sample_count,
            "direction_count": self.direction_count,
            "passed": self.passed(),
            "hypotheses": [item.to_dict() for item in self.results],
        }


__all__ = [
    "AuditReport",
    "AuditStatus",
    "BlockSystem",
    "BoundaryOperator",
    "CharCounts",
    "HypothesisResult",
    "MhdSpeeds",
    "ProfileReduction",
    "SymbolEvaluation",
    "invert_block",
]
