"""Frequencies, Evans evaluations and scan reports."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from src.numerics import SubspaceBasis

REGIMES = ("bounded", "polar", "sphere")


def _finite_or_none(value: float | None) -> float | None:
    if value is None or not np.isfinite(value):
        return None
    return float(value)


@dataclass(frozen=True)
class Frequency:
    """zeta = (tau, gamma, eta) with lambda = gamma + i tau and gamma >= 0."""

    tau: float
    gamma: float
    eta: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "gamma", float(self.gamma))
        object.__setattr__(self, "eta", tuple(float(value) for value in np.atleast_1d(np.asarray(self.eta, dtype=float))))
        if not self.gamma >= 0.0:
            raise ValueError(f"frequencies need gamma >= 0, got {self.gamma}")
        if not all(np.isfinite([self.tau, self.gamma, *self.eta])):
            raise ValueError("frequency components must be finite")

    @classmethod
    def zero(cls, d: int) -> "Frequency":
        return cls(0.0, 0.0, (0.0,) * (d - 1))

    @classmethod
    def polar(cls, hat: "Frequency", rho: float) -> "Frequency":
        return hat.scaled(rho)

    @classmethod
    def from_vector(cls, values: Sequence[float]) -> "Frequency":
        """(tau, gamma, eta_1, ..., eta_{d-1})."""
        array = np.asarray(values, dtype=float).ravel()
        return cls(array[0], array[1], tuple(array[2:]))

    @property
    def lam(self) -> complex:
        return complex(self.gamma, self.tau)

    @property
    def eta_vector(self) -> np.ndarray:
        return np.asarray(self.eta, dtype=float)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.tau, self.gamma, *self.eta])

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.vector))

    @property
    def hat(self) -> "Frequency":
        size = self.magnitude
        if size == 0.0:
            raise ValueError("the zero frequency has no direction")
        return self.scaled(1.0 / size)

    @property
    def parabolic_weight(self) -> float:
        eta_sq = float(self.eta_vector @ self.eta_vector)
        return float((self.tau**2 + self.gamma**2 + eta_sq**2) ** 0.25)

    @property
    def phi(self) -> float:
        return float(np.sqrt(self.gamma + self.magnitude**2))

    def scaled(self, factor: float) -> "Frequency":
        return Frequency(self.tau * factor, self.gamma * factor, tuple(factor * self.eta_vector))

    def parabolic_projection(self) -> "Frequency":
        """Quasi-homogeneous projection onto tau^2 + gamma^2 + |eta|^4 = 1."""
        weight = self.parabolic_weight
        if weight == 0.0:
            raise ValueError("the zero frequency has no parabolic projection")
        return Frequency(self.tau / weight**2, self.gamma / weight**2, tuple(self.eta_vector / weight))

    def to_dict(self) -> dict[str, Any]:
        return {"tau": self.tau, "gamma": self.gamma, "eta": list(self.eta)}


@dataclass(frozen=True, eq=False)
class EvansEvaluation:
    frequency: Frequency
    value: complex
    E_minus: SubspaceBasis
    kernel_basis: SubspaceBasis
    conditioning: dict[str, float] = field(default_factory=dict)

    @property
    def modulus(self) -> float:
        return float(abs(self.value))

    def to_dict(self) -> dict[str, Any]:
        return {
            "frequency": self.frequency.to_dict(),
            "modulus": self.modulus,
            "conditioning": {key: _finite_or_none(value) for key, value in sorted(self.conditioning.items())},
        }


@dataclass(frozen=True)
class HighFrequencyEvaluation:
    """Rescaled Evans function and its decoupled hyperbolic/parabolic factors."""

    frequency: Frequency
    Dsc: float
    D1: float
    D2: float
    d2_on_sphere: float

    @property
    def product(self) -> float:
        return self.D1 * self.D2

    def to_dict(self) -> dict[str, Any]:
        return {
            "frequency": self.frequency.to_dict(),
            "Dsc": self.Dsc,
            "D1": self.D1,
            "D2": self.D2,
            "d2_on_sphere": self.d2_on_sphere,
        }


@dataclass(frozen=True)
class ContourSpec:
    """Closed circle lambda = center + radius e^{2 pi i t} at fixed eta."""

    center: complex
    radius: float
    eta: tuple[float, ...]
    points: int = 256

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "eta", tuple(float(value) for value in self.eta))
        if not self.radius > 0.0:
            raise ValueError("contour radius must be positive")
        if self.points < 8:
            raise ValueError("contours need at least 8 points")

    def parameters(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.points)

    def lambdas(self) -> np.ndarray:
        return self.center + self.radius * np.exp(2j * np.pi * self.parameters())

    def to_dict(self) -> dict[str, Any]:
        return {
            "center": [self.center.real, self.center.imag],
            "radius": self.radius,
            "eta": list(self.eta),
            "points": self.points,
        }


@dataclass(frozen=True)
class ScanGrid:
    """Sampling of the bounded ball |zeta| <= R and of the parabolic sphere.

    Directions are normal random vectors folded onto gamma >= 0 and drawn
    from a seeded generator, so a grid is reproducible from its fields.
    """

    radius: float = 10.0
    hemisphere_points: int = 16
    rho_points: int = 8
    sphere_points: int = 256
    rho_ladder: tuple[float, ...] = (1e-2, 5e-3, 2.5e-3)
    seed: int = 0
    polar: bool = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho_ladder", tuple(float(value) for value in self.rho_ladder))
        if not self.radius > 0.0:
            raise ValueError("scan radius must be positive")
        for name in ("hemisphere_points", "rho_points", "sphere_points"):
            if getattr(self, name) < 2:
                raise ValueError(f"{name} must be at least 2")

    def directions(self, d: int, count: int, offset: int = 0) -> list[Frequency]:
        rng = np.random.default_rng(self.seed + offset)
        hats = []
        for vector in rng.standard_normal((count, d + 1)):
            vector[1] = abs(vector[1])
            hats.append(Frequency.from_vector(vector / np.linalg.norm(vector)))
        return hats

    def magnitudes(self) -> np.ndarray:
        return np.geomspace(self.radius * 1e-2, self.radius, self.rho_points)

    def samples(self, d: int) -> list[tuple[str, Frequency]]:
        """Frequency-ordered (regime, frequency) pairs; polar samples carry the direction."""
        hats = self.directions(d, self.hemisphere_points)
        points: list[tuple[str, Frequency]] = []
        for hat in hats:
            points.extend(("bounded", hat.scaled(rho)) for rho in self.magnitudes())
            if self.polar:
                points.append(("polar", hat))
        points.extend(("sphere", hat.parabolic_projection()) for hat in self.directions(d, self.sphere_points, offset=1))
        return points

    def to_dict(self) -> dict[str, Any]:
        return {
            "radius": self.radius,
            "hemisphere_points": self.hemisphere_points,
            "rho_points": self.rho_points,
            "sphere_points": self.sphere_points,
            "rho_ladder": list(self.rho_ladder),
            "seed": self.seed,
        }


@dataclass(frozen=True)
class ScanPoint:
    index: int
    regime: str
    frequency: Frequency
    value: float | None = None
    condition: float | None = None
    residual: float | None = None
    error: str | None = None
    error_message: str | None = None

    @property
    def succeeded(self) -> bool:
        return self.error is None

    def row(self, d: int) -> list[Any]:
        eta = list(self.frequency.eta) + [0.0] * (d - 1 - len(self.frequency.eta))
        return [
            self.regime,
            self.frequency.tau,
            self.frequency.gamma,
            *eta,
            self.value,
            self.condition,
            self.residual,
            self.error or "",
        ]


def scan_columns(d: int) -> list[str]:
    return ["regime", "tau", "gamma", *(f"eta{j + 1}" for j in range(d - 1)), "value", "condition", "residual", "error"]


def _witness(point: ScanPoint | None) -> dict[str, Any] | None:
    if point is None:
        return None
    return {"regime": point.regime, "frequency": point.frequency.to_dict(), "value": point.value}


@dataclass(frozen=True)
class ScanReport:
    """Uniform Evans scan: ordered per-point values and their summary."""

    system: str
    bc: str
    d: int
    grid: ScanGrid
    points: tuple[ScanPoint, ...]
    windings: tuple[dict[str, Any], ...] = ()
    floor: float = 1e-8

    def _regime(self, *regimes: str) -> list[ScanPoint]:
        return [point for point in self.points if point.regime in regimes and point.succeeded and point.value is not None]

    def _minimum(self, *regimes: str) -> ScanPoint | None:
        candidates = self._regime(*regimes)
        return min(candidates, key=lambda point: point.value) if candidates else None

    @property
    def bounded_min(self) -> float | None:
        point = self._minimum("bounded", "polar")
        return None if point is None else point.value

    @property
    def sphere_min(self) -> float | None:
        point = self._minimum("sphere")
        return None if point is None else point.value

    @property
    def failures(self) -> list[ScanPoint]:
        return [point for point in self.points if not point.succeeded]

    @property
    def failure_fraction(self) -> float:
        return len(self.failures) / len(self.points) if self.points else 0.0

    @property
    def worst_conditioned(self) -> ScanPoint | None:
        candidates = [point for point in self.points if point.succeeded and point.condition is not None]
        return min(candidates, key=lambda point: point.condition) if candidates else None

    @property
    def violation(self) -> bool:
        minima = [value for value in (self.bounded_min, self.sphere_min) if value is not None]
        if any(value <= self.floor for value in minima):
            return True
        return any(entry.get("winding") not in (0, None) for entry in self.windings)

    def rows(self) -> list[list[Any]]:
        return [point.row(self.d) for point in self.points]

    def columns(self) -> list[str]:
        return scan_columns(self.d)

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": "evans_scan",
            "system": self.system,
            "bc": self.bc,
            "grid": self.grid.to_dict(),
            "floor": self.floor,
            "points": len(self.points),
            "failed": len(self.failures),
            "failure_fraction": self.failure_fraction,
            "bounded_min": _finite_or_none(self.bounded_min),
            "sphere_min": _finite_or_none(self.sphere_min),
            "bounded_witness": _witness(self._minimum("bounded", "polar")),
            "sphere_witness": _witness(self._minimum("sphere")),
            "worst_conditioned": _witness(self.worst_conditioned),
            "failure_classes": sorted({point.error for point in self.failures if point.error}),
            "windings": list(self.windings),
            "violation": self.violation,
        }


__all__ = [
    "REGIMES",
    "ContourSpec",
    "EvansEvaluation",
    "Frequency",
    "HighFrequencyEvaluation",
    "ScanGrid",
    "ScanPoint",
    "ScanReport",
    "scan_columns",
]
