"""Dense subspace kernels: ordered Schur splitting, determinants, transport."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la
from scipy.interpolate import BarycentricInterpolator
from scipy.optimize import linear_sum_assignment

from src.core.errors import DimensionMismatch, GapCollapse, GapTooSmall, NonFinite, NonConvergentLadder, NotOrthonormal
from src.core.logging import numerics_logger

ORTHONORMAL_TOL = 1e-10
DEFAULT_GAP_TOL = 1e-9

SpectralPicker = Callable[[complex], bool]


@dataclass(frozen=True, eq=False)
class SubspaceBasis:
    """Orthonormal basis of a subspace of C^n, stored column-wise."""

    columns: np.ndarray

    def __post_init__(self) -> None:
        columns = np.asarray(self.columns)
        if columns.ndim != 2:
            raise DimensionMismatch("subspace basis must be a 2-D array", shape=columns.shape)
        if columns.shape[1] > columns.shape[0] or columns.shape[0] < 1:
            raise DimensionMismatch("subspace dimension exceeds ambient dimension", shape=columns.shape)
        if not np.all(np.isfinite(columns)):
            raise NonFinite("subspace basis has non-finite entries")
        deviation = float(np.max(np.abs(columns.conj().T @ columns - np.eye(columns.shape[1])), initial=0.0))
        if deviation > ORTHONORMAL_TOL:
            raise NotOrthonormal("subspace basis columns are not orthonormal", deviation=deviation)
        object.__setattr__(self, "columns", columns.astype(complex))

    @property
    def ambient_dim(self) -> int:
        return int(self.columns.shape[0])

    @property
    def dim(self) -> int:
        return int(self.columns.shape[1])

    @property
    def projector(self) -> np.ndarray:
        return self.columns @ self.columns.conj().T

    @classmethod
    def empty(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(np.zeros((ambient_dim, 0), dtype=complex))

    @classmethod
    def full(cls, ambient_dim: int) -> "SubspaceBasis":
        return cls(np.eye(ambient_dim, dtype=complex))

    @classmethod
    def span(cls, vectors: np.ndarray, rank_tol: float = 1e-12) -> "SubspaceBasis":
        """Orthonormal basis of the column span of ``vectors`` (rank revealing)."""
        matrix = np.atleast_2d(np.asarray(vectors, dtype=complex))
        if matrix.shape[1] == 0:
            return cls.empty(matrix.shape[0])
        return cls(la.orth(matrix, rcond=rank_tol))

    @classmethod
    def from_columns(cls, vectors: np.ndarray) -> "SubspaceBasis":
        """Polar orthonormalization of full-rank columns.

        The unitary polar factor differs from ``vectors`` by a Hermitian
        positive factor, so determinants built from it keep their phase.
        """
        matrix = np.asarray(vectors, dtype=complex)
        if matrix.ndim != 2:
            raise DimensionMismatch("columns must be a 2-D array", shape=matrix.shape)
        if matrix.shape[1] == 0:
            return cls.empty(matrix.shape[0])
        return cls(polar_orthonormalize(matrix))

    def orthogonal_complement(self) -> "SubspaceBasis":
        if self.dim == 0:
            return SubspaceBasis.full(self.ambient_dim)
        if self.dim == self.ambient_dim:
            return SubspaceBasis.empty(self.ambient_dim)
        return SubspaceBasis(la.null_space(self.columns.conj().T))


def check_finite(matrix: np.ndarray, what: str = "matrix") -> np.ndarray:
    array = np.asarray(matrix)
    if not np.all(np.isfinite(array)):
        raise NonFinite(f"{what} has non-finite entries")
    return array


def polar_orthonormalize(matrix: np.ndarray) -> np.ndarray:
    unitary, _ = la.polar(np.asarray(matrix, dtype=complex), side="right")
    return unitary


def invariant_subspace(matrix: np.ndarray, select: SpectralPicker) -> SubspaceBasis:
    """Invariant subspace for the eigenvalues accepted by ``select``.

    Real input uses the ordered real Schur form, so ``select`` must be closed
    under conjugation.  No gap check is made here.
    """
    m = check_finite(np.atleast_2d(matrix))
    n = m.shape[0]
    if m.shape != (n, n):
        raise DimensionMismatch("matrix must be square", shape=m.shape)
    try:
        if np.isrealobj(m):
            _, z, sdim = la.schur(m.astype(float), output="real", sort=lambda re, im: bool(select(complex(re, im))))
        else:
            _, z, sdim = la.schur(m.astype(complex), output="complex", sort=lambda e: bool(select(complex(e))))
    except (np.linalg.LinAlgError, ValueError) as error:
        raise GapTooSmall("Schur reordering failed", reason=str(error)) from error
    return SubspaceBasis(np.asarray(z[:, :sdim], dtype=complex))


def spectral_gap(eigenvalues: np.ndarray) -> float:
    """Distance of the spectrum from the imaginary axis."""
    if eigenvalues.size == 0:
        return float("inf")
    return float(np.min(np.abs(eigenvalues.real)))


def stable_subspace(matrix: np.ndarray, gap_tol: float = DEFAULT_GAP_TOL) -> SubspaceBasis:
    m = check_finite(np.atleast_2d(matrix))
    if m.shape[0] != m.shape[1]:
        raise DimensionMismatch("matrix must be square", shape=m.shape)
    if m.shape[0] == 0:
        raise DimensionMismatch("stable subspace of a 0x0 matrix is undefined")
    eigenvalues = la.eigvals(m)
    gap = spectral_gap(eigenvalues)
    if gap < gap_tol:
        raise GapTooSmall("eigenvalue within gap tolerance of the imaginary axis", gap=gap, tolerance=gap_tol)
    basis = invariant_subspace(m, lambda value: value.real < 0.0)
    expected = int(np.count_nonzero(eigenvalues.real < 0.0))
    if basis.dim != expected:
        raise GapTooSmall("Schur ordering disagrees with the eigenvalue count", gap=gap, dim=basis.dim, expected=expected)
    return basis


def stack_bases(*bases: SubspaceBasis) -> np.ndarray:
    ambient = {basis.ambient_dim for basis in bases}
    if len(ambient) != 1:
        raise DimensionMismatch("bases live in different ambient spaces", ambient=tuple(sorted(ambient)))
    return np.hstack([basis.columns for basis in bases])


def oriented_det(first: SubspaceBasis, second: SubspaceBasis) -> complex:
    """det [first | second]; phase is meaningful only for transported bases."""
    if first.ambient_dim != second.ambient_dim or first.dim + second.dim != first.ambient_dim:
        raise DimensionMismatch(
            "subspace dimensions must add up to the ambient dimension",
            ambient=(first.ambient_dim, second.ambient_dim),
            dims=(first.dim, second.dim),
        )
    return complex(np.linalg.det(stack_bases(first, second)))


def subspace_det(first: SubspaceBasis, second: SubspaceBasis) -> float:
    return float(abs(oriented_det(first, second)))


def subspace_distance(first: SubspaceBasis, second: SubspaceBasis) -> float:
    """Sine of the largest principal angle between equal-dimensional subspaces."""
    if first.ambient_dim != second.ambient_dim or first.dim != second.dim:
        raise DimensionMismatch("subspaces must share ambient space and dimension", dims=(first.dim, second.dim))
    if first.dim == 0 or first.dim == first.ambient_dim:
        return 0.0
    angles = la.subspace_angles(first.columns, second.columns)
    return float(np.sin(np.max(angles)))


def min_singular_value(matrix: np.ndarray) -> float:
    array = np.atleast_2d(matrix)
    if array.size == 0:
        return float("inf")
    return float(la.svdvals(array)[-1])


def numerical_rank(matrix: np.ndarray, threshold: float = 1e-8) -> int:
    array = np.atleast_2d(matrix)
    if array.size == 0:
        return 0
    return int(np.count_nonzero(la.svdvals(array) > threshold))


def spectral_projector(matrix: np.ndarray, select: Callable[[complex], bool]) -> tuple[np.ndarray, float]:
    """Riesz projector onto the selected invariant subspace and the picked/unpicked gap."""
    m = np.asarray(matrix, dtype=complex)
    n = m.shape[0]
    t, q, sdim = la.schur(m, output="complex", sort=lambda e: bool(select(complex(e))))
    diagonal = np.diag(t)
    picked, rest = diagonal[:sdim], diagonal[sdim:]
    if sdim == 0 or sdim == n:
        gap = float("inf")
        return (np.eye(n, dtype=complex) if sdim == n else np.zeros((n, n), dtype=complex)), gap
    gap = float(np.min(np.abs(picked[:, None] - rest[None, :])))
    coupling = la.solve_sylvester(t[:sdim, :sdim], -t[sdim:, sdim:], -t[:sdim, sdim:])
    block = np.zeros((n, n), dtype=complex)
    block[:sdim, :sdim] = np.eye(sdim)
    block[:sdim, sdim:] = -coupling
    return q @ block @ q.conj().T, gap


def transport_along(
    matrices: Sequence[np.ndarray],
    picker: Callable[[complex], bool] | None = None,
    gap_tol: float = DEFAULT_GAP_TOL,
    parameters: Sequence[float] | None = None,
) -> list[SubspaceBasis]:
    """Continue the picked invariant subspace along a sampled matrix path.

    ``picker`` selects eigenvalues at the first sample only (default: open
    left half plane); later samples keep the eigenvalues matched to the
    previously picked ones.  Each basis is the previous one mapped by the new
    Riesz projector and then polar orthonormalized, which keeps the phase of
    determinants continuous along the path.
    """
    if not matrices:
        return []
    choose = picker or (lambda value: value.real < 0.0)
    params = list(parameters) if parameters is not None else list(range(len(matrices)))
    previous_eigs = la.eigvals(check_finite(np.asarray(matrices[0], dtype=complex)))
    picked = np.array([bool(choose(complex(value))) for value in previous_eigs])
    bases: list[SubspaceBasis] = []
    current: np.ndarray | None = None
    for index, matrix in enumerate(matrices):
        m = check_finite(np.asarray(matrix, dtype=complex), "path matrix")
        eigs = la.eigvals(m)
        if index > 0:
            cost = np.abs(previous_eigs[:, None] - eigs[None, :])
            rows, cols = linear_sum_assignment(cost)
            flags = np.zeros(eigs.size, dtype=bool)
            flags[cols] = picked[rows]
            picked = flags
        chosen, others = eigs[picked], eigs[~picked]
        if chosen.size and others.size:
            gap = float(np.min(np.abs(chosen[:, None] - others[None, :])))
            if gap < gap_tol:
                raise GapCollapse("tracked eigenvalues met the rest of the spectrum", parameter=float(params[index]), gap=gap)

        def select(value: complex, eigs=eigs, picked=picked) -> bool:
            return bool(picked[int(np.argmin(np.abs(eigs - value)))])

        if current is None:
            current = invariant_subspace(m, select).columns
        else:
            projector, _ = spectral_projector(m, select)
            current = polar_orthonormalize(projector @ current)
        bases.append(SubspaceBasis(current))
        previous_eigs = eigs
    numerics_logger.debug(f"transported subspace of dim {bases[0].dim} along {len(bases)} samples")
    return bases


def transport_basis(
    path: Callable[[float], np.ndarray],
    picker: Callable[[complex], bool] | None = None,
    samples: int | Sequence[float] = 256,
    gap_tol: float = DEFAULT_GAP_TOL,
) -> list[SubspaceBasis]:
    ts = np.linspace(0.0, 1.0, samples) if isinstance(samples, (int, np.integer)) else np.asarray(samples, dtype=float)
    return transport_along([path(float(t)) for t in ts], picker, gap_tol, parameters=ts)


def winding_number(values: Sequence[complex], closure_phase: float = 0.0) -> int:
    """Winding of a sampled closed curve around the origin.

    ``values`` includes both endpoints of the loop; ``closure_phase`` is the
    argument of the unitary factor relating the end basis to the start basis.
    """
    array = np.asarray(values, dtype=complex)
    if array.size < 2:
        return 0
    if np.any(array == 0):
        raise GapTooSmall("curve passes through the origin")
    phases = np.unwrap(np.angle(array))
    return int(round((phases[-1] - phases[0] - closure_phase) / (2.0 * np.pi)))


def extrapolate_ladder(rhos: Sequence[float], values: Sequence[float], growth: float = 1.1) -> tuple[float, float]:
    """Polynomial (Neville) extrapolation of ladder values to rho = 0.

    Returns the extrapolate and the largest successive difference.
    """
    r = np.asarray(rhos, dtype=float)
    v = np.asarray(values, dtype=float)
    if r.size != v.size or r.size < 2:
        raise DimensionMismatch("ladder needs at least two matching rho/value pairs", sizes=(r.size, v.size))
    if np.any(np.diff(r) >= 0) or np.any(r <= 0):
        raise ValueError("rho ladder must be strictly decreasing and positive")
    differences = np.abs(np.diff(v))
    for index in range(1, differences.size):
        if differences[index] > growth * differences[index - 1] + 1e-14:
            raise NonConvergentLadder(
                "successive ladder differences grow",
                rho=float(r[index + 1]),
                differences=tuple(float(value) for value in differences),
            )
    extrapolate = float(BarycentricInterpolator(r, v)(0.0))
    return extrapolate, float(differences.max())


__all__ = [
    "SubspaceBasis",
    "check_finite",
    "extrapolate_ladder",
    "invariant_subspace",
    "min_singular_value",
    "numerical_rank",
    "oriented_det",
    "polar_orthonormalize",
    "spectral_gap",
    "spectral_projector",
    "stable_subspace",
    "subspace_det",
    "subspace_distance",
    "transport_along",
    "transport_basis",
    "winding_number",
]
