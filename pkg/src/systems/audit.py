"""Sample-based audits of the structural hypotheses on a block system."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import scipy.linalg as la

from src.core.errors import LayerlabError
from src.core.logging import get_logger

from .models import AuditReport, AuditStatus, BlockSystem, HypothesisResult

audit_logger = get_logger("audit")

PASS_TOL = 1e-10
REAL_TOL = 1e-8
SEMISIMPLE_RCOND = 1e-7


@dataclass(frozen=True)
class SpectralProfile:
    """Clustered spectrum of a real symbol."""

    clusters: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    max_imag: float
    semisimple: bool
    separation: float


def spectral_profile(matrix: np.ndarray, cluster_tol: float = 1e-6) -> SpectralProfile:
    if matrix.size == 0:
        return SpectralProfile((), (), 0.0, True, float("inf"))
    eigenvalues = la.eigvals(matrix)
    order = np.argsort(eigenvalues.real, kind="stable")
    ordered = eigenvalues[order]
    scale = max(1.0, float(np.max(np.abs(ordered))))
    groups: list[list[complex]] = [[ordered[0]]]
    for value in ordered[1:]:
        if abs(value - groups[-1][-1]) <= cluster_tol * scale:
            groups[-1].append(value)
        else:
            groups.append([value])
    centers = [complex(np.mean(group)) for group in groups]
    separation = min((abs(b - a) / scale for a, b in zip(centers, centers[1:])), default=float("inf"))
    n = matrix.shape[0]
    semisimple = all(
        la.null_space(matrix - center * np.eye(n), rcond=SEMISIMPLE_RCOND).shape[1] >= len(group)
        for center, group in zip(centers, groups)
    )
    return SpectralProfile(
        clusters=tuple(centers),
        multiplicities=tuple(len(group) for group in groups),
        max_imag=float(np.max(np.abs(ordered.imag))) / scale,
        semisimple=semisimple,
        separation=separation,
    )


def random_directions(d: int, count: int, seed: int = 0) -> list[np.ndarray]:
    """Coordinate axes followed by ``count`` seeded random unit vectors."""
    rng = np.random.default_rng(seed)
    directions = [row for row in np.eye(d)]
    for sample in rng.normal(size=(count, d)):
        directions.append(sample / np.linalg.norm(sample))
    return directions


def perturbed_states(system: BlockSystem, base: np.ndarray, count: int, seed: int = 0, spread: float = 0.1) -> list[np.ndarray]:
    """``base`` followed by seeded relative perturbations inside the model domain."""
    rng = np.random.default_rng(seed)
    origin = system.require_domain(base)
    states = [origin]
    attempts = 0
    while len(states) < count + 1 and attempts < 20 * (count + 1):
        attempts += 1
        candidate = origin * (1.0 + spread * rng.uniform(-1.0, 1.0, size=origin.size))
        if system.domain(candidate):
            states.append(candidate)
    return states


class _Worst:
    """Running minimum of a measured quantity with its witness."""

    def __init__(self) -> None:
        self.value = float("inf")
        self.state: tuple[float, ...] | None = None
        self.direction: tuple[float, ...] | None = None

    def update(self, value: float, state: np.ndarray, direction: np.ndarray | None = None) -> None:
        if value < self.value:
            self.value = float(value)
            self.state = tuple(float(x) for x in state)
            self.direction = None if direction is None else tuple(float(x) for x in direction)


def _directions_at(system: BlockSystem, state: np.ndarray, directions: Sequence[np.ndarray], seed: int) -> list[np.ndarray]:
    extra = system.critical_directions(state) if system.critical_directions is not None else []
    rng = np.random.default_rng(seed)
    perturbed = []
    for direction in directions:
        nudged = direction + 1e-3 * rng.normal(size=direction.size)
        perturbed.append(nudged / np.linalg.norm(nudged))
    return [*directions, *extra, *perturbed]


def _bars(system: BlockSystem, state: np.ndarray, xi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a0 = system.A0(state)
    return la.solve(a0, system.A_xi(state, xi)), la.solve(a0, system.B_xi(state, xi))


def _check_h1(system: BlockSystem, states: Sequence[np.ndarray], directions: Sequence[np.ndarray]) -> HypothesisResult:
    conditioning, structure = _Worst(), 0.0
    witness = None
    n1 = system.n1
    for state in states:
        singular = la.svdvals(system.A0(state))
        conditioning.update(singular[-1] / singular[0], state)
        for xi in directions:
            b = system.B_xi(state, xi)
            leak = float(max(np.max(np.abs(b[:n1, :]), initial=0.0), np.max(np.abs(b[:, :n1]), initial=0.0)))
            if leak > structure:
                structure, witness = leak, (state, xi)
    passed = conditioning.value > PASS_TOL and structure <= PASS_TOL
    witness_state, witness_direction = conditioning.state, None
    if witness is not None:
        witness_state = tuple(float(x) for x in witness[0])
        witness_direction = tuple(float(x) for x in witness[1])
    return HypothesisResult(
        name="H1",
        status=AuditStatus.PASS if passed else AuditStatus.FAIL,
        measured={"min_relative_sigma_A0": conditioning.value, "max_block_leak_B": structure},
        witness_state=witness_state,
        witness_direction=witness_direction,
    )


def _check_h2(system: BlockSystem, states: Sequence[np.ndarray], directions: Sequence[np.ndarray], magnitudes: Sequence[float]) -> HypothesisResult:
    worst = _Worst()
    n1 = system.n1
    for state in states:
        for direction in directions:
            for size in magnitudes:
                xi = size * direction
                bbar = _bars(system, state, xi)[1]
                eigenvalues = la.eigvals(bbar[n1:, n1:])
                worst.update(float(np.min(eigenvalues.real)) / float(xi @ xi), state, xi)
    return HypothesisResult(
        name="H2",
        status=AuditStatus.PASS if worst.value > PASS_TOL else AuditStatus.FAIL,
        measured={"min_re_mu_over_xi2": worst.value},
        witness_state=worst.state,
        witness_direction=worst.direction,
    )


def _multiplicity_check(
    name: str,
    system: BlockSystem,
    states: Sequence[np.ndarray],
    boundary_states: Sequence[np.ndarray],
    directions: Sequence[np.ndarray],
    block: slice,
    cluster_tol: float,
    borderline_tol: float,
    seed: int,
) -> tuple[HypothesisResult, bool]:
    """Real, semisimple, constant multiplicity symbol and invertible normal symbol.

    Returns the result and whether a failure is due to multiplicity alone.
    """
    if block.stop == 0:
        return HypothesisResult(name=name, status=AuditStatus.PASS, measured={"block_size": 0.0}, note="empty hyperbolic block"), False
    worst_imag, worst_sep, borderline = 0.0, float("inf"), False
    failure: tuple[str, np.ndarray, np.ndarray] | None = None
    varying: tuple[np.ndarray, np.ndarray] | None = None
    distinct = 0
    for state in states:
        profiles = set()
        for xi in _directions_at(system, state, directions, seed):
            abar = _bars(system, state, xi)[0][block, block]
            profile = spectral_profile(abar, cluster_tol)
            worst_imag = max(worst_imag, profile.max_imag)
            if profile.max_imag > REAL_TOL and failure is None:
                failure = ("non-real eigenvalues", state, xi)
            if not profile.semisimple and failure is None:
                failure = ("non-semisimple eigenvalue", state, xi)
            if cluster_tol < profile.separation <= borderline_tol:
                borderline = True
                continue
            worst_sep = min(worst_sep, profile.separation)
            if profiles and profile.multiplicities not in profiles and varying is None:
                varying = (state, xi)
            profiles.add(profile.multiplicities)
        distinct = max(distinct, len(profiles))
    normal_min = float("inf")
    signs = set()
    for state in boundary_states:
        abar = _bars(system, state, system.normal)[0][block, block]
        eigenvalues = la.eigvals(abar)
        scale = max(1.0, float(np.max(np.abs(eigenvalues))))
        normal_min = min(normal_min, float(np.min(np.abs(eigenvalues))) / scale)
        signs.add(tuple(sorted(set(np.sign(eigenvalues.real).astype(int).tolist()))))
    normal_ok = normal_min > 1e-9
    if name == "H3":
        normal_ok = normal_ok and len(signs) == 1 and len(next(iter(signs))) == 1
    measured = {
        "max_relative_imag": worst_imag,
        "min_relative_separation": worst_sep,
        "distinct_multiplicity_profiles": float(distinct),
        "min_relative_normal_eigenvalue": normal_min,
    }
    if failure is not None or not normal_ok:
        reason, state, xi = failure or ("characteristic normal symbol", boundary_states[0], system.normal)
        return HypothesisResult(name, AuditStatus.FAIL, measured, tuple(map(float, state)), tuple(map(float, xi)), reason), False
    if varying is not None:
        state, xi = varying
        return HypothesisResult(name, AuditStatus.FAIL, measured, tuple(map(float, state)), tuple(map(float, xi)), "eigenvalue multiplicity varies with direction"), True
    if borderline:
        return HypothesisResult(name, AuditStatus.INDETERMINATE, measured, note="eigenvalue clusters within the borderline band"), False
    return HypothesisResult(name, AuditStatus.PASS, measured), False


def _check_h5(system: BlockSystem, states: Sequence[np.ndarray], directions: Sequence[np.ndarray], magnitudes: Sequence[float]) -> HypothesisResult:
    worst = _Worst()
    for state in states:
        for direction in directions:
            for size in magnitudes:
                xi = size * direction
                abar, bbar = _bars(system, state, xi)
                eigenvalues = la.eigvals(1j * abar + bbar)
                norm2 = float(xi @ xi)
                worst.update(float(np.min(eigenvalues.real)) * (1.0 + norm2) / norm2, state, xi)
    return HypothesisResult(
        name="H5",
        status=AuditStatus.PASS if worst.value > PASS_TOL else AuditStatus.FAIL,
        measured={"min_re_mu_scaled": worst.value},
        witness_state=worst.state,
        witness_direction=worst.direction,
    )


def _symmetric_part(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def _check_symmetric_dissipative(system: BlockSystem, states: Sequence[np.ndarray], directions: Sequence[np.ndarray]) -> HypothesisResult:
    if system.S is None:
        return HypothesisResult("symmetric_dissipative", AuditStatus.INDETERMINATE, {}, note="model provides no symmetrizer")
    n1, kernel_target = system.n1, system.N - system.Nprime
    residual = {"SA0_asymmetry": 0.0, "SA0_offblock": 0.0, "SA_asymmetry": 0.0, "SB_negativity": 0.0, "SB_kernel_mismatch": 0.0}
    positivity = _Worst()
    witness: tuple[np.ndarray, np.ndarray | None] | None = None
    for state in states:
        s = system.S(state)
        sa0 = s @ system.A0(state)
        residual["SA0_asymmetry"] = max(residual["SA0_asymmetry"], float(np.max(np.abs(sa0 - sa0.T))))
        residual["SA0_offblock"] = max(residual["SA0_offblock"], float(np.max(np.abs(sa0[:n1, n1:]), initial=0.0)))
        positivity.update(float(np.min(la.eigvalsh(_symmetric_part(sa0)))), state)
        for xi in directions:
            sa = s @ system.A_xi(state, xi)
            asymmetry = float(np.max(np.abs(sa - sa.T)))
            sb = _symmetric_part(s @ system.B_xi(state, xi))
            eigenvalues = la.eigvalsh(sb)
            scale = max(1.0, float(np.max(np.abs(eigenvalues))))
            kernel = int(np.count_nonzero(np.abs(eigenvalues) <= 1e-10 * scale))
            negativity = max(0.0, -float(np.min(eigenvalues)))
            mismatch = float(abs(kernel - kernel_target))
            if asymmetry > residual["SA_asymmetry"] or negativity > residual["SB_negativity"] or mismatch > residual["SB_kernel_mismatch"]:
                witness = (state, xi)
            residual["SA_asymmetry"] = max(residual["SA_asymmetry"], asymmetry)
            residual["SB_negativity"] = max(residual["SB_negativity"], negativity)
            residual["SB_kernel_mismatch"] = max(residual["SB_kernel_mismatch"], mismatch)
    passed = positivity.value > PASS_TOL and all(value <= PASS_TOL for value in residual.values())
    state, xi = witness if witness is not None else (np.asarray(positivity.state), None)
    return HypothesisResult(
        name="symmetric_dissipative",
        status=AuditStatus.PASS if passed else AuditStatus.FAIL,
        measured={**residual, "min_eig_SA0": positivity.value},
        witness_state=tuple(float(x) for x in state),
        witness_direction=None if xi is None else tuple(float(x) for x in xi),
    )


def _check_genuine_coupling(system: BlockSystem, states: Sequence[np.ndarray], directions: Sequence[np.ndarray], cluster_tol: float) -> HypothesisResult:
    worst = _Worst()
    for state in states:
        for xi in directions:
            abar, bbar = _bars(system, state, xi)
            kernel = la.null_space(bbar, rcond=1e-10)
            if kernel.shape[1] == 0:
                worst.update(np.pi / 2.0, state, xi)
                continue
            profile = spectral_profile(abar, cluster_tol)
            for center in profile.clusters:
                eigenspace = la.null_space(abar - center * np.eye(system.N), rcond=SEMISIMPLE_RCOND)
                if eigenspace.shape[1] == 0:
                    continue
                angle = float(np.min(la.subspace_angles(eigenspace, kernel)))
                worst.update(angle, state, xi)
    return HypothesisResult(
        name="genuine_coupling",
        status=AuditStatus.PASS if worst.value > 1e-8 else AuditStatus.FAIL,
        measured={"min_angle_eigenvector_kernel": worst.value},
        witness_state=worst.state,
        witness_direction=worst.direction,
    )


def audit_hypotheses(
    system: BlockSystem,
    sample_states: Sequence[np.ndarray],
    sample_directions: Sequence[np.ndarray],
    boundary_states: Sequence[np.ndarray] | None = None,
    magnitudes: Sequence[float] = (0.1, 1.0, 10.0),
    cluster_tol: float = 1e-6,
    borderline_tol: float = 1e-4,
    seed: int = 0,
) -> AuditReport:
    """Check H1-H5, symmetric dissipativity and genuine coupling on samples.

    Failures carry a witness (state, direction).  When H4 fails only through
    varying multiplicity, the symbol is real and semisimple and a symmetrizer
    exists, an advisory H4prime entry is added; total nonglancing is not
    certified.
    """
    states = [system.state(state) for state in sample_states]
    directions = [np.asarray(xi, dtype=float) / np.linalg.norm(xi) for xi in sample_directions if np.linalg.norm(xi) > 0.0]
    if not states or not directions:
        raise ValueError("audit needs at least one state and one nonzero direction")
    boundary = [system.state(state) for state in boundary_states] if boundary_states else states
    results: list[HypothesisResult] = []

    def guarded(name: str, check) -> HypothesisResult:
        try:
            return check()
        except (LayerlabError, la.LinAlgError, np.linalg.LinAlgError) as error:
            audit_logger.info(f"{name} audit failed numerically: {error}")
            return HypothesisResult(name, AuditStatus.FAIL, {}, note=f"{type(error).__name__}: {error}")

    results.append(guarded("H1", lambda: _check_h1(system, states, directions)))
    results.append(guarded("H2", lambda: _check_h2(system, states, directions, magnitudes)))
    hyperbolic = slice(0, system.n1)
    results.append(guarded("H3", lambda: _multiplicity_check("H3", system, states, boundary, directions, hyperbolic, cluster_tol, borderline_tol, seed)[0]))
    try:
        h4, multiplicity_only = _multiplicity_check("H4", system, states, boundary, directions, slice(0, system.N), cluster_tol, borderline_tol, seed)
    except (LayerlabError, la.LinAlgError, np.linalg.LinAlgError) as error:
        h4, multiplicity_only = HypothesisResult("H4", AuditStatus.FAIL, {}, note=f"{type(error).__name__}: {error}"), False
    results.append(h4)
    results.append(guarded("H5", lambda: _check_h5(system, states, directions, magnitudes)))
    symmetric = guarded("symmetric_dissipative", lambda: _check_symmetric_dissipative(system, states, directions))
    results.append(symmetric)
    results.append(guarded("genuine_coupling", lambda: _check_genuine_coupling(system, states, directions, cluster_tol)))
    if multiplicity_only and symmetric.passed:
        results.append(
            HypothesisResult(
                name="H4prime",
                status=AuditStatus.ADVISORY,
                measured=dict(h4.measured),
                witness_state=h4.witness_state,
                witness_direction=h4.witness_direction,
                note="real semisimple symbol of variable multiplicity with a symmetrizer; total nonglancing not certified",
            )
        )
    report = AuditReport(system=system.name, sample_count=len(states), direction_count=len(directions), results=tuple(results))
    audit_logger.info(f"audit of {system.name}: " + ", ".join(f"{item.name}={item.status.value}" for item in results))
    return report


__all__ = ["SpectralProfile", "audit_hypotheses", "perturbed_states", "random_directions", "spectral_profile"]
