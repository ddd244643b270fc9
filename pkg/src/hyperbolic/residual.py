"""Tangent spaces of the endstate manifold: the residual boundary condition."""

from __future__ import annotations

import numpy as np
import scipy.linalg as la

from src.core.errors import BadParams, NontransversalLayer
from src.core.logging import get_logger
from src.numerics import invariant_subspace
from src.profiles import Profile, StableManifoldChart, trace_jacobian, transversality_matrix
from src.profiles.equations import check_normal
from src.systems import BlockSystem, BoundaryOperator, counts

from .models import ResidualBC

residual_logger = get_logger("hyperbolic")

NULL_RCOND = 1e-8
METHODS = ("auto", "linear", "closed_form", "profile")


def decaying_directions(A: np.ndarray, B: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Real basis of E_-(A^-1 B), the boundary values of decaying solutions of A w = B w'."""
    matrix = la.solve(np.asarray(A, dtype=float), np.asarray(B, dtype=float))
    threshold = tol * max(1.0, float(np.linalg.norm(matrix)))
    basis = invariant_subspace(matrix, lambda value: value.real < -threshold)
    return np.real(basis.columns)


def _linear(system: BlockSystem, bc: BoundaryOperator, p: np.ndarray) -> np.ndarray:
    matrix, _ = transversality_matrix(system, bc, p)
    null = la.null_space(matrix, rcond=NULL_RCOND)
    return null[: system.N]


def _closed_form(system: BlockSystem, bc: BoundaryOperator, p: np.ndarray) -> np.ndarray:
    """N + E_-(A_d^-1 B_dd) with N the hyperbolic directions left free by Upsilon_1."""
    if bc.Ndoubleprime:
        raise BadParams("the closed form needs Dirichlet conditions on every parabolic variable", bc=bc.name)
    n1 = system.n1
    free = np.zeros((system.N, 0))
    if n1:
        jacobian = np.asarray(bc.upsilon1_jac(p[:n1]), dtype=float).reshape(bc.N1plus, n1)
        kernel = la.null_space(jacobian) if bc.N1plus else np.eye(n1)
        free = np.vstack([kernel, np.zeros((system.Nprime, kernel.shape[1]))])
    return np.hstack([free, decaying_directions(system.A_normal(p), system.B_normal(p))])


def _from_profile(system: BlockSystem, bc: BoundaryOperator, profile: Profile) -> np.ndarray:
    q = profile.endstate
    manifold = StableManifoldChart.at(system, q)
    a = manifold.coordinates(q, profile.w2z[0])
    jacobian = trace_jacobian(system, bc, manifold, q, a)
    nullity = jacobian.shape[1] - jacobian.shape[0]
    _, _, vh = la.svd(jacobian)
    return vh[vh.shape[0] - nullity :].T[: system.N] if nullity > 0 else np.zeros((system.N, 0))


def residual_tangent_space(
    system: BlockSystem,
    bc: BoundaryOperator,
    p: np.ndarray | None = None,
    nu: np.ndarray | None = None,
    *,
    profile: Profile | None = None,
    method: str = "auto",
) -> ResidualBC:
    """Tangent space T_pC of the endstate manifold and its annihilator.

    ``linear`` solves the transversality matrix of the constant layer at p,
    ``closed_form`` builds N + E_-(A_d^-1 B_dd) for Dirichlet-type conditions
    and ``profile`` differentiates the boundary trace of a computed layer.
    ``auto`` uses ``profile`` when a non-constant layer is given and
    ``linear`` otherwise.
    """
    normal = check_normal(system, nu)
    if method not in METHODS:
        raise ValueError(f"unknown residual method {method!r}")
    if p is None:
        if profile is None:
            raise ValueError("either an endstate or a profile is required")
        p = profile.endstate
    state = system.require_domain(p)
    if method == "auto":
        method = "profile" if profile is not None and not profile.is_constant else "linear"
    if method == "profile":
        if profile is None:
            raise ValueError("the profile method needs a computed layer")
        vectors = _from_profile(system, bc, profile)
    elif method == "closed_form":
        vectors = _closed_form(system, bc, state)
    else:
        vectors = _linear(system, bc, state)

    residual = ResidualBC.from_tangent(system.name, state, normal, vectors, method)
    expected = system.N - counts(system, bc, state).Nplus
    if residual.tangent.shape[1] != expected:
        raise NontransversalLayer(
            "endstate manifold does not have dimension N - N+",
            found=residual.tangent.shape[1],
            expected=expected,
            method=method,
        )
    residual_logger.debug(f"{system.name}/{bc.name}: residual condition rows {np.round(residual.annihilator, 10).tolist()} ({method})")
    return residual


def tangent_agreement(first: ResidualBC, second: ResidualBC) -> float:
    """Sine of the largest principal angle between two tangent spaces."""
    if first.tangent.shape != second.tangent.shape:
        return 1.0
    if first.tangent.shape[1] == 0:
        return 0.0
    return float(np.sin(np.max(la.subspace_angles(first.tangent, second.tangent))))


__all__ = ["decaying_directions", "residual_tangent_space", "tangent_agreement"]
