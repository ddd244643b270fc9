"""Two-component system whose layers are stable in 1-D but violate the Lopatinski condition."""

from __future__ import annotations

import numpy as np

from src.systems import BlockSystem, BoundaryOperator, make_builtin


def counterexample_system(a: float = 2.0, b: float = 3.0) -> tuple[BlockSystem, BoundaryOperator]:
    """A1 = [[0, 1], [1, 0]], A2 = [[1, a], [a, b]], viscosity on u2 only.

    The boundary conditions are u1 = 0 and du2/dnu = 0, so the residual
    hyperbolic condition is u1 = 0.  Requires b > 0 and b < a^2.
    """
    system, templates = make_builtin("counterexample", {"a": a, "b": b})
    return system, templates["neumann"](np.zeros(2))


def lopatinski_witness(a: float, b: float) -> tuple[float, float, float]:
    """Unit (tau, gamma, eta) along which (0, 1) is an eigenvector of H with eigenvalue -i/a."""
    vector = np.array([b / a, 0.0, 1.0])
    return tuple(float(x) for x in vector / np.linalg.norm(vector))


__all__ = ["counterexample_system", "lopatinski_witness"]
