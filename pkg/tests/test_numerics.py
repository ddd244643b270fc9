from __future__ import annotations

import unittest

import numpy as np

from src.core.errors import (
    DimensionMismatch,
    GapCollapse,
    GapTooSmall,
    NoConvergence,
    NonConvergentLadder,
    NotOrthonormal,
    NumericalError,
    SingularJacobian,
)
from src.numerics import (
    SubspaceBasis,
    extrapolate_ladder,
    finite_difference_jacobian,
    integrate_subspace,
    newton_solve,
    spectral_projector,
    stable_subspace,
    subspace_det,
    subspace_distance,
    transport_basis,
    winding_number,
)


def _line(angle: float) -> SubspaceBasis:
    return SubspaceBasis(np.array([[np.cos(angle)], [np.sin(angle)]]))


class StableSubspaceTests(unittest.TestCase):
    def test_diagonal_and_companion_examples(self) -> None:
        basis = stable_subspace(np.diag([-1.0, 2.0]))
        self.assertEqual(basis.dim, 1)
        np.testing.assert_allclose(np.abs(basis.columns[:, 0]), [1.0, 0.0], atol=1e-12)

        companion = stable_subspace(np.array([[0.0, 1.0], [-1.0, -2.0]]))
        self.assertEqual(companion.dim, 2)

    def test_eigenvalue_on_the_axis_is_rejected(self) -> None:
        with self.assertRaises(GapTooSmall):
            stable_subspace(np.diag([0.0, -1.0]))

    def test_random_matrices_give_invariant_bases(self) -> None:
        rng = np.random.default_rng(7)
        checked = 0
        for _ in range(30):
            matrix = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
            eigenvalues = np.linalg.eigvals(matrix)
            if np.min(np.abs(eigenvalues.real)) < 1e-3:
                continue
            basis = stable_subspace(matrix)
            self.assertEqual(basis.dim, int(np.count_nonzero(eigenvalues.real < 0)))
            b = basis.columns
            residual = matrix @ b - b @ (b.conj().T @ matrix @ b)
            self.assertLess(np.linalg.norm(residual), 1e-8)
            checked += 1
        self.assertGreater(checked, 10)

    def test_projector_commutes_and_is_idempotent(self) -> None:
        matrix = np.array([[-1.0, 3.0, 0.5], [0.0, 2.0, 1.0], [0.2, 0.0, -4.0]])
        projector, gap = spectral_projector(matrix, lambda value: value.real < 0)
        np.testing.assert_allclose(projector @ projector, projector, atol=1e-10)
        np.testing.assert_allclose(projector @ matrix, matrix @ projector, atol=1e-10)
        self.assertGreater(gap, 0.0)


class SubspaceDeterminantTests(unittest.TestCase):
    def test_orthogonal_and_tilted_lines(self) -> None:
        self.assertAlmostEqual(subspace_det(_line(0.0), _line(np.pi / 2)), 1.0, places=12)
        self.assertAlmostEqual(subspace_det(_line(0.0), _line(np.pi / 6)), 0.5, places=12)
        self.assertAlmostEqual(subspace_det(_line(0.0), _line(0.0)), 0.0, places=12)
        self.assertAlmostEqual(subspace_distance(_line(0.0), _line(np.pi / 6)), 0.5, places=12)

    def test_dimensions_must_fill_the_ambient_space(self) -> None:
        with self.assertRaises(DimensionMismatch):
            subspace_det(_line(0.0), SubspaceBasis.full(2))

    def test_value_does_not_depend_on_the_orthonormal_basis(self) -> None:
        rng = np.random.default_rng(3)
        first = SubspaceBasis.span(rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2)))
        second = SubspaceBasis.span(rng.normal(size=(4, 2)))
        unitary, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
        rotated = SubspaceBasis(first.columns @ unitary)
        self.assertAlmostEqual(subspace_det(first, second), subspace_det(rotated, second), delta=1e-12)

    def test_non_orthonormal_columns_are_refused(self) -> None:
        with self.assertRaises(NotOrthonormal) as raised:
            SubspaceBasis(np.array([[1.0], [1.0]]))
        self.assertIsInstance(raised.exception, NumericalError)
        self.assertAlmostEqual(raised.exception.payload["deviation"], 1.0)


class SubspaceTransportTests(unittest.TestCase):
    def test_coordinate_subspace_is_invariant(self) -> None:
        init = SubspaceBasis(np.array([[1.0], [0.0]]))
        result = integrate_subspace(lambda z: np.diag([-1.0, -2.0]), 5.0, 0.0, init)
        self.assertLess(subspace_distance(result, init), 1e-8)

    def test_zero_generator_keeps_the_basis(self) -> None:
        init = _line(0.3)
        result = integrate_subspace(lambda z: np.zeros((2, 2)), 4.0, 0.0, init)
        np.testing.assert_allclose(result.columns, init.columns, atol=1e-12)

    def test_full_space_in_one_dimension(self) -> None:
        init = SubspaceBasis.full(1)
        result = integrate_subspace(lambda z: np.array([[-1.0 + np.exp(-z)]]), 20.0, 0.0, init)
        self.assertEqual(result.dim, 1)

    def test_stable_subspace_of_a_constant_generator_is_kept(self) -> None:
        rng = np.random.default_rng(11)
        matrix = np.diag([-2.0, -0.5, 1.0, 3.0]) + 0.3 * rng.normal(size=(4, 4))
        init = stable_subspace(matrix)
        result = integrate_subspace(lambda z: matrix, 6.0, 0.0, init)
        self.assertLess(subspace_distance(result, init), 1e-8)

    def test_invalid_interval_is_refused(self) -> None:
        with self.assertRaises(ValueError):
            integrate_subspace(lambda z: np.eye(2), 0.0, 1.0, _line(0.0))


class BasisContinuationTests(unittest.TestCase):
    def test_constant_path_gives_constant_bases(self) -> None:
        matrix = np.array([[-1.0, 2.0], [0.0, 3.0]])
        bases = transport_basis(lambda t: matrix, samples=9)
        for basis in bases:
            np.testing.assert_allclose(basis.columns, bases[0].columns, atol=1e-12)

    def test_rotating_eigenvector_is_tracked(self) -> None:
        def rotation(t: float) -> np.ndarray:
            angle = np.pi * t / 4
            r = np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])
            return r @ np.diag([-1.0, 1.0]) @ r.T

        ts = np.linspace(0.0, 1.0, 33)
        bases = transport_basis(rotation, samples=ts)
        for t, basis in zip(ts, bases):
            expected = np.array([np.cos(np.pi * t / 4), np.sin(np.pi * t / 4)])
            self.assertGreater(abs(np.vdot(expected, basis.columns[:, 0])), 1.0 - 1e-8)

    def test_closed_loop_returns_to_the_same_subspace(self) -> None:
        path = lambda t: np.array([[-1.0, 0.5], [0.0, np.exp(2j * np.pi * t) + 2.0]])  # noqa: E731
        bases = transport_basis(path, samples=65)
        self.assertLess(subspace_distance(bases[0], bases[-1]), 1e-8)

    def test_colliding_eigenvalues_raise(self) -> None:
        with self.assertRaises(GapCollapse) as caught:
            transport_basis(lambda t: np.diag([-1.0 + 2.0 * t, 0.5]), samples=65)
        self.assertAlmostEqual(caught.exception.payload["parameter"], 0.75)


class NewtonTests(unittest.TestCase):
    def test_scalar_and_planar_roots(self) -> None:
        self.assertAlmostEqual(float(newton_solve(lambda x: x, 0.3)), 0.0, places=10)
        self.assertAlmostEqual(float(newton_solve(lambda x: x * x - 2.0, 1.0)), np.sqrt(2.0), places=10)
        root = newton_solve(lambda x: np.array([x[0] + x[1] - 1.0, x[0] - x[1]]), np.zeros(2))
        np.testing.assert_allclose(root, [0.5, 0.5], atol=1e-10)

    def test_singular_jacobian_and_iteration_limit(self) -> None:
        with self.assertRaises(SingularJacobian):
            newton_solve(lambda x: np.array([x[0] + x[1] - 1.0, 2.0 * x[0] + 2.0 * x[1] - 2.0]), np.zeros(2))
        with self.assertRaises(NoConvergence):
            newton_solve(lambda x: x - 1.0, 0.0, max_iter=0)

    def test_finite_difference_jacobian(self) -> None:
        jacobian = finite_difference_jacobian(lambda x: np.array([x[0] * x[1], np.sin(x[0])]), np.array([0.5, 2.0]))
        np.testing.assert_allclose(jacobian, [[2.0, 0.5], [np.cos(0.5), 0.0]], atol=1e-8)


class ContourAndLadderTests(unittest.TestCase):
    def test_winding_of_sampled_circles(self) -> None:
        t = np.linspace(0.0, 1.0, 129)
        circle = np.exp(2j * np.pi * t)
        self.assertEqual(winding_number(circle), 1)
        self.assertEqual(winding_number(circle**2), 2)
        self.assertEqual(winding_number(circle + 2.0), 0)
        self.assertEqual(winding_number(circle * np.exp(0.5j * np.pi * t), closure_phase=0.5 * np.pi), 1)

    def test_ladder_extrapolation(self) -> None:
        rhos = (1e-2, 5e-3, 2.5e-3)
        value, residual = extrapolate_ladder(rhos, (0.7, 0.7, 0.7))
        self.assertAlmostEqual(value, 0.7, places=12)
        self.assertLess(residual, 1e-10)
        value, _ = extrapolate_ladder(rhos, [1.0 + 2.0 * rho for rho in rhos])
        self.assertAlmostEqual(value, 1.0, places=10)

    def test_growing_differences_raise(self) -> None:
        with self.assertRaises(NonConvergentLadder):
            extrapolate_ladder((1e-2, 5e-3, 2.5e-3), (1.0, 1.001, 1.1))


if __name__ == "__main__":
    unittest.main()
