from __future__ import annotations

import dataclasses
import unittest

import numpy as np

from src.core.errors import BadParams, NoSymmetrizer, NontransversalLayer
from src.evans import Frequency
from src.hyperbolic import (
    ResidualBC,
    counterexample_system,
    dissipative_subspace,
    hemisphere_grid,
    lopatinski,
    lopatinski_scan,
    lopatinski_witness,
    maximal_dissipativity,
    residual_tangent_space,
    restricted_form_max,
    stable_H,
    tangent_agreement,
)
from src.numerics import subspace_distance
from src.systems import G_nu, make_builtin

SUBSONIC_OUTFLOW = np.array([1.0, 0.0, -0.5])
SUBSONIC_INFLOW = np.array([1.0, 0.0, 0.5])
MHD_STATE = np.array([1.0, 0.2, 0.1, 0.15, 0.1, 0.05, -0.8])
MHD_PLANAR_STATE = np.array([1.0, 0.3, 0.0, 0.2, 0.1, 0.0, -0.8])


def isothermal_ns():
    return make_builtin("isentropic_ns", {"gamma": 1.0, "pressure_coeff": 1.0})


def assert_rows_parallel(row: np.ndarray, expected: np.ndarray) -> None:
    row = row / np.linalg.norm(row)
    expected = expected / np.linalg.norm(expected)
    np.testing.assert_allclose(np.sign(row @ expected) * row, expected, atol=1e-8)


class CounterexampleTests(unittest.TestCase):
    def test_parameter_conditions(self) -> None:
        counterexample_system(2.0, 1.0)
        with self.assertRaises(BadParams):
            counterexample_system(1.0, 2.0)
        with self.assertRaises(BadParams):
            counterexample_system(2.0, -1.0)

    def test_residual_condition_is_u1_equal_zero(self) -> None:
        system, bc = counterexample_system()
        residual = residual_tangent_space(system, bc, np.zeros(2))
        np.testing.assert_allclose(residual.annihilator, [[1.0, 0.0]], atol=1e-10)
        self.assertEqual(residual.Nplus, 1)

    def test_lopatinski_determinant_vanishes_at_the_witness(self) -> None:
        system, bc = counterexample_system(2.0, 3.0)
        residual = residual_tangent_space(system, bc, np.zeros(2))
        tau, gamma, eta = lopatinski_witness(2.0, 3.0)
        self.assertEqual(gamma, 0.0)
        self.assertLess(lopatinski(system, residual, Frequency(tau, gamma, (eta,))), 1e-8)

    def test_commuting_case_has_constant_determinant(self) -> None:
        system, bc = counterexample_system(2.0, 1.0)
        residual = residual_tangent_space(system, bc, np.zeros(2))
        for zeta in (Frequency(0.3, 0.5, (0.4,)), Frequency(-1.0, 0.2, (2.0,))):
            with self.subTest(zeta=zeta.vector.tolist()):
                self.assertAlmostEqual(lopatinski(system, residual, zeta), 2.0**-0.5, places=10)

    def test_hemisphere_scan_finds_the_violation(self) -> None:
        system, bc = counterexample_system()
        residual = residual_tangent_space(system, bc, np.zeros(2))
        report = lopatinski_scan(system, residual, grid=16)
        self.assertTrue(report.violation)
        self.assertLess(report.minimum, 1e-6)
        witness = report.witness.frequency
        self.assertEqual(witness.gamma, 0.0)
        self.assertAlmostEqual(abs(witness.tau / witness.eta[0]), 1.5, places=4)
        self.assertEqual(report.to_dict()["kind"], "lop_scan")


class HemisphereGridTests(unittest.TestCase):
    def test_points_are_unit_frequencies_with_nonnegative_gamma(self) -> None:
        points = hemisphere_grid(2, 8)
        self.assertEqual(len(points), 64)
        for zeta in points:
            self.assertGreaterEqual(zeta.gamma, 0.0)
            self.assertAlmostEqual(zeta.magnitude, 1.0, places=12)

    def test_one_dimensional_grid_has_no_tangential_part(self) -> None:
        points = hemisphere_grid(1, 8)
        self.assertEqual(len(points), 8)
        self.assertTrue(all(zeta.eta == () for zeta in points))


class StableSubspaceTests(unittest.TestCase):
    def test_stable_subspace_is_scale_invariant(self) -> None:
        system, _ = isothermal_ns()
        zeta = Frequency(0.4, 0.3, (0.8,))
        first = stable_H(system, SUBSONIC_OUTFLOW, zeta)
        second = stable_H(system, SUBSONIC_OUTFLOW, zeta.scaled(3.0))
        self.assertLess(subspace_distance(first, second), 1e-10)


class ResidualConditionTests(unittest.TestCase):
    def test_subsonic_outflow_fixes_the_normal_velocity(self) -> None:
        system, templates = isothermal_ns()
        bc = templates["outflow"](SUBSONIC_OUTFLOW)
        linear = residual_tangent_space(system, bc, SUBSONIC_OUTFLOW)
        closed = residual_tangent_space(system, bc, SUBSONIC_OUTFLOW, method="closed_form")
        np.testing.assert_allclose(linear.annihilator, [[0.0, 0.0, 1.0]], atol=1e-8)
        np.testing.assert_allclose(closed.annihilator, [[0.0, 0.0, 1.0]], atol=1e-8)
        self.assertLess(tangent_agreement(linear, closed), 1e-8)
        self.assertEqual(linear.to_dict()["kind"], "residual_bc")

    def test_subsonic_inflow_tangent_direction(self) -> None:
        system, templates = isothermal_ns()
        residual = residual_tangent_space(system, templates["dirichlet"](SUBSONIC_INFLOW), SUBSONIC_INFLOW)
        self.assertEqual(residual.tangent.shape, (3, 1))
        expected = np.array([1.0, 0.0, -0.5]) / np.sqrt(1.25)
        self.assertAlmostEqual(abs(float(residual.tangent[:, 0] @ expected)), 1.0, places=8)

    def test_mixed_inflow_layer_is_nontransversal(self) -> None:
        system, templates = isothermal_ns()
        with self.assertRaises(NontransversalLayer):
            residual_tangent_space(system, templates["inflow_mixed"](SUBSONIC_INFLOW), SUBSONIC_INFLOW)

    def test_closed_form_needs_dirichlet_parabolic_data(self) -> None:
        system, bc = counterexample_system()
        with self.assertRaises(BadParams):
            residual_tangent_space(system, bc, np.zeros(2), method="closed_form")

    def test_full_navier_stokes_annihilator(self) -> None:
        system, templates = make_builtin("full_ns")
        state = np.array([1.0, 0.3, -0.5, 1.0])
        residual = residual_tangent_space(system, templates["outflow"](state), state)
        G = G_nu(system, state)
        lam_minus = float(np.min(np.linalg.eigvals(G[1:, 1:]).real))
        self.assertLess(lam_minus, 0.0)
        self.assertEqual(residual.Nplus, 1)
        assert_rows_parallel(residual.annihilator[0], np.array([0.0, 0.0, G[1, 1] - lam_minus, G[1, 2]]))

    def test_mhd_annihilator_with_and_without_planar_field(self) -> None:
        system, templates = make_builtin("mhd")
        mu, nu = system.params["mu"], system.params["nu"]
        for state in (MHD_STATE, MHD_PLANAR_STATE):
            with self.subTest(state=state.tolist()):
                G = G_nu(system, state)
                a, b = G[0, 0], G[2, 2]
                e, d = mu * G[0, 2], mu * G[1, 2]
                self.assertAlmostEqual(G[1, 1], a, places=12)
                self.assertAlmostEqual(nu * G[2, 0], e, places=12)
                self.assertAlmostEqual(nu * G[2, 1], d, places=12)
                root = np.sqrt((a - b) ** 2 + 4.0 * (e**2 + d**2) / (mu * nu))
                lam_minus, lam_plus = (a + b - root) / 2.0, (a + b + root) / 2.0
                self.assertLess(lam_minus, 0.0)
                self.assertGreater(lam_plus, 0.0)
                residual = residual_tangent_space(system, templates["dirichlet"](state), state)
                self.assertEqual(residual.Nplus, 1)
                expected = np.zeros(7)
                expected[4:] = [e * (a - lam_minus), d * (a - lam_minus), (e**2 + d**2) / mu]
                assert_rows_parallel(residual.annihilator[0], expected)
        self.assertNotEqual(mu * G_nu(system, MHD_STATE)[1, 2], 0.0)

    def test_unknown_method_is_rejected(self) -> None:
        system, bc = counterexample_system()
        with self.assertRaises(ValueError):
            residual_tangent_space(system, bc, np.zeros(2), method="shooting")


class DissipativityTests(unittest.TestCase):
    def test_subsonic_outflow_is_maximally_dissipative(self) -> None:
        system, templates = isothermal_ns()
        residual = residual_tangent_space(system, templates["outflow"](SUBSONIC_OUTFLOW), SUBSONIC_OUTFLOW)
        report = maximal_dissipativity(system, residual)
        self.assertTrue(report.dissipative)
        np.testing.assert_allclose(np.linalg.eigvalsh(report.form), [-0.5, -0.5], atol=1e-10)

    def test_subsonic_inflow_form_matches_closed_form(self) -> None:
        system, templates = isothermal_ns()
        rng = np.random.default_rng(3)
        for _ in range(5):
            rho, u, v = rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5), rng.uniform(0.1, 0.9)
            state = np.array([rho, u, v])
            residual = residual_tangent_space(system, templates["dirichlet"](state), state)
            w = np.array([rho, 0.0, -v])
            flux = system.S(state) @ system.A_normal(state)
            self.assertAlmostEqual(float(w @ flux @ w), v * (v**2 - 1.0), places=12)
            report = maximal_dissipativity(system, residual)
            self.assertTrue(report.dissipative)
            self.assertAlmostEqual(report.max_eigenvalue, v * (v**2 - 1.0) / float(w @ w), places=8)

    def test_inflow_neumann_residual_is_not_dissipative(self) -> None:
        system, _ = isothermal_ns()
        residual = ResidualBC.from_annihilator(system.name, SUBSONIC_INFLOW, system.normal, np.array([[1.0, 0.0, 0.0]]))
        report = maximal_dissipativity(system, residual)
        self.assertFalse(report.dissipative)
        self.assertAlmostEqual(report.max_eigenvalue, 0.5, places=12)

    def test_missing_symmetrizer(self) -> None:
        system, bc = counterexample_system()
        residual = residual_tangent_space(system, bc, np.zeros(2))
        with self.assertRaises(NoSymmetrizer):
            maximal_dissipativity(dataclasses.replace(system, S=None), residual)

    def test_dissipative_subspace_construction(self) -> None:
        rng = np.random.default_rng(11)
        trials = 0
        while trials < 50:
            M = rng.standard_normal((3, 3))
            B = np.zeros((4, 4))
            B[1:, 1:] = M @ M.T + 0.5 * np.eye(3)
            A = rng.standard_normal((4, 4))
            A = A + A.T
            A[0, 0] = -abs(A[0, 0]) - 0.1
            if np.min(np.abs(np.linalg.eigvalsh(A))) < 1e-3:
                continue
            trials += 1
            basis = dissipative_subspace(A, B, np.eye(4)[:, :1])
            self.assertLess(restricted_form_max(A, basis), 0.0)

    def test_empty_basis_has_no_form(self) -> None:
        self.assertEqual(restricted_form_max(np.eye(2), np.zeros((2, 0))), float("-inf"))


if __name__ == "__main__":
    unittest.main()
