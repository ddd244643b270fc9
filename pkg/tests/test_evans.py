from __future__ import annotations

import unittest

import numpy as np

from src.evans import (
    ContourSpec,
    E_minus,
    Frequency,
    ProfileCoefficients,
    ScanGrid,
    d2_on_sphere,
    decoupled_subspace,
    evans,
    evans_polar_limit,
    evans_winding,
    hf_tracking_check,
    rescaled_evans_hf,
    scan_uniform_evans,
)
from src.evans.high_frequency import hyperbolic_block, incoming_subspace
from src.hyperbolic import counterexample_system
from src.profiles import constant_profile, small_amplitude_family, solve_profile_bc
from src.systems import make_builtin

SUBSONIC_OUTFLOW = np.array([1.0, 0.0, -0.5])
SUBSONIC_INFLOW = np.array([1.0, 0.0, 0.5])
MHD_STATE = np.array([1.0, 0.2, 0.1, 0.15, 0.1, 0.05, -0.8])


def isothermal_ns():
    return make_builtin("isentropic_ns", {"gamma": 1.0, "pressure_coeff": 1.0})


def scalar_layer(template: str = "dirichlet", speed: float = -1.0, tangential_speed: float = 0.0):
    system, templates = make_builtin("scalar", {"speed": speed, "tangential_speed": tangential_speed})
    state = np.zeros(1)
    return constant_profile(system, state), templates[template](state)


def decaying_root(zeta: Frequency, speed: float, tangential_speed: float = 0.0) -> complex:
    """Root of mu^2 - a mu - (lambda + i b eta + eta^2) with negative real part."""
    eta = float(zeta.eta_vector[0])
    shift = zeta.lam + 1j * tangential_speed * eta + eta**2
    return (speed - np.sqrt(complex(speed**2 + 4.0 * shift))) / 2.0


class FrequencyTests(unittest.TestCase):
    def test_parabolic_projection_lands_on_the_sphere(self) -> None:
        zeta = Frequency(3.0, 0.5, (2.0,))
        hat = zeta.parabolic_projection()
        self.assertAlmostEqual(hat.tau**2 + hat.gamma**2 + hat.eta[0] ** 4, 1.0, places=12)
        self.assertAlmostEqual(hat.parabolic_weight, 1.0, places=12)

    def test_negative_gamma_is_rejected(self) -> None:
        with self.assertRaises(ValueError):
            Frequency(1.0, -0.1, (0.0,))

    def test_scan_grid_sample_count(self) -> None:
        grid = ScanGrid(hemisphere_points=3, rho_points=4, sphere_points=5)
        samples = grid.samples(2)
        self.assertEqual(len(samples), 3 * (4 + 1) + 5)
        self.assertTrue(all(zeta.gamma >= 0.0 for _, zeta in samples))
        self.assertEqual(samples, ScanGrid(hemisphere_points=3, rho_points=4, sphere_points=5).samples(2))

    def test_contours_need_enough_points(self) -> None:
        with self.assertRaises(ValueError):
            ContourSpec(0.0, 1.0, (0.0,), points=4)


class ScalarEvansTests(unittest.TestCase):
    def test_dirichlet_modulus_matches_closed_form(self) -> None:
        profile, bc = scalar_layer()
        for zeta in (Frequency(0.3, 0.5, (0.7,)), Frequency(-2.0, 0.1, (0.0,)), Frequency(0.0, 4.0, (-1.5,))):
            with self.subTest(zeta=zeta.vector.tolist()):
                mu = decaying_root(zeta, -1.0)
                evaluation = evans(profile, bc, zeta)
                self.assertEqual(evaluation.E_minus.dim, bc.Nb)
                self.assertAlmostEqual(evaluation.modulus, (1.0 + abs(mu) ** 2) ** -0.5, places=10)

    def test_tangential_transport_enters_the_symbol(self) -> None:
        profile, bc = scalar_layer(tangential_speed=0.8)
        zeta = Frequency(0.4, 0.6, (1.2,))
        mu = decaying_root(zeta, -1.0, 0.8)
        self.assertAlmostEqual(evans(profile, bc, zeta).modulus, (1.0 + abs(mu) ** 2) ** -0.5, places=10)

    def test_neumann_modulus_matches_closed_form(self) -> None:
        profile, bc = scalar_layer("neumann")
        zeta = Frequency(0.3, 0.5, (0.7,))
        mu = decaying_root(zeta, -1.0)
        self.assertAlmostEqual(evans(profile, bc, zeta).modulus, abs(mu) / np.sqrt(1.0 + abs(mu) ** 2), places=10)

    def test_neumann_inflow_layer_has_a_simple_zero_at_the_origin(self) -> None:
        profile, bc = scalar_layer("neumann", speed=1.0)
        winding, values = evans_winding(profile, bc, ContourSpec(0.0, 0.1, (0.0,), points=256))
        self.assertEqual(winding, 1)
        self.assertEqual(values.shape, (256,))

    def test_dirichlet_layer_has_no_zero_inside_a_contour(self) -> None:
        profile, bc = scalar_layer()
        winding, _ = evans_winding(profile, bc, ContourSpec(0.5, 0.4, (0.3,), points=128))
        self.assertEqual(winding, 0)

    def test_polar_limit_of_a_dirichlet_layer(self) -> None:
        profile, bc = scalar_layer()
        value, residual = evans_polar_limit(profile, bc, Frequency(0.6, 0.8, (0.0,)))
        self.assertAlmostEqual(value, 2.0**-0.5, places=6)
        self.assertLess(residual, 1e-2)


class HighFrequencyTests(unittest.TestCase):
    def test_parabolic_factor_on_the_sphere(self) -> None:
        profile, bc = scalar_layer()
        zeta = Frequency(0.6, 0.8, (0.0,))
        self.assertAlmostEqual(d2_on_sphere(profile, bc, zeta), 2.0**-0.5, places=9)
        tilted = Frequency(0.0, 0.0, (1.0,))
        self.assertAlmostEqual(d2_on_sphere(profile, bc, tilted), 2.0**-0.5, places=9)

    def test_rescaled_evans_has_trivial_hyperbolic_factor_without_hyperbolic_block(self) -> None:
        profile, bc = scalar_layer()
        evaluation = rescaled_evans_hf(profile, bc, Frequency(30.0, 5.0, (4.0,)))
        self.assertEqual(evaluation.D1, 1.0)
        self.assertGreater(evaluation.Dsc, 0.0)
        self.assertAlmostEqual(evaluation.product, evaluation.D2, places=12)

    def test_tracking_distance_decreases_along_a_ray(self) -> None:
        profile, bc = scalar_layer()
        distances = hf_tracking_check(profile, bc, Frequency(1.0, 1.0, (1.0,)), (10.0, 40.0, 160.0))
        self.assertEqual(len(distances), 3)
        self.assertGreater(distances[0], distances[1])
        self.assertGreater(distances[1], distances[2])

    def test_tracking_magnitudes_must_increase(self) -> None:
        profile, bc = scalar_layer()
        with self.assertRaises(ValueError):
            hf_tracking_check(profile, bc, Frequency(1.0, 1.0, (1.0,)), (40.0, 10.0))

    def test_hyperbolic_block_is_not_shifted_off_the_axis(self) -> None:
        system, _ = isothermal_ns()
        block = hyperbolic_block(system, SUBSONIC_INFLOW, Frequency(1.0, 0.0, (0.0,)))
        np.testing.assert_array_equal(block.real, np.zeros((1, 1)))
        np.testing.assert_allclose(np.abs(block), [[2.0]], rtol=1e-14)

    def test_incoming_subspace_on_the_imaginary_axis(self) -> None:
        system, _ = isothermal_ns()
        zeta = Frequency(1.0, 0.0, (0.5,))
        self.assertEqual(incoming_subspace(system, SUBSONIC_INFLOW, zeta).dim, 1)
        self.assertEqual(incoming_subspace(system, SUBSONIC_OUTFLOW, zeta).dim, 0)
        inflow = constant_profile(system, SUBSONIC_INFLOW)
        self.assertEqual(decoupled_subspace(inflow, Frequency(30.0, 0.0, (4.0,))).dim, 3)

    def test_parabolic_factor_stays_away_from_zero_on_the_sphere(self) -> None:
        system, templates = isothermal_ns()
        profile = constant_profile(system, SUBSONIC_OUTFLOW)
        bc = templates["dirichlet"](SUBSONIC_OUTFLOW)
        grid = ScanGrid(radius=1.0, hemisphere_points=2, rho_points=2, sphere_points=400, seed=3)
        sphere = [zeta for regime, zeta in grid.samples(system.d) if regime == "sphere"]
        self.assertEqual(len(sphere), 400)
        values = np.array([d2_on_sphere(profile, bc, zeta) for zeta in sphere])
        self.assertTrue(np.all(np.isfinite(values)))
        self.assertGreater(float(values.min()), 1e-2)
        self.assertLessEqual(float(values.max()), 1.0 + 1e-12)


class NavierStokesEvansTests(unittest.TestCase):
    def test_decaying_dimension_equals_boundary_condition_count(self) -> None:
        system, templates = make_builtin("isentropic_ns", {"gamma": 1.0, "pressure_coeff": 1.0})
        state = np.array([1.0, 0.0, -0.5])
        profile, bc = constant_profile(system, state), templates["outflow"](state)
        rng = np.random.default_rng(7)
        for vector in rng.standard_normal((5, 3)):
            vector[1] = abs(vector[1]) + 0.05
            evaluation = evans(profile, bc, Frequency.from_vector(vector))
            self.assertEqual(evaluation.E_minus.dim, bc.Nb)
            self.assertGreater(evaluation.modulus, 0.0)

    def test_nontransversal_mixed_inflow_layer_vanishes_at_the_origin(self) -> None:
        system, templates = make_builtin("isentropic_ns", {"gamma": 1.0, "pressure_coeff": 1.0})
        state = np.array([1.0, 0.0, 0.5])
        profile, bc = constant_profile(system, state), templates["inflow_mixed"](state)
        value, _ = evans_polar_limit(profile, bc, Frequency(0.6, 0.8, (0.0,)))
        self.assertLess(value, 1e-6)

    def test_evans_function_of_a_computed_layer(self) -> None:
        system, templates = isothermal_ns()
        q = np.array([1.0, 0.0, -2.0])
        g = (np.zeros(0), np.array([0.0, -1.8]))
        profile, _ = solve_profile_bc(system, templates["outflow"](q), q, g=g)
        self.assertFalse(profile.is_constant)
        bc = templates["outflow"](q).with_data(*g)
        coefficients = ProfileCoefficients.from_profile(profile)
        for zeta in (Frequency(0.5, 0.5, (0.5,)), Frequency(1.0, 0.2, (-0.8,)), Frequency(0.0, 1.0, (0.0,))):
            with self.subTest(zeta=zeta.vector.tolist()):
                evaluation = evans(profile, bc, zeta, coefficients)
                self.assertEqual(evaluation.E_minus.dim, bc.Nb)
                self.assertEqual(bc.Nb, 2)
                self.assertGreater(evaluation.modulus, 0.0)
                self.assertLessEqual(evaluation.modulus, 1.0 + 1e-12)
                self.assertGreater(evaluation.conditioning["steps"], 0.0)

    def test_decaying_dimension_for_full_navier_stokes_and_mhd(self) -> None:
        cases = {"full_ns": np.array([1.0, 0.0, -0.5, 1.0]), "mhd": MHD_STATE}
        rng = np.random.default_rng(13)
        for model_id, state in cases.items():
            system, templates = make_builtin(model_id)
            profile, bc = constant_profile(system, state), templates["dirichlet"](state)
            self.assertEqual(bc.Nb, 3)
            for vector in rng.standard_normal((4, system.d + 1)):
                vector[1] = abs(vector[1]) + 0.05
                zeta = Frequency.from_vector(vector)
                with self.subTest(model=model_id, zeta=vector.tolist()):
                    self.assertEqual(E_minus(profile, zeta).dim, bc.Nb)
                    self.assertGreater(evans(profile, bc, zeta).modulus, 0.0)


class SmallAmplitudeContinuityTests(unittest.TestCase):
    FREQUENCIES = (
        Frequency(0.5, 0.5, (0.5,)),
        Frequency(1.0, 0.2, (-0.8,)),
        Frequency(-0.7, 1.0, (0.3,)),
        Frequency(2.0, 0.5, (1.0,)),
    )

    def test_evans_function_moves_linearly_with_the_amplitude(self) -> None:
        system, templates = isothermal_ns()
        template = templates["outflow"]
        base, base_bc = constant_profile(system, SUBSONIC_OUTFLOW), template(SUBSONIC_OUTFLOW)
        reference = np.array([evans(base, base_bc, zeta).modulus for zeta in self.FREQUENCIES])
        errors = []
        for profile in small_amplitude_family(system, SUBSONIC_OUTFLOW, [0.2, 0.1, 0.05]):
            bc = template(profile.w[0])
            coefficients = ProfileCoefficients.from_profile(profile)
            values = np.array([evans(profile, bc, zeta, coefficients).modulus for zeta in self.FREQUENCIES])
            errors.append(float(np.max(np.abs(values - reference))))
        self.assertGreater(errors[-1], 0.0)
        for larger, smaller in zip(errors, errors[1:]):
            self.assertGreaterEqual(larger / smaller, 1.7)


class CounterexampleEvansTests(unittest.TestCase):
    def test_one_dimensional_contour_encloses_no_zero(self) -> None:
        system, bc = counterexample_system()
        profile = constant_profile(system, np.zeros(2))
        winding, _ = evans_winding(profile, bc, ContourSpec(1.0, 0.5, (0.0,)))
        self.assertEqual(winding, 0)


class UniformScanTests(unittest.TestCase):
    def test_scan_of_a_dirichlet_layer_is_clean_and_ordered(self) -> None:
        profile, bc = scalar_layer()
        grid = ScanGrid(radius=5.0, hemisphere_points=3, rho_points=3, sphere_points=6, seed=4)
        serial = scan_uniform_evans(profile, bc, grid)
        parallel = scan_uniform_evans(profile, bc, grid, jobs=3)
        self.assertEqual(serial.failures, [])
        self.assertFalse(serial.violation)
        self.assertGreater(serial.bounded_min, 0.0)
        self.assertGreater(serial.sphere_min, 0.0)
        self.assertEqual(serial.rows(), parallel.rows())
        self.assertEqual(serial.columns(), ["regime", "tau", "gamma", "eta1", "value", "condition", "residual", "error"])
        self.assertEqual(serial.to_dict()["kind"], "evans_scan")

    def test_winding_contours_are_reported(self) -> None:
        profile, bc = scalar_layer("neumann", speed=1.0)
        grid = ScanGrid(radius=2.0, hemisphere_points=2, rho_points=2, sphere_points=2, polar=False)
        report = scan_uniform_evans(profile, bc, grid, contours=[ContourSpec(0.0, 0.1, (0.0,), points=64)])
        self.assertEqual(report.windings[0]["winding"], 1)
        self.assertTrue(report.violation)


if __name__ == "__main__":
    unittest.main()
