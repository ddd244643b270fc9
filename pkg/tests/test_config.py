from __future__ import annotations

import tempfile
import unittest
from pathlib import Path

from src.core.config import RunConfig, ScanConfig, load_config, parse_config
from src.core.errors import ConfigError, ConfigParse
from src.core.settings import Settings

NAVIER_STOKES = """
[model]
model_id = isentropic_ns
gamma = 1.4
mu = 1.5
state = 1.0, 0.0, -0.5

[bc]
template = outflow

[scan]
hemisphere_points = 4
rho_ladder = 1e-2, 5e-3
contour_center = 0.5+0.25j
contour_radius = 0.1

[output]
prefix = ns_outflow
"""


class ParseConfigTests(unittest.TestCase):
    def test_sections_are_typed(self) -> None:
        config = parse_config(NAVIER_STOKES)
        self.assertEqual(config.model.model_id, "isentropic_ns")
        self.assertEqual(dict(config.model.params), {"gamma": 1.4, "mu": 1.5})
        self.assertEqual(config.model.state, (1.0, 0.0, -0.5))
        self.assertEqual(config.bc.template, "outflow")
        self.assertIsNone(config.bc.g)
        self.assertEqual(config.scan.hemisphere_points, 4)
        self.assertEqual(config.scan.rho_ladder, (1e-2, 5e-3))
        self.assertEqual(config.scan.contour_center, complex(0.5, 0.25))
        self.assertTrue(config.scan.has_contour)
        self.assertEqual(config.prefix, "ns_outflow")

    def test_defaults(self) -> None:
        config = parse_config("[model]\nmodel_id = scalar\n")
        self.assertEqual(config.bc.template, "dirichlet")
        self.assertEqual(config.scan, ScanConfig())
        self.assertEqual(config.scan.floor, 1e-8)
        self.assertEqual(config.prefix, "scalar")
        self.assertFalse(config.scan.has_contour)

    def test_unknown_names_are_rejected(self) -> None:
        cases = {
            "section": "[model]\nmodel_id = scalar\n[spectrum]\nsize = 3\n",
            "key": "[model]\nmodel_id = scalar\nreynolds = 100\n",
            "model": "[model]\nmodel_id = euler\n",
            "template": "[model]\nmodel_id = scalar\n[bc]\ntemplate = robin\n",
            "foreign parameter": "[model]\nmodel_id = scalar\ngamma = 1.4\n",
            "missing model": "[bc]\ntemplate = dirichlet\n",
            "bad number": "[model]\nmodel_id = scalar\nspeed = fast\n",
            "syntax": "model_id = scalar\n",
        }
        for label, text in cases.items():
            with self.subTest(case=label):
                with self.assertRaises(ConfigParse):
                    parse_config(text)

    def test_invalid_values_are_configuration_errors(self) -> None:
        cases = {
            "radius": ("", "[scan]\nradius = -1\n"),
            "grid": ("", "[scan]\nsphere_points = 1\n"),
            "ladder": ("", "[scan]\nrho_ladder = 0.01\n"),
            "contour": ("", "[scan]\ncontour_points = 4\n"),
            "amplitude": ("amplitude = -0.1\n", ""),
            "chart radius": ("chart_radius = -1\n", ""),
        }
        for label, (model, scan) in cases.items():
            with self.subTest(case=label):
                with self.assertRaises(ConfigError):
                    parse_config("[model]\nmodel_id = scalar\n" + model + scan)

    def test_chart_radius_is_optional(self) -> None:
        self.assertIsNone(parse_config("[model]\nmodel_id = scalar\n").model.chart_radius)
        config = parse_config("[model]\nmodel_id = scalar\namplitude = 0.2\nchart_radius = 0.5\n")
        self.assertEqual((config.model.amplitude, config.model.chart_radius), (0.2, 0.5))


class OverrideTests(unittest.TestCase):
    def test_command_line_values_win(self) -> None:
        config = parse_config(NAVIER_STOKES).with_overrides(out="elsewhere", jobs=4, tol=1e-6, floor=1e-5, seed=9)
        self.assertEqual(config.output_dir, Path("elsewhere"))
        self.assertEqual(config.jobs, 4)
        self.assertEqual((config.scan.tol, config.scan.floor, config.model.seed), (1e-6, 1e-5, 9))
        self.assertEqual(config.scan.hemisphere_points, 4)

    def test_missing_overrides_keep_file_values(self) -> None:
        config = parse_config(NAVIER_STOKES)
        self.assertEqual(config.with_overrides(), config)

    def test_jobs_are_bounded(self) -> None:
        config = parse_config(NAVIER_STOKES)
        with self.assertRaises(ConfigError):
            config.with_overrides(jobs=0)
        with self.assertRaises(ConfigError):
            RunConfig(model=config.model, jobs=33)


class LoadConfigTests(unittest.TestCase):
    def test_reads_a_file(self) -> None:
        with tempfile.TemporaryDirectory() as directory:
            path = Path(directory) / "run.ini"
            path.write_text(NAVIER_STOKES, encoding="utf-8")
            self.assertEqual(load_config(path).model.model_id, "isentropic_ns")

    def test_missing_file(self) -> None:
        with tempfile.TemporaryDirectory() as directory:
            with self.assertRaises(ConfigParse):
                load_config(Path(directory) / "absent.ini")


class LogLevelTests(unittest.TestCase):
    def test_level_names(self) -> None:
        self.assertEqual(Settings.log_level("debug"), "DEBUG")
        self.assertEqual(Settings.log_level(" WARN "), "WARNING")
        self.assertIsNone(Settings.log_level("verbose"))


if __name__ == "__main__":
    unittest.main()
