from __future__ import annotations

import argparse
import csv
import io
import json
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path
from unittest.mock import patch

import numpy as np

import cli

SUBSONIC_OUTFLOW = """
[model]
model_id = isentropic_ns
gamma = 1.0
pressure_coeff = 1.0
state = 1.0, 0.0, -0.5

[bc]
template = outflow
"""

SUPERSONIC_OUTFLOW = """
[model]
model_id = isentropic_ns
gamma = 1.0
pressure_coeff = 1.0
state = 1.0, 0.0, -2.0

[bc]
template = outflow
g = {g}
"""

SCALAR_SCAN = """
[model]
model_id = scalar

[scan]
radius = 5.0
hemisphere_points = 3
rho_points = 3
sphere_points = 4
"""

COUNTEREXAMPLE = """
[model]
model_id = counterexample

[bc]
template = neumann

[scan]
lop_grid = 16
"""


class CommandLineTests(unittest.TestCase):
    def setUp(self) -> None:
        self._directory = tempfile.TemporaryDirectory()
        self.root = Path(self._directory.name)
        self.out = self.root / "reports"

    def tearDown(self) -> None:
        self._directory.cleanup()

    def run_cli(self, command: str, text: str, *extra: str) -> tuple[int, str]:
        config = self.root / "run.ini"
        config.write_text(text, encoding="utf-8")
        stdout = io.StringIO()
        with redirect_stdout(stdout), redirect_stderr(io.StringIO()):
            code = cli.main([command, "--config", str(config), "--out", str(self.out), *extra])
        return code, stdout.getvalue()

    def test_parser_exposes_the_four_commands(self) -> None:
        parser = cli.create_parser()
        subparsers = next(action for action in parser._actions if isinstance(action, argparse._SubParsersAction))
        self.assertEqual(set(subparsers.choices), {"audit", "profile", "evans-scan", "lop-scan"})

    def test_command_line_errors_exit_with_configuration_code(self) -> None:
        parser = cli.create_parser()
        for argv in (["profile"], ["lop-scan", "--config", "run.ini", "--jobs", "40"], ["spectrum"]):
            with self.subTest(argv=argv):
                with redirect_stderr(io.StringIO()):
                    with self.assertRaises(SystemExit) as stopped:
                        parser.parse_args(argv)
                self.assertEqual(stopped.exception.code, cli.EXIT_CONFIG)

    def test_unknown_configuration_key(self) -> None:
        code, stdout = self.run_cli("profile", SUBSONIC_OUTFLOW + "reynolds = 10\n")
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertTrue(stdout.startswith("FAIL:"))

    def test_missing_state_for_a_variable_coefficient_model(self) -> None:
        code, _ = self.run_cli("profile", "[model]\nmodel_id = isentropic_ns\n")
        self.assertEqual(code, cli.EXIT_CONFIG)

    def test_profile_writes_table_and_summary(self) -> None:
        code, stdout = self.run_cli("profile", SUBSONIC_OUTFLOW)
        self.assertEqual(code, cli.EXIT_PASS)
        self.assertIn("PASS:", stdout)
        with (self.out / "isentropic_ns_profile.csv").open(newline="", encoding="utf-8") as stream:
            rows = list(csv.reader(stream))
        self.assertEqual(rows[0], ["z", "rho", "u", "v", "du/dz", "dv/dz"])
        summary = json.loads((self.out / "isentropic_ns_profile.json").read_text(encoding="utf-8"))
        self.assertEqual(summary["construction"], "constant")
        self.assertTrue(summary["transversality"]["transversal"])
        self.assertEqual(summary["table"], "isentropic_ns_profile.csv")

    def test_boundary_value_profile(self) -> None:
        code, _ = self.run_cli("profile", SUPERSONIC_OUTFLOW.format(g="0.0, -1.8"))
        self.assertEqual(code, cli.EXIT_PASS)
        summary = json.loads((self.out / "isentropic_ns_profile.json").read_text(encoding="utf-8"))
        self.assertEqual(summary["construction"], "boundary_value")

    def test_unreachable_boundary_data_is_a_numerical_failure(self) -> None:
        code, stdout = self.run_cli("profile", SUPERSONIC_OUTFLOW.format(g="0.0, -0.3"))
        self.assertEqual(code, cli.EXIT_NUMERICAL)
        self.assertIn("FAIL:", stdout)
        self.assertFalse((self.out / "isentropic_ns_profile.json").exists())

    def test_boundary_data_size_is_checked(self) -> None:
        code, _ = self.run_cli("profile", SUPERSONIC_OUTFLOW.format(g="-1.8"))
        self.assertEqual(code, cli.EXIT_CONFIG)

    def test_template_rejecting_the_state_is_a_configuration_error(self) -> None:
        code, stdout = self.run_cli("profile", SUBSONIC_OUTFLOW.replace("-0.5", "0.5"))
        self.assertEqual(code, cli.EXIT_CONFIG)
        self.assertTrue(stdout.startswith("FAIL: configuration error: BadParams"))

    def test_stray_value_errors_are_numerical_failures(self) -> None:
        with patch("cli.profile_command", side_effect=ValueError("bad shape")):
            code, stdout = self.run_cli("profile", SUBSONIC_OUTFLOW)
        self.assertEqual(code, cli.EXIT_NUMERICAL)
        self.assertTrue(stdout.startswith("FAIL: NumericalError: bad shape"))

    def test_stable_manifold_profile_of_a_larger_amplitude(self) -> None:
        code, _ = self.run_cli("profile", SUBSONIC_OUTFLOW.replace("[bc]", "amplitude = 0.2\n\n[bc]"))
        self.assertEqual(code, cli.EXIT_PASS)
        summary = json.loads((self.out / "isentropic_ns_profile.json").read_text(encoding="utf-8"))
        self.assertEqual(summary["construction"], "stable_manifold")
        self.assertAlmostEqual(float(np.linalg.norm(summary["profile"]["amplitude"])), 0.2, places=10)

    def test_evans_scan_of_a_stable_scalar_layer(self) -> None:
        code, stdout = self.run_cli("evans-scan", SCALAR_SCAN, "--jobs", "2")
        self.assertEqual(code, cli.EXIT_PASS)
        self.assertIn("PASS: evans-scan", stdout)
        summary = json.loads((self.out / "scalar_evans_scan.json").read_text(encoding="utf-8"))
        self.assertFalse(summary["violation"])
        self.assertEqual(summary["failed"], 0)
        self.assertTrue((self.out / "scalar_evans_scan.csv").exists())

    def test_lopatinski_violation_exits_with_one(self) -> None:
        code, stdout = self.run_cli("lop-scan", COUNTEREXAMPLE)
        self.assertEqual(code, cli.EXIT_VIOLATION)
        self.assertIn("FAIL: lop-scan violation", stdout)
        residual = json.loads((self.out / "counterexample_residual_bc.json").read_text(encoding="utf-8"))
        self.assertEqual(residual["Nplus"], 1)
        self.assertFalse(residual["dissipativity"]["dissipative"])
        scan = json.loads((self.out / "counterexample_lop_scan.json").read_text(encoding="utf-8"))
        self.assertTrue(scan["violation"])

    def test_audit_writes_a_report(self) -> None:
        code, stdout = self.run_cli("audit", SUBSONIC_OUTFLOW, "--seed", "3")
        self.assertIn(code, (cli.EXIT_PASS, cli.EXIT_VIOLATION))
        report = json.loads((self.out / "isentropic_ns_audit.json").read_text(encoding="utf-8"))
        self.assertEqual(report["kind"], "audit")
        self.assertIn("Audit report:", stdout)


if __name__ == "__main__":
    unittest.main()
