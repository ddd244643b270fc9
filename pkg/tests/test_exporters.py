from __future__ import annotations

import csv
import json
import tempfile
import unittest
from pathlib import Path

import numpy as np
from jsonschema import Draft202012Validator

from src.core.settings import settings
from src.exporters import (
    REPORT_KINDS,
    ReportContractError,
    format_cell,
    jsonable,
    render_csv,
    render_json,
    validate_report,
    write_csv,
    write_json_report,
)
from src.hyperbolic import counterexample_system, residual_tangent_space


def residual_payload() -> dict:
    system, bc = counterexample_system()
    return residual_tangent_space(system, bc, np.zeros(2)).to_dict()


class SchemaTests(unittest.TestCase):
    def test_every_report_kind_has_a_valid_schema(self) -> None:
        for kind in REPORT_KINDS:
            with self.subTest(kind=kind):
                path = settings.SCHEMA_DIR / f"{kind}.schema.json"
                schema = json.loads(path.read_text(encoding="utf-8"))
                Draft202012Validator.check_schema(schema)
                self.assertEqual(schema["properties"]["kind"]["const"], kind)

    def test_residual_report_validates(self) -> None:
        validate_report(jsonable(residual_payload()))

    def test_unknown_kind_is_rejected(self) -> None:
        with self.assertRaises(ReportContractError):
            validate_report({"kind": "spectrum"})

    def test_schema_violation_names_the_location(self) -> None:
        payload = jsonable(residual_payload())
        payload["Nplus"] = -1
        with self.assertRaises(ReportContractError) as raised:
            validate_report(payload)
        self.assertIn("Nplus", str(raised.exception))


class JsonReportTests(unittest.TestCase):
    def test_jsonable_unwraps_numpy_and_drops_non_finite_values(self) -> None:
        value = jsonable({"a": np.float64(1.5), "b": np.int64(3), "c": np.array([np.inf, 2.0]), "d": np.bool_(True)})
        self.assertEqual(value, {"a": 1.5, "b": 3, "c": [None, 2.0], "d": True})
        self.assertIsInstance(value["b"], int)

    def test_render_is_sorted_and_newline_terminated(self) -> None:
        text = render_json({"b": 1, "a": [1.0, None]})
        self.assertTrue(text.endswith("\n"))
        self.assertLess(text.index('"a"'), text.index('"b"'))
        with self.assertRaises(ValueError):
            render_json({"a": float("nan")})

    def test_write_creates_directories_and_leaves_no_temporaries(self) -> None:
        with tempfile.TemporaryDirectory() as directory:
            target = Path(directory) / "nested" / "counterexample_residual_bc.json"
            written = write_json_report({**residual_payload(), "dissipativity": None}, target)
            self.assertEqual(written, target)
            document = json.loads(target.read_text(encoding="utf-8"))
            self.assertEqual(document["kind"], "residual_bc")
            self.assertEqual(document["Nplus"], 1)
            self.assertEqual(sorted(path.name for path in target.parent.iterdir()), [target.name])

    def test_invalid_payload_is_not_written(self) -> None:
        with tempfile.TemporaryDirectory() as directory:
            target = Path(directory) / "broken.json"
            with self.assertRaises(ReportContractError):
                write_json_report({**residual_payload(), "method": "guess"}, target)
            self.assertFalse(target.exists())


class CsvTests(unittest.TestCase):
    def test_cells(self) -> None:
        self.assertEqual(format_cell(None), "")
        self.assertEqual(format_cell(True), "true")
        self.assertEqual(format_cell(np.bool_(False)), "false")
        self.assertEqual(format_cell(0.1), "0.10000000000000001")
        self.assertEqual(format_cell(np.float64(2.5)), "2.5")
        self.assertEqual(format_cell(3), "3")
        self.assertEqual(format_cell("bounded"), "bounded")

    def test_render_has_one_header_row(self) -> None:
        text = render_csv(["tau", "gamma", "error"], [[0.5, 1.0, None], [0.25, 0.0, "GapCollapse"]])
        self.assertEqual(text, "tau,gamma,error\n0.5,1,\n0.25,0,GapCollapse\n")

    def test_ragged_rows_are_rejected(self) -> None:
        with self.assertRaises(ValueError):
            render_csv(["z", "u"], [[0.0]])

    def test_written_table_reads_back(self) -> None:
        with tempfile.TemporaryDirectory() as directory:
            path = write_csv(["z", "u"], [[0.0, 1.0], [0.5, 0.75]], Path(directory) / "profile.csv")
            with path.open(newline="", encoding="utf-8") as stream:
                rows = list(csv.reader(stream))
        self.assertEqual(rows, [["z", "u"], ["0", "1"], ["0.5", "0.75"]])


if __name__ == "__main__":
    unittest.main()
