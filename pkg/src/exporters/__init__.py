"""Report writers: CSV tables and schema-validated JSON summaries."""

from .csv_exporter import format_cell, render_csv, write_csv
from .json_exporter import REPORT_KINDS, ReportContractError, jsonable, render_json, validate_report, write_json_report

__all__ = [
    "REPORT_KINDS",
    "ReportContractError",
    "format_cell",
    "jsonable",
    "render_csv",
    "render_json",
    "validate_report",
    "write_csv",
    "write_json_report",
]
