"""Schema-checked JSON reports written atomically."""

from __future__ import annotations

import json
import math
import os
import tempfile
from functools import lru_cache
from pathlib import Path
from typing import Any

import numpy as np
from jsonschema import Draft202012Validator

from src.core.errors import LayerlabError
from src.core.logging import get_logger
from src.core.settings import settings

export_logger = get_logger("exporters")

REPORT_KINDS = ("audit", "profile", "evans_scan", "lop_scan", "residual_bc")


class ReportContractError(LayerlabError):
    """A report payload does not satisfy its JSON Schema."""


def jsonable(value: Any) -> Any:
    """Plain JSON values: numpy scalars unwrapped, non-finite floats as null."""
    if isinstance(value, dict):
        return {str(key): jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        number = float(value)
        return number if math.isfinite(number) else None
    return value


@lru_cache
def _validator(kind: str, schema_dir: str) -> Draft202012Validator:
    path = Path(schema_dir) / f"{kind}.schema.json"
    schema = json.loads(path.read_text(encoding="utf-8"))
    Draft202012Validator.check_schema(schema)
    return Draft202012Validator(schema)


def validate_report(payload: dict[str, Any], schema_dir: str | Path | None = None) -> None:
    kind = payload.get("kind")
    if kind not in REPORT_KINDS:
        raise ReportContractError(f"unknown report kind {kind!r}", known=REPORT_KINDS)
    validator = _validator(kind, str(schema_dir or settings.SCHEMA_DIR))
    errors = sorted(validator.iter_errors(payload), key=lambda error: list(error.absolute_path))
    if errors:
        first = errors[0]
        location = "/".join(str(part) for part in first.absolute_path) or "<root>"
        raise ReportContractError(f"{kind} report violates its schema at {location}: {first.message}", errors=len(errors))


def render_json(payload: dict[str, Any]) -> str:
    return json.dumps(payload, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_json_report(payload: dict[str, Any], path: str | Path, schema_dir: str | Path | None = None) -> Path:
    """Validate and write ``payload``; the target only ever holds a complete file."""
    document = jsonable(payload)
    validate_report(document, schema_dir)
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    handle, temporary = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent)
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="\n") as stream:
            stream.write(render_json(document))
        os.replace(temporary, target)
    except BaseException:
        Path(temporary).unlink(missing_ok=True)
        raise
    export_logger.debug(f"wrote {document['kind']} report {target}")
    return target


__all__ = ["REPORT_KINDS", "ReportContractError", "jsonable", "render_json", "validate_report", "write_json_report"]
