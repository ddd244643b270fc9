"""loguru based logging for the layerlab kernels, scans and CLI."""

from __future__ import annotations

import json
import sys
import time
from functools import lru_cache, wraps
from typing import Any, Callable

from loguru import logger

from .settings import settings


@lru_cache
def get_logger(name: str):
    """Return the shared loguru logger bound to ``name``."""
    return logger.bind(name=name)


def setup_logging(level: str | None = None) -> str:
    """Route every record to stderr at the LAYERLAB_LOG level.

    stdout is reserved for the PASS/FAIL summary lines of the CLI, so the
    console sink is stderr.  Returns the effective loguru level name.
    """
    resolved = settings.log_level(level)
    logger.remove()
    logger.configure(extra={"name": "layerlab"})
    logger.add(
        sys.stderr,
        level=resolved or "WARNING",
        format=settings.LOG_FORMAT,
        colorize=False,
    )
    if resolved is None:
        get_logger("config").warning(
            f"unknown {settings.LOG_ENV_VAR} value {level!r}; using warn"
        )
    return resolved or "WARNING"


def log_performance(operation: str, duration: float, details: dict[str, Any] | None = None) -> None:
    performance_logger = get_logger("performance")
    entry = {
        "operation": operation,
        "duration_seconds": round(duration, 3),
        "details": details or {},
    }
    performance_logger.debug(f"performance: {json.dumps(entry, sort_keys=True, default=str)}")


def performance_monitor(operation_name: str | None = None):
    """Decorator logging wall time of the wrapped call at DEBUG."""

    def decorator(func: Callable) -> Callable:
        @wraps(func)
        def wrapper(*args, **kwargs):
            start = time.perf_counter()
            name = operation_name or f"{func.__module__}.{func.__name__}"
            try:
                result = func(*args, **kwargs)
            except Exception as error:
                log_performance(name, time.perf_counter() - start, {"status": "error", "error": type(error).__name__})
                raise
            log_performance(name, time.perf_counter() - start, {"status": "success"})
            return result

        return wrapper

    return decorator


numerics_logger = get_logger("numerics")
scan_logger = get_logger("scan")
cli_logger = get_logger("cli")
