"""Core components: settings, logging, errors and run configuration."""

from .errors import ConfigError, LayerlabError, ModelError, NumericalError
from .logging import (
    cli_logger,
    get_logger,
    log_performance,
    numerics_logger,
    performance_monitor,
    scan_logger,
    setup_logging,
)
from .settings import settings

__all__ = [
    "ConfigError",
    "LayerlabError",
    "ModelError",
    "NumericalError",
    "cli_logger",
    "get_logger",
    "log_performance",
    "numerics_logger",
    "performance_monitor",
    "scan_logger",
    "settings",
    "setup_logging",
]
