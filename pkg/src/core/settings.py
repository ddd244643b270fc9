"""Process-wide settings read from the environment (and an optional ``.env``)."""

from __future__ import annotations

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()


LOG_LEVELS = {
    "error": "ERROR",
    "warn": "WARNING",
    "warning": "WARNING",
    "info": "INFO",
    "debug": "DEBUG",
}


class Settings:
    """Application settings."""

    PROJECT_ROOT = Path(__file__).resolve().parents[2]

    # LAYERLAB_LOG is one of error, warn, info, debug
    LOG_ENV_VAR = "LAYERLAB_LOG"
    LOG_LEVEL_NAME = os.getenv(LOG_ENV_VAR, "warn").strip().lower()

    LOG_FORMAT = (
        "<green>{time:HH:mm:ss.SSS}</green> | "
        "<level>{level: <8}</level> | "
        "<cyan>{extra[name]}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
        "<level>{message}</level>"
    )

    DEFAULT_JOBS = int(os.getenv("LAYERLAB_JOBS", "1"))
    DEFAULT_OUTPUT_DIR = os.getenv("LAYERLAB_OUT", "reports")
    SCHEMA_DIR = PROJECT_ROOT / "schemas"
    MAX_JOBS = 32

    @classmethod
    def log_level(cls, name: str | None = None) -> str | None:
        """Map a LAYERLAB_LOG value onto a loguru level name, ``None`` if unknown."""
        key = (name if name is not None else os.getenv(cls.LOG_ENV_VAR, cls.LOG_LEVEL_NAME)).strip().lower()
        return LOG_LEVELS.get(key)


settings = Settings()
