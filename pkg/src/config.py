"""Process-level settings via pydantic-settings.

Everything that describes *how* a run executes (threads, log level) rather than *what*
it computes. Run parameters live in `src.cli.config.RunConfig`.
"""

from __future__ import annotations

import os

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


def _default_threads() -> int:
    return os.cpu_count() or 1


class Settings(BaseSettings):
    """Root settings, loaded from KDLAB_* environment variables.

    Usage:
        settings = Settings()
        settings.threads
        settings.log_level
    """

    model_config = SettingsConfigDict(env_prefix="KDLAB_", env_file=".env", extra="ignore")

    environment: str = Field(default="development")
    log_level: str = Field(default="INFO")
    threads: int = Field(default_factory=_default_threads, ge=1, description="Worker threads for data-parallel work")

    @field_validator("log_level")
    @classmethod
    def validate_log_level(cls, v: str) -> str:
        """Ensure log level is valid."""
        valid = {"DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"}
        upper = v.upper()
        if upper not in valid:
            msg = f"Invalid log level: {v}. Must be one of {valid}"
            raise ValueError(msg)
        return upper


# Module-level singleton: import this wherever settings are needed.
settings = Settings()
