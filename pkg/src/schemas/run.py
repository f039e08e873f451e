"""Pydantic schemas for command reports and emitted files."""

from __future__ import annotations

from typing import Any

from pydantic import BaseModel, ConfigDict, Field


class Table(BaseModel):
    """Rectangular numeric table written as CSV; rows hold floats or ints."""

    model_config = ConfigDict(frozen=True)

    columns: list[str]
    rows: list[list[float | int]]


class ManifestEntry(BaseModel):
    file: str
    sha256: str
    bytes: int


class RunReport(BaseModel):
    """Everything a command produced. `tables` become CSV files next to report.json."""

    command: str
    config: dict[str, Any]
    versions: dict[str, str]
    timing: dict[str, float] | None = None
    result: dict[str, Any] = Field(default_factory=dict)
    tables: dict[str, Table] = Field(default_factory=dict)
    failed_checks: list[str] = Field(default_factory=list, description="Result flags that came out false")
    manifest: list[ManifestEntry] = Field(default_factory=list)
