"""Deterministic emission of a RunReport: CSV tables, report.json, sha256 manifest."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import logging
from pathlib import Path

from src.errors import OutputError
from src.schemas.run import ManifestEntry, RunReport, Table

logger = logging.getLogger(__name__)

REPORT_NAME = "report.json"


def format_cell(value: float | int) -> str:
    """Integers as-is, floats with 17 significant digits."""
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    return f"{float(value):.16e}"


def render_table(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([format_cell(v) for v in row])
    return buffer.getvalue()


def _write(path: Path, text: str) -> ManifestEntry:
    data = text.encode("utf-8")
    try:
        path.write_bytes(data)
    except OSError as exc:
        raise OutputError(f"Cannot write {path.name} ({exc.strerror})", str(path)) from exc
    return ManifestEntry(file=path.name, sha256=hashlib.sha256(data).hexdigest(), bytes=len(data))


def emit_outputs(report: RunReport, directory: Path) -> list[ManifestEntry]:
    """Write tables as `<name>.csv` and the report as report.json.

    report.json lists the CSV checksums; the returned manifest adds report.json itself.

    Raises:
        OutputError: the directory cannot be created or a file cannot be written.
    """
    try:
        directory.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"Cannot create output directory ({exc.strerror})", str(directory)) from exc

    manifest = [_write(directory / f"{name}.csv", render_table(table)) for name, table in sorted(report.tables.items())]
    summary = report.model_copy(update={"manifest": manifest})
    payload = summary.model_dump(mode="json", exclude={"tables"})
    text = json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"
    entries = [*manifest, _write(directory / REPORT_NAME, text)]
    logger.info("Wrote %d files to %s", len(entries), directory)
    return entries
