"""Command-line entry point.

Usage:
    kdlab <command> --config run.cfg [--out DIR] [--seed N] [--threads N]
    python -m src.cli diffuse --config run.cfg
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import structlog
from pydantic import ValidationError

from src.cli.config import RunConfig, config_reference, parse_config
from src.cli.outputs import emit_outputs
from src.cli.runner import COMMANDS, run_command
from src.config import settings
from src.errors import (
    AmbiguousEigenvalueError,
    CertificationError,
    ConfigurationError,
    DomainError,
    KineticLabError,
    OutputError,
    SymmetryViolationError,
)
from src.schemas.kmc import EnsembleConfig

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DOMAIN = 3
EXIT_CERTIFICATION = 4
EXIT_OUTPUT = 5

# ── Logging setup ────────────────────────────────────────────────────


def configure_logging(level: str = settings.log_level) -> None:
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(asctime)s %(levelname)-8s %(name)s — %(message)s",
        stream=sys.stderr,
    )
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
    )


log = structlog.get_logger(__name__)


# ── Arguments ────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdlab",
        description="Kinetic diffusion laboratory",
        epilog=config_reference(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, required=True, help="key = value run configuration")
    parser.add_argument("--out", type=Path, default=None, help="output directory (overrides output.dir)")
    parser.add_argument("--seed", type=int, default=None, help="master seed (overrides kmc.seed)")
    parser.add_argument("--threads", type=int, default=None, help="worker threads (default KDLAB_THREADS)")
    return parser


def apply_overrides(cfg: RunConfig, seed: int | None, out: Path | None) -> RunConfig:
    """Return cfg with --seed and --out applied; the seed is range-checked like a config value."""
    update: dict[str, object] = {}
    if seed is not None:
        update["kmc"] = EnsembleConfig.model_validate({**cfg.kmc.model_dump(), "seed": seed})
    if out is not None:
        update["output"] = cfg.output.model_copy(update={"dir": str(out)})
    return cfg.model_copy(update=update) if update else cfg


def exit_code(exc: KineticLabError) -> int:
    if isinstance(exc, ConfigurationError):
        return EXIT_CONFIG
    if isinstance(exc, DomainError | AmbiguousEigenvalueError | SymmetryViolationError):
        return EXIT_DOMAIN
    if isinstance(exc, CertificationError):
        return EXIT_CERTIFICATION
    if isinstance(exc, OutputError):
        return EXIT_OUTPUT
    return EXIT_FAILURE


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging()
    if args.threads is not None and args.threads < 1:
        log.error("invalid_threads", threads=args.threads)
        return EXIT_CONFIG
    threads = args.threads or settings.threads

    started = time.perf_counter()
    try:
        cfg = apply_overrides(parse_config(args.config), args.seed, args.out)
        log.info("command_started", command=args.command, config=str(args.config), threads=threads)
        report = run_command(args.command, cfg, threads)
        if cfg.output.record_timing:
            report = report.model_copy(update={"timing": {"elapsed_s": time.perf_counter() - started}})
        manifest = emit_outputs(report, Path(cfg.output.dir))
    except ValidationError as exc:
        # --seed outside the accepted range
        log.error("command_failed", command=args.command, error=str(exc), exit_code=EXIT_CONFIG)
        return EXIT_CONFIG
    except KineticLabError as exc:
        code = exit_code(exc)
        log.error("command_failed", command=args.command, error=str(exc), exit_code=code)
        return code

    log.info(
        "command_finished",
        command=args.command,
        elapsed_s=round(time.perf_counter() - started, 3),
        files=len(manifest),
        out=cfg.output.dir,
    )
    if report.failed_checks:
        # outputs are already on disk; the exit code flags them as uncertified
        log.warning(
            "certification_failed",
            command=args.command,
            checks=report.failed_checks,
            exit_code=EXIT_CERTIFICATION,
        )
        return EXIT_CERTIFICATION
    return EXIT_OK
