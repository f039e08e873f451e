"""Command-line runner."""

from src.cli.config import RunConfig, dump_config, parse_config
from src.cli.outputs import emit_outputs
from src.cli.runner import run_command

__all__ = ["RunConfig", "parse_config", "dump_config", "run_command", "emit_outputs"]
