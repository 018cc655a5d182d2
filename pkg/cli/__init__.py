"""
CLI - command-line surface for pricing, Psi curves, Phi tables and the
verification suite. Tables are CSV on standard output; logs are JSON on
standard error.

Architecture:
    cli/
    ├── config.py    # RunConfig (TOML run file + flag overrides)
    ├── output.py    # CSV rendering at 17 significant digits
    ├── verify.py    # VerificationSuite behind `verify`
    ├── commands.py  # get_cli_commands, BaseCommand, run
    └── __main__.py  # python -m cli
"""

from .config import RunConfig, load_run_config, parse_grid
from .commands import BaseCommand, build_parser, get_cli_commands, run

__all__ = [
    "RunConfig",
    "load_run_config",
    "parse_grid",
    "BaseCommand",
    "build_parser",
    "get_cli_commands",
    "run",
]
