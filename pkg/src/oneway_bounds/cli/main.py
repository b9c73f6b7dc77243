#!/usr/bin/env python3

"""
oneway: command-line front end.

    oneway bench gen --kind gt --n 4 --out gt4.json --dist-out uniform.json
    oneway measure vc --fn gt4.json
    oneway measure rec --fn xor.json --dist uniform.json --eps 0.1 --exact
    oneway protocol run --fn gt8.json --dist corr.json --eps 0.2 --trials 10000 --seed 7
    oneway extractor audit --fn ip4.json --eps 0.2 --rec
    oneway quantum check --suite holevo --trials 500 --seed 1

Exit codes: 0 success, 1 invalid input, 2 cap exceeded or infeasible.
"""

import sys
import logging
import argparse
from dataclasses import dataclass
from typing import List, Optional

from ..core.config import load_env_overrides
from ..core.errors import OnewayError, ValidationError
from . import bench, extractor, measure, protocol, quantum
from .reports import emit, error_payload, write_json

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s [%(levelname)8s] %(name)s: %(message)s'

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2


@dataclass(frozen=True)
class RunConfig:
    """Flags shared by every subcommand."""

    command: str
    csv_path: Optional[str] = None
    json_path: Optional[str] = None
    threads: int = 1
    log_level: str = 'WARNING'

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> 'RunConfig':
        command = " ".join(p for p in (args.group, getattr(args, 'action', None)) if p)
        return cls(command, args.csv, args.json, args.threads, args.log_level)


def common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--csv', metavar='PATH', help='Write the result table as CSV')
    common.add_argument('--json', metavar='PATH', help='Write a JSON report (schema_version 1)')
    common.add_argument('--threads', type=int, default=1, help='Worker threads (default: 1)')
    common.add_argument('--log-level', default='WARNING',
                        choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Log level for standard error (default: WARNING)')
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='oneway', description='One-way communication complexity bounds')
    groups = parser.add_subparsers(dest='group', help='Command group')
    common = common_options()
    bench.register(groups, common)
    measure.register(groups, common)
    protocol.register(groups, common)
    extractor.register(groups, common)
    quantum.register(groups, common)
    return parser


def configure_logging(level: str) -> None:
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(format=LOG_FORMAT, stream=sys.stderr)
    logging.getLogger('oneway_bounds').setLevel(level)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_INVALID
    if not getattr(args, 'handler', None):
        parser.print_help()
        return EXIT_INVALID

    config = RunConfig.from_args(args)
    configure_logging(config.log_level)
    try:
        load_env_overrides()
        if config.threads < 1:
            raise ValidationError(f"--threads must be at least 1, got {config.threads}")
        report = args.handler(args, config)
        emit(report, config.csv_path, config.json_path)
        return EXIT_OK
    except (ValidationError, OSError, ValueError) as exc:
        return _fail(EXIT_INVALID, exc, config)
    except OnewayError as exc:
        # CapExceededError, InfeasibleError, SamplerError
        return _fail(EXIT_INFEASIBLE, exc, config)


def _fail(code: int, error: BaseException, config: RunConfig) -> int:
    print(f"error: {error}", file=sys.stderr)
    logger.debug("%s failed", config.command, exc_info=error)
    if config.json_path:
        write_json(config.json_path, error_payload(code, error))
    return code


def cli_main():
    """Console entry point for the oneway command."""
    sys.exit(main())


if __name__ == "__main__":
    cli_main()
