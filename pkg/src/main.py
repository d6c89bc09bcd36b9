from __future__ import annotations

import argparse
import sys

from config.settings import Settings
from src.cli.handlers import EXIT_OK, EXIT_USAGE, exit_code_for, register_commands
from src.utils.errors import ConfigError, NMSpdcError
from src.utils.logger import setup_logger


def build_parser(settings: Settings) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nm-spdc",
        description="Block-diagonal simulator of degenerate down-conversion with a quantized pump",
    )
    register_commands(parser, settings)
    return parser


def main(argv: list[str] | None = None) -> int:
    try:
        settings = Settings.load()
    except ConfigError as e:
        setup_logger().error("Configuration error: %s", e)
        return EXIT_USAGE

    logger = setup_logger(level=settings.log_level, log_file=settings.log_file)

    parser = build_parser(settings)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on bad usage and 0 on --help
        return int(e.code or 0)

    logger.debug("Running %s (%s)", args.command, vars(args))
    try:
        args.handler(args, settings)
    except NMSpdcError as e:
        code = exit_code_for(e)
        logger.error("%s: %s", type(e).__name__, e)
        return code
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return 130
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
