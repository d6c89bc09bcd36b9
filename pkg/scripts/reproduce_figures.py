#!/usr/bin/env python3
"""Write the CSV data behind every figure into a directory.

Slow at full settings (the per-m fits at beta = 8 dominate); pass --figure to
pick a subset.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from config.settings import Settings
from src.cli.options import parse_mode
from src.cli.figures import FIGURES, reproduce
from src.utils.errors import NMSpdcError

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
)
logger = logging.getLogger(__name__)


def main() -> int:
    parser = argparse.ArgumentParser(description="Reproduce figure data as CSV")
    parser.add_argument("--figure", action="append", choices=list(FIGURES), help="Repeat to select several (default: all)")
    parser.add_argument("--output-dir", type=Path, default=Path("figures"))
    parser.add_argument("--mode", default="full", help="'full' or 'central[:n_cut]'")
    parser.add_argument("--timestamp", action="store_true", help="Add a generation timestamp comment")
    args = parser.parse_args()

    settings = Settings.load()
    names = args.figure or list(FIGURES)
    try:
        written = reproduce(names, args.output_dir, parse_mode(args.mode, settings.n_cut), settings.tail_eps, args.timestamp)
    except NMSpdcError as e:
        logger.error("Reproduction failed: %s", e)
        return 3
    logger.info("Done: %d file(s) in %s", len(written), args.output_dir)
    return 0


if __name__ == "__main__":
    sys.exit(main())
