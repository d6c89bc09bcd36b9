#!/usr/bin/env python3
"""Write the self-regression baselines under baselines/.

Existing files are kept unless --force is given, so a baseline only changes
when someone decides it should.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

# Allow imports from project root
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.cli.figures import eigen_approx_csv, figure_csv

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(message)s",
)
logger = logging.getLogger(__name__)

BASELINE_DIR = Path(__file__).resolve().parent.parent / "baselines"
FIGURE_BASELINES = ("fig6", "fig7", "fig8", "fig9")


def save(name: str, text: str, force: bool) -> None:
    path = BASELINE_DIR / name
    if path.exists() and not force:
        logger.info("Keeping existing %s", path)
        return
    BASELINE_DIR.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    logger.info("Wrote %s", path)


def main() -> None:
    parser = argparse.ArgumentParser(description="Collect regression baselines")
    parser.add_argument("--force", action="store_true", help="Overwrite existing baseline files")
    parser.add_argument("--skip-figures", action="store_true", help="Only the eigenvalue-fit table")
    args = parser.parse_args()

    save("eigen_approx.csv", eigen_approx_csv(), args.force)
    if args.skip_figures:
        return
    for name in FIGURE_BASELINES:
        logger.info("Computing %s ...", name)
        save(f"{name}.csv", figure_csv(name), args.force)


if __name__ == "__main__":
    main()
