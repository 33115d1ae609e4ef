"""Navigation comparison of all four methods at matched replay budgets.

    python3 scripts/compare_navigation.py [--out results/navigation] [--jobs 1]
"""

import argparse
import sys
from pathlib import Path

from seqreplay.cli import main

HERE = Path(__file__).resolve().parent

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/navigation")
    parser.add_argument("--jobs", default="1")
    args = parser.parse_args()
    sys.exit(main(["compare", "--config", str(HERE / "navigation.ini"), "--out", args.out,
                   "--jobs", args.jobs, "--smooth", "10"]))
