"""Sweeps of the window length, capture length and splice count on navigation.

    python3 scripts/memory_sweeps.py [--out results/sweeps] [--jobs 1]
"""

import argparse
import sys
from pathlib import Path

from seqreplay.cli import main

HERE = Path(__file__).resolve().parent
GRID = {
    "m_b": [10, 100, 1000, 5000],
    "m_t": [10, 100, 1000],
    "n_v": [1, 10, 25, 50],
}

if __name__ == "__main__":
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results/sweeps")
    parser.add_argument("--jobs", default="1")
    args = parser.parse_args()
    for param, values in GRID.items():
        code = main(["sweep", "--config", str(HERE / "navigation.ini"), "--out", f"{args.out}/{param}",
                     "--jobs", args.jobs, "--param", param, "--values", *map(str, values)])
        if code:
            sys.exit(code)
