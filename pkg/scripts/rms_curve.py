#!/usr/bin/env python3
"""RMS estimator error versus shot budget on a small Trotterized ring.

The curve follows the 1/sqrt(N) shot-noise law and stays below the
worst-case weight bound (circuit sampling weight over sqrt(N)).  The
default sweep (budgets 100..100000, 120 repeats) takes a minute or two;
``--quick`` trims both."""

import argparse
import sys

from pai.cli import main


def run() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="results/rms")
    parser.add_argument("--quick", action="store_true")
    parser.add_argument("--threads", default=None)
    args = parser.parse_args()

    shot_grid = "100,1000,10000" if args.quick else "100,1000,10000,100000"
    repeats = "30" if args.quick else "120"
    argv = [
        "rms",
        "--output", args.output,
        "--shot-grid", shot_grid,
        "--repeats", repeats,
        "--master-seed", "7",
    ]
    if args.threads is not None:
        argv += ["--threads", args.threads]
    return main(argv)


if __name__ == "__main__":
    sys.exit(run())
