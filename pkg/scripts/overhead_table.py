#!/usr/bin/env python3
"""Tabulate the worst-case sampling overhead against gate count and grid
resolution, including each resolution's design-depth budget where the
overhead meets the universal e^(pi^2/4) ~ 11.79 ceiling."""

import argparse
import sys

from pai.cli import main


def run() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output", default="results/overhead")
    parser.add_argument("--bits-list", default="4,5,6,7,8,10,12")
    parser.add_argument(
        "--gate-counts", default="1,4,16,64,256,1024,4096,16384"
    )
    parser.add_argument("--threads", default=None)
    args = parser.parse_args()

    argv = [
        "overhead",
        "--output", args.output,
        "--bits-list", args.bits_list,
        "--gate-counts", args.gate_counts,
    ]
    if args.threads is not None:
        argv += ["--threads", args.threads]
    return main(argv)


if __name__ == "__main__":
    sys.exit(run())
