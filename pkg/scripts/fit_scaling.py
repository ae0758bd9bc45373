"""Fit log-log runtime exponents from a ``rbdhess bench`` CSV.

    rbdhess bench --N 8 16 32 64 -o serial.csv
    python scripts/fit_scaling.py serial.csv
"""

import argparse
from collections import defaultdict
from pathlib import Path

from rbdhess.cli import read_csv, scaling_exponent


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("csv", nargs="+", type=Path)
    parser.add_argument("--statistic", choices=("median_ns", "p10_ns", "p90_ns"), default="median_ns")
    args = parser.parse_args()
    for path in args.csv:
        groups = defaultdict(list)
        for r in read_csv(path.read_text()):
            groups[r.algorithm, r.chain, r.bf, r.joint].append((r.N, getattr(r, args.statistic)))
        for (alg, chain, bf, joint), points in groups.items():
            points.sort()
            if len(points) < 2:
                continue
            sizes, times = zip(*points)
            shape = chain if chain == "serial" else f"{chain} bf={bf}"
            print(f"{path.name}: {alg:<4} {shape:<14} {joint:<10} N={list(sizes)}  exponent {scaling_exponent(sizes, times):.2f}")


if __name__ == "__main__":
    main()
