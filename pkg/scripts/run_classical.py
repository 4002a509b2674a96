"""Run the classical problem in both formulations and report the y plateau.

Writes two time-series CSVs (full kinetics and the reduced fast-time system)
into the output directory, then reads the reduced one back and prints the
maximal y against the predicted plateau sqrt(eps1*c).
"""

from __future__ import annotations

import argparse
import csv
import math
import pathlib
import sys

from robertson.cli import run

CLASSICAL_EPS = ("1.3333e-9", "3.3333e-4")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=pathlib.Path, default=pathlib.Path("results"))
    args = parser.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    full_csv = args.out_dir / "classical_full.csv"
    reduced_csv = args.out_dir / "classical_reduced.csv"
    jobs = [
        ["simulate", "--classic", "--t-end", "1e6", "--out", str(full_csv)],
        ["simulate", "--eps", *CLASSICAL_EPS, "--t-end", "1e9", "--out", str(reduced_csv)],
    ]
    for argv_job in jobs:
        code = run(argv_job)
        if code != 0:
            return code
        print(f"wrote {argv_job[-1]}")

    with reduced_csv.open() as stream:
        rows = list(csv.DictReader(stream))
    y_max = max(float(row["y"]) for row in rows)
    predicted = math.sqrt(float(CLASSICAL_EPS[0]) * 1.0)
    print(f"reduced y_max = {y_max:.6e} (plateau sqrt(eps1*c) = {predicted:.6e}, "
          f"relative gap {abs(y_max - predicted) / predicted:.2e})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
