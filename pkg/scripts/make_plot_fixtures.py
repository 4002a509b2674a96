"""Regenerate the CSV fixtures consumed by the plotting package.

Every fixture is produced through the command-line interface so the files are
guaranteed to match the published CSV formats.  Outputs are byte-stable, so
rerunning this script leaves committed fixtures unchanged unless the
underlying numerics changed.
"""

from __future__ import annotations

import argparse
import pathlib
import sys

from robertson.cli import run

DEFAULT_OUT = pathlib.Path(__file__).resolve().parent.parent / "plots" / "tests" / "fixtures"

EPS2_CUT = "3.3333e-4"
RADII = "1e-2,3e-3,1e-3,3e-4"

JOBS: list[tuple[str, list[str]]] = [
    # Time series: the classical run in both formulations, the fixed-eps2
    # regime representatives, and a genuine orbit companion for the B2 phase
    # plane (eps1 = r^2, eps2 = r at r = 1e-2, so chart y = original y / 1e-2).
    ("classical_full.csv", ["simulate", "--classic", "--t-end", "1e6"]),
    ("classical_reduced.csv", ["simulate", "--eps", "1.3333e-9", EPS2_CUT, "--t-end", "1e9"]),
    ("rep_b11.csv", ["simulate", "--eps", "1e-3", EPS2_CUT, "--t-end", "1e4"]),
    ("rep_b12.csv", ["simulate", "--eps", "3e-5", EPS2_CUT, "--t-end", "3e5"]),
    ("rep_b2.csv", ["simulate", "--eps", "3e-8", EPS2_CUT, "--t-end", "5e8"]),
    ("rep_b3.csv", ["simulate", "--eps", "1e-10", EPS2_CUT, "--t-end", "2e13"]),
    ("genuine_b2.csv", ["simulate", "--eps", "1e-4", "1e-2", "--t-end", "1e5"]),
    # Singular orbits.
    ("orbit_b2.csv", ["orbit", "--regime", "b2", "--chart-param", "1.0"]),
    ("orbit_b11.csv", ["orbit", "--regime", "b11", "--chart-param", "0.5"]),
    # Convergence studies, one per regime.
    ("study_b2.csv", ["study", "--regime", "b2", "--fixed-coord", "1.0", "--r-seq", RADII]),
    ("study_b11.csv", ["study", "--regime", "b11", "--fixed-coord", "0.5", "--r-seq", RADII]),
    ("study_b12.csv", ["study", "--regime", "b12", "--fixed-coord", "0.5", "--r-seq", RADII]),
    ("study_b3.csv", ["study", "--regime", "b3", "--fixed-coord", "5e-4", "--r-seq", RADII]),
]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=pathlib.Path, default=DEFAULT_OUT)
    args = parser.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    for name, tail in JOBS:
        out = args.out_dir / name
        code = run([*tail, "--out", str(out)])
        if code != 0:
            print(f"failed on {name}", file=sys.stderr)
            return code
        print(f"wrote {out} ({out.stat().st_size} bytes)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
