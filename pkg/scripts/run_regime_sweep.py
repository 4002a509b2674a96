"""Sweep a fixed-eps2 cut through all four regimes and print the summary.

The cut keeps eps2 at the classical value and steps eps1 down across the
regions, which is the cleanest way to see the peak height y_max shrink and
the half-conversion time t_half stretch out regime by regime.  Each point is
written via its own single-cell sweep so the CSV rows line up with the cut.
"""

from __future__ import annotations

import argparse
import csv
import io
import pathlib
import sys

from robertson.cli import run

EPS2 = "3.3333e-4"
EPS1_CUT = ["1e-3", "3e-5", "3e-8", "1e-10"]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", type=pathlib.Path, default=pathlib.Path("results"))
    args = parser.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)

    merged: list[str] = []
    header: str | None = None
    for eps1 in EPS1_CUT:
        cell = args.out_dir / f"sweep_cell_{eps1}.csv"
        code = run([
            "sweep", "--eps1-range", f"{eps1}:{eps1}:1",
            "--eps2-range", f"{EPS2}:{EPS2}:1", "--out", str(cell),
        ])
        if code != 0:
            return code
        lines = cell.read_text().splitlines()
        header = lines[0]
        merged.extend(lines[1:])
        cell.unlink()

    out = args.out_dir / "sweep_fixed_eps2_cut.csv"
    out.write_text("\n".join([header, *merged]) + "\n")
    print(f"wrote {out}")
    for row in csv.DictReader(io.StringIO("\n".join([header, *merged]))):
        print(f"  {row['regime']:>4}: eps1={row['eps1']:>8} "
              f"y_max={float(row['ymax_num']):.3e} t_half={float(row['t_half']):.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
