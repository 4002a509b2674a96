"""Command-line figure rendering: ``robertson-plots KIND --in ... --out ...``.

Exit codes: 0 on success, 2 for usage errors, 1 when rendering fails (missing
or malformed CSV, unwritable output) with a one-line message on stderr.
"""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, PlotSpec, render

__all__ = ["build_parser", "main", "run"]


def _param(text: str) -> tuple[str, float]:
    key, separator, value = text.partition("=")
    if not separator or not key:
        raise argparse.ArgumentTypeError(f"parameter must be KEY=VALUE, got {text!r}")
    try:
        return key, float(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"parameter {key!r} needs a numeric value, got {value!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robertson-plots", description=__doc__)
    parser.add_argument("kind", choices=KINDS, help="figure kind")
    parser.add_argument(
        "--in", dest="inputs", nargs="+", required=True, metavar="CSV",
        help="input CSV file(s); count and format depend on the kind",
    )
    parser.add_argument("--out", required=True, help="output image (.png or .svg)")
    parser.add_argument("--title", help="figure title override")
    parser.add_argument(
        "--param", action="append", default=[], type=_param, metavar="KEY=VALUE",
        help="kind-specific numeric parameter (repeatable)",
    )
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    try:
        spec = PlotSpec(
            kind=args.kind,
            inputs=tuple(args.inputs),
            out=args.out,
            title=args.title,
            params=dict(args.param),
        )
        result = render(spec)
    except Exception as exc:
        print(f"robertson-plots: error: {exc}", file=sys.stderr)
        return 1
    print(result.path)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
