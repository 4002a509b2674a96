"""Command-line surface for the package.

Six subcommands cover the full workflow: ``simulate`` integrates the
kinetics (full three-species or reduced planar) onto a logarithmic time
grid, ``classify`` names the parameter regime of a point, ``orbit``
exports a singular orbit, ``compare`` measures one parameter point
against its singular orbit, ``study`` runs a radial convergence study,
and ``sweep`` summarizes a parameter grid.  All artifacts are CSV or
JSON with shortest round-trip float formatting, so identical invocations
produce byte-identical files.

Exit codes: 0 on success, 2 on usage errors (argparse message on the
error stream), 1 on runtime failures (one-line structured error JSON on
the error stream).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from typing import IO, Mapping, Sequence

import numpy as np

from .analysis import (
    compare,
    convergence_study,
    report_to_json,
    sweep,
    timeseries_export,
    write_study_csv,
    write_sweep_csv,
)
from .model import (
    CLASSICAL_INITIAL,
    CLASSICAL_RATES,
    RateConstants,
    ScaledParams,
    full_jacobian,
    full_rhs,
    reduced_jacobian,
    reduced_rhs,
)
from .param_geometry import RegimeConfig, classify
from .singular_orbits import (
    SingularOrbit,
    gamma0_B2,
    gamma0_B11,
    gamma0_family_B12,
    gamma0_family_B3,
)
from .stiff_solver import SolverSettings, integrate

__all__ = ["CliConfig", "build_parser", "run", "main", "write_orbit_points_csv"]

_ORBIT_BUILDERS = {
    "b2": gamma0_B2,
    "b11": gamma0_B11,
    "b12": gamma0_family_B12,
    "b3": gamma0_family_B3,
}

_COMPARE_CSV_HEADER = [
    "eps1",
    "eps2",
    "c",
    "regime",
    "ymax_num",
    "ymax_pred",
    "rel_gap",
    "hausdorff_chart",
    "hausdorff_original",
    "singular_length",
    "genuine_length",
    "steps",
    "rejected",
    "scheme",
    "status",
]


@dataclasses.dataclass(frozen=True)
class CliConfig:
    """One validated invocation: the shared core plus per-command options.

    Exactly one parameterization mode may be set (``rates`` or
    ``scaled``); commands that take neither leave both ``None`` and carry
    their inputs in ``options``.
    """

    command: str
    rates: RateConstants | None = None
    scaled: ScaledParams | None = None
    regime_config: RegimeConfig = RegimeConfig()
    solver: SolverSettings | None = None
    out: str | None = None
    fmt: str = "csv"
    seed: int = 0
    options: Mapping[str, object] = dataclasses.field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.fmt not in ("csv", "json"):
            raise ValueError(f"output format must be csv or json, got {self.fmt!r}")
        if self.rates is not None and self.scaled is not None:
            raise ValueError("rate constants and scaled parameters are mutually exclusive")


def _radius_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(part) for part in text.split(",") if part.strip())
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad radius list {text!r}: {err}") from None
    if not values:
        raise argparse.ArgumentTypeError("radius list is empty")
    return values


def _grid_range(text: str) -> tuple[float, ...]:
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"range must be A:B:N, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"bad range {text!r}: {err}") from None
    if count < 1:
        raise argparse.ArgumentTypeError("range count must be at least 1")
    return tuple(float(v) for v in np.linspace(lo, hi, count))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robertson",
        description="Stiff kinetics, regime geometry, and singular-orbit comparisons.",
    )
    parser.add_argument(
        "--seed", type=int, default=0, help="seed for any randomized sampling"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser(
        "simulate", help="integrate the kinetics onto a logarithmic time grid"
    )
    mode = sim.add_mutually_exclusive_group(required=True)
    mode.add_argument(
        "--classic",
        action="store_true",
        help="canonical rates (4e-2, 3e7, 1e4) from the rest state (1, 0, 0)",
    )
    mode.add_argument(
        "--rates", nargs=3, type=float, metavar=("K1", "K2", "K3"),
        help="full three-species system with these rate constants",
    )
    mode.add_argument(
        "--eps", nargs=2, type=float, metavar=("EPS1", "EPS2"),
        help="reduced planar system at these scaled parameters",
    )
    sim.add_argument("--c", type=float, default=1.0, help="conserved total for --eps")
    sim.add_argument("--t-end", type=float, default=1e6)
    sim.add_argument("--rel-tol", type=float, default=1e-8)
    sim.add_argument("--abs-tol", type=float, default=1e-12)
    sim.add_argument("--out", required=True, help="time-series CSV path")

    cls = sub.add_parser("classify", help="name the regime of a parameter point")
    cls.add_argument("--eps1", type=float, required=True)
    cls.add_argument("--eps2", type=float, required=True)
    cls.add_argument("--beta1", type=float, default=RegimeConfig().beta1)
    cls.add_argument("--beta2", type=float, default=RegimeConfig().beta2)
    cls.add_argument("--beta3", type=float, default=RegimeConfig().beta3)
    cls.add_argument("--delta", type=float, default=RegimeConfig().delta)

    orb = sub.add_parser("orbit", help="export a singular orbit as CSV")
    orb.add_argument("--regime", choices=sorted(_ORBIT_BUILDERS), required=True)
    orb.add_argument(
        "--chart-param",
        type=float,
        required=True,
        help="family parameter: rescaled eps2 (b2, b12), eps2/eps1 (b11), or "
        "rescaled eps1 (b3)",
    )
    orb.add_argument("--c", type=float, default=1.0)
    orb.add_argument("--out", required=True, help="orbit CSV path")

    cmp_ = sub.add_parser(
        "compare", help="measure one parameter point against its singular orbit"
    )
    cmp_.add_argument("--eps1", type=float, required=True)
    cmp_.add_argument("--eps2", type=float, required=True)
    cmp_.add_argument("--c", type=float, default=1.0)
    cmp_.add_argument(
        "--json", action="store_true", help="write the full JSON report instead of CSV"
    )
    cmp_.add_argument("--out", required=True)

    stu = sub.add_parser("study", help="radial Hausdorff convergence study")
    stu.add_argument("--regime", choices=sorted(_ORBIT_BUILDERS), required=True)
    stu.add_argument("--fixed-coord", type=float, required=True)
    stu.add_argument(
        "--r-seq", type=_radius_list, required=True,
        help="comma-separated strictly decreasing radii",
    )
    stu.add_argument("--c", type=float, default=1.0)
    stu.add_argument("--out", required=True)

    swp = sub.add_parser("sweep", help="summarize a parameter grid")
    swp.add_argument(
        "--eps1-range", type=_grid_range, required=True,
        help="A:B:N inclusive linear grid",
    )
    swp.add_argument(
        "--eps2-range", type=_grid_range, required=True,
        help="A:B:N inclusive linear grid",
    )
    swp.add_argument("--c", type=float, default=1.0)
    swp.add_argument("--out", required=True)

    return parser


def _config_from(args: argparse.Namespace) -> CliConfig:
    command = args.command
    rates: RateConstants | None = None
    scaled: ScaledParams | None = None
    solver: SolverSettings | None = None
    regime_config = RegimeConfig()
    fmt = "csv"
    options: dict[str, object] = {}
    if command == "simulate":
        if args.classic:
            rates = CLASSICAL_RATES
        elif args.rates is not None:
            rates = RateConstants(*args.rates)
        else:
            scaled = ScaledParams(eps1=args.eps[0], eps2=args.eps[1], c=args.c)
        solver = SolverSettings(rel_tol=args.rel_tol, abs_tol=args.abs_tol)
        options["t_end"] = args.t_end
    elif command == "classify":
        regime_config = RegimeConfig(
            beta1=args.beta1, beta2=args.beta2, beta3=args.beta3, delta=args.delta
        )
        options.update(eps1=args.eps1, eps2=args.eps2)
    elif command == "orbit":
        options.update(regime=args.regime, chart_param=args.chart_param, c=args.c)
    elif command == "compare":
        scaled = ScaledParams(eps1=args.eps1, eps2=args.eps2, c=args.c)
        fmt = "json" if args.json else "csv"
    elif command == "study":
        options.update(regime=args.regime, fixed_coord=args.fixed_coord, c=args.c)
        options["radii"] = args.r_seq
    elif command == "sweep":
        options.update(
            eps1_values=args.eps1_range, eps2_values=args.eps2_range, c=args.c
        )
    return CliConfig(
        command=command,
        rates=rates,
        scaled=scaled,
        regime_config=regime_config,
        solver=solver,
        out=getattr(args, "out", None),
        fmt=fmt,
        seed=args.seed,
        options=options,
    )


def write_orbit_points_csv(orbit: SingularOrbit, stream: IO[str]) -> None:
    """Fixed-width orbit export: ``segment,kind,chart,c1,c2,c3``.

    Planar charts leave ``c3`` empty; three-coordinate charts fill it.
    """
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["segment", "kind", "chart", "c1", "c2", "c3"])
    for index, segment in enumerate(orbit.segments):
        for point in segment.points:
            coords = [repr(float(value)) for value in point]
            coords.extend([""] * (3 - len(coords)))
            writer.writerow([index, segment.kind, segment.chart, *coords])


def _cmd_simulate(config: CliConfig) -> int:
    t_end = float(config.options["t_end"])
    if config.scaled is not None:
        params = config.scaled
        rhs = lambda state: reduced_rhs(state, params)  # noqa: E731
        jac = lambda state: reduced_jacobian(state, params)  # noqa: E731
        start: Sequence[float] = (0.0, 0.0)
    else:
        rates = config.rates
        rhs = lambda state: full_rhs(state, rates)  # noqa: E731
        jac = lambda state: full_jacobian(state, rates)  # noqa: E731
        start = CLASSICAL_INITIAL
    trajectory = integrate(rhs, jac, start, (0.0, t_end), config.solver)
    with open(config.out, "w", newline="") as stream:
        timeseries_export(trajectory, stream)
    return 0


def _cmd_classify(config: CliConfig) -> int:
    regime = classify(
        float(config.options["eps1"]),
        float(config.options["eps2"]),
        config.regime_config,
    )
    print(regime.value)
    return 0


def _cmd_orbit(config: CliConfig) -> int:
    builder = _ORBIT_BUILDERS[str(config.options["regime"])]
    orbit = builder(float(config.options["chart_param"]), float(config.options["c"]))
    with open(config.out, "w", newline="") as stream:
        write_orbit_points_csv(orbit, stream)
    return 0


def _cmd_compare(config: CliConfig) -> int:
    report = compare(config.scaled, config.regime_config)
    with open(config.out, "w", newline="") as stream:
        if config.fmt == "json":
            json.dump(report_to_json(report), stream, indent=2)
            stream.write("\n")
        else:
            writer = csv.writer(stream, lineterminator="\n")
            writer.writerow(_COMPARE_CSV_HEADER)
            writer.writerow(
                [
                    repr(report.params.eps1),
                    repr(report.params.eps2),
                    repr(report.params.c),
                    report.regime.value,
                    repr(report.y_max_numeric),
                    repr(report.y_max_predicted),
                    repr(report.rel_gap),
                    repr(report.hausdorff_chart),
                    repr(report.hausdorff_original),
                    repr(report.singular_length),
                    repr(report.genuine_length),
                    report.solver_stats.steps,
                    report.solver_stats.rejected,
                    report.solver_stats.scheme,
                    report.status,
                ]
            )
    return 0


def _cmd_study(config: CliConfig) -> int:
    study = convergence_study(
        str(config.options["regime"]).upper(),
        float(config.options["fixed_coord"]),
        config.options["radii"],
        float(config.options["c"]),
        config.regime_config,
    )
    with open(config.out, "w", newline="") as stream:
        write_study_csv(study, stream)
    return 0


def _cmd_sweep(config: CliConfig) -> int:
    rows = sweep(
        config.options["eps1_values"],
        config.options["eps2_values"],
        float(config.options["c"]),
        config.regime_config,
    )
    with open(config.out, "w", newline="") as stream:
        write_sweep_csv(rows, stream)
    return 0


_HANDLERS = {
    "simulate": _cmd_simulate,
    "classify": _cmd_classify,
    "orbit": _cmd_orbit,
    "compare": _cmd_compare,
    "study": _cmd_study,
    "sweep": _cmd_sweep,
}


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv`` and execute; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        config = _config_from(args)
        return _HANDLERS[config.command](config)
    except Exception as err:  # noqa: BLE001 - the CLI boundary maps failures to exit codes
        payload = {"error": {"type": type(err).__name__, "message": str(err)}}
        print(json.dumps(payload), file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
