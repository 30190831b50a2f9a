"""Command-line entry point: ``mirrorwave <subcommand> [options]``.

Exit codes: 0 success, 1 a validation criterion failed, 2 configuration
error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import time
from typing import Sequence

from . import experiments as ex
from .errors import InvalidInputError, MirrorwaveError

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

_SUBCOMMAND_KIND = {
    "moments": ex.ExperimentKind.MOMENTS,
    "series": ex.ExperimentKind.LAYERED_SERIES,
    "mc": ex.ExperimentKind.LAYERED_MC,
    "figure": ex.ExperimentKind.FIGURE,
    "waveguide": ex.ExperimentKind.WAVEGUIDE_SUITE,
    "validate": ex.ExperimentKind.VALIDATION,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    common.add_argument("--seed", type=int, help="base random seed")
    common.add_argument("--out", help="CSV output path (default: stdout)")
    common.add_argument("--tol", type=float, help="relative tolerance of the series")
    common.add_argument("--samples", type=int, help="number of Monte Carlo samples")

    parser = _Parser(prog="mirrorwave", description="Transmission through mirror-symmetric random media.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("moments", parents=[common], help="moments E[|T|^(2n)] of a random half-section")
    p.add_argument("--ells", help="strength grid, e.g. '0.5,1,2' or '0.5:3:0.5'")
    p.add_argument("--orders", help="moment orders, e.g. '1,2,3'")

    p = sub.add_parser("series", parents=[common], help="symmetric and independent mean intensity series")
    p.add_argument("--ells")
    p.add_argument("--t1-sq", dest="t1_sq", help="barrier intensity transmission |T1|^2")

    p = sub.add_parser("mc", parents=[common], help="Monte Carlo mean intensity against the series")
    p.add_argument("--ells")
    p.add_argument("--t1-sq", dest="t1_sq", help="comma-separated |T1|^2 values")
    p.add_argument("--sigma")
    p.add_argument("--corr-ratio", dest="corr_ratio", help="correlation length over section length")
    p.add_argument("--model", choices=["binary", "ou"])
    p.add_argument("--calibration", choices=["closed_form", "cos_weighted", "lyapunov"])

    p = sub.add_parser("figure", parents=[common], help="data behind the comparison figures")
    p.add_argument("--figure", choices=sorted(ex.FIGURE_TRANSMITTANCE))
    p.add_argument("--grid")

    p = sub.add_parser("waveguide", parents=[common], help="synthetic waveguide ensembles")
    p.add_argument("--q", help="comma-separated uniform barrier strengths")
    p.add_argument("--modes", dest="n_modes")
    p.add_argument("--eps")

    p = sub.add_parser("validate", parents=[common], help="run the acceptance checks")
    p.add_argument("--criteria", help="comma-separated subset, e.g. '1,2,9'")
    return parser


_PASSTHROUGH = ("ells", "orders", "t1_sq", "sigma", "corr_ratio", "model", "calibration", "figure", "grid", "q",
                "n_modes", "eps", "criteria")


def _config_from_args(args: argparse.Namespace) -> ex.ExperimentConfig:
    kind = _SUBCOMMAND_KIND[args.command]
    overrides: dict[str, object] = {k: getattr(args, k, None) for k in _PASSTHROUGH}
    overrides.update({"seed": args.seed, "tol": args.tol, "n_samples": args.samples})
    if args.config:
        config = ex.ExperimentConfig.from_file(args.config, overrides)
        if config.kind is not kind:
            raise ex.ConfigError(f"config kind {config.kind.value!r} does not match subcommand {args.command!r}")
        return config
    defaults = {
        ex.ExperimentKind.MOMENTS: {"ells": "0.5,1,2", "orders": "1,2,3"},
        ex.ExperimentKind.LAYERED_SERIES: {"ells": "0.5,1,2", "t1_sq": "0.4"},
        ex.ExperimentKind.LAYERED_MC: {"ells": "0.5,1,2", "t1_sq": "1,0.4,0.1"},
        ex.ExperimentKind.FIGURE: {"figure": "comp1"},
        ex.ExperimentKind.WAVEGUIDE_SUITE: {"q": "0.3,3"},
        ex.ExperimentKind.VALIDATION: {},
    }[kind]
    params = dict(defaults)
    params.update({k: str(v) for k, v in overrides.items() if v is not None})
    return ex.ExperimentConfig(kind, params)


def execute(config: ex.ExperimentConfig) -> ex.ResultTable:
    """Run the experiment described by ``config``."""
    kind = config.kind
    ctl = config.series_control()
    seed = config.get_int("seed", 0)
    if kind is ex.ExperimentKind.MOMENTS:
        orders = [int(x) for x in config.get_grid("orders", [1, 2, 3])]
        table = ex.run_moments(config.get_grid("ells"), orders)
    elif kind is ex.ExperimentKind.LAYERED_SERIES:
        table = ex.run_series(config.get_grid("ells"), config.get_float("t1_sq"), ctl)
    elif kind is ex.ExperimentKind.LAYERED_MC:
        try:
            setup = ex.LayeredMCSetup(
                sigma=config.get_float("sigma", 0.9),
                corr_ratio=config.get_float("corr_ratio", 1e-2),
                model=ex.medium.MediumModel(config.get("model", "binary")),
                calibration=ex.medium.Calibration(config.get("calibration", "lyapunov")),
            )
        except ValueError as exc:
            raise ex.ConfigError(str(exc)) from exc
        table = ex.run_mc(
            config.get_grid("ells"), config.get_grid("t1_sq"), config.get_int("n_samples", 10_000), seed, setup, ctl
        )
    elif kind is ex.ExperimentKind.FIGURE:
        table = ex.run_figure(config.get("figure"), ctl, config.get_grid("grid", ex.DEFAULT_GRID))
    elif kind is ex.ExperimentKind.WAVEGUIDE_SUITE:
        table = ex.run_waveguide(
            config.get_grid("q"),
            config.get_int("n_modes", 3),
            config.get_float("eps", 0.05),
            config.get_int("n_samples", 10_000),
            seed,
        )
    else:
        table = ex.run_validation(config)
    used_seed = seed if kind in (ex.ExperimentKind.LAYERED_MC, ex.ExperimentKind.WAVEGUIDE_SUITE) else None
    if kind is ex.ExperimentKind.VALIDATION:
        used_seed = config.get_int("seed", 7)
    return table.with_metadata(config, used_seed)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        config = _config_from_args(args)
        table = execute(config)
    except InvalidInputError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MirrorwaveError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    text = table.to_csv()
    if args.out:
        table.write(args.out)
    else:
        sys.stdout.write(text)
    print(f"{args.command}: {table.n_rows} rows in {time.perf_counter() - start:.2f} s", file=sys.stderr)
    if config.kind is ex.ExperimentKind.VALIDATION:
        for row in table.rows():
            verdict = "PASS" if row["passed"] else "FAIL"
            print(f"[{verdict}] criterion {row['criterion']}: {row['description']} = {row['measured']:.6g}", file=sys.stderr)
        if not all(table.columns["passed"]):
            return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
