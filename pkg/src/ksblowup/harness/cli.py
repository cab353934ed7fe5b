"""Command-line entry point: ``ksblowup <command> --config FILE``."""

from __future__ import annotations

import argparse
import logging
import sys

from ..errors import ConfigError, InadmissibleConfigError, KSError
from . import experiments
from .config import load_config

COMMANDS = ("validate", "bound", "simulate", "verify", "sweep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ksblowup",
        description="Blow-up time lower bounds and simulations for a chemotaxis system "
                    "with nonlinear diffusion.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="experiment config file")
    parser.add_argument("--out", help="output directory (overrides outputs.dir)")
    parser.add_argument("--tol", type=float, help="verify tolerance (overrides verify.tol)")
    parser.add_argument("--frozen-constants", action="store_true",
                        help="sweep: keep A, B, C, D fixed and vary only f(eta, r(m1))")
    parser.add_argument("--m1", help="sweep: comma-separated m1 values (overrides sweep.m1)")
    parser.add_argument("--no-plots", action="store_true", help="skip SVG output")
    parser.add_argument("-v", "--verbose", action="store_true")
    return parser


def run(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    overrides = {}
    if args.out:
        overrides["outputs.dir"] = args.out
    try:
        if args.tol is not None and not args.tol > 0:
            raise ConfigError(f"--tol must be > 0, got {args.tol}")
        if args.m1:
            try:
                overrides["sweep.m1"] = tuple(float(x) for x in args.m1.split(","))
            except ValueError:
                raise ConfigError(f"--m1: cannot parse {args.m1!r}") from None
        cfg = load_config(args.config, overrides)
        plots = not args.no_plots
        if args.command == "validate":
            outcome = experiments.run_validate(cfg)
        elif args.command == "bound":
            outcome = experiments.run_bound(cfg)
        elif args.command == "simulate":
            outcome = experiments.run_simulate(cfg, plots)
        elif args.command == "verify":
            outcome = experiments.run_verify(cfg, args.tol, plots)
        else:
            outcome = experiments.run_sweep(cfg, frozen=args.frozen_constants, plots=plots)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return experiments.CONFIG_ERROR
    except InadmissibleConfigError as exc:
        print(f"inadmissible: {exc}", file=sys.stderr)
        return experiments.FAILED
    except (KSError, OSError, ArithmeticError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return experiments.RUNTIME_ERROR
    print(outcome.summary)
    if outcome.files:
        print(f"wrote {outcome.files[0]}")
    return outcome.code


def main() -> None:
    sys.exit(run())
