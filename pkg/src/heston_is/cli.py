"""Command-line front end.

Exit codes: 0 success, 2 configuration error, 3 parameter or regime error,
4 runtime error (numerical failure or I/O).
"""

from __future__ import annotations

import argparse
import sys

from . import config as cfgmod
from .errors import DomainError, HestonISError, ParameterError
from .experiments import run
from .report import to_csv, write_outputs

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PARAMETER = 3
EXIT_RUNTIME = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="sectioned key-value configuration file")
    common.add_argument("--paths", type=int, metavar="M", help="Monte Carlo paths per estimator")
    common.add_argument("--steps", type=int, metavar="N", help="time steps (default 256 up to one month, else 512)")
    common.add_argument("--seed", type=int, metavar="U64", help="master seed")
    common.add_argument("--scheme", choices=("euler", "milstein"), help="variance discretisation")
    common.add_argument("--regime", choices=cfgmod.REGIMES, help="tilt rule / SCGF family")
    common.add_argument("--out", metavar="PATH", help="CSV output path; figures are written beside it")
    common.add_argument("--workers", type=int, metavar="N", help="worker threads (results do not depend on it)")
    common.add_argument("--chunk-size", type=int, metavar="N", help="paths per random stream chunk")
    common.add_argument("--strike", type=float, metavar="K")
    common.add_argument("--maturity", type=float, metavar="T")
    common.add_argument("--no-figure", action="store_true", help="write the gnuplot script but skip the PNG")

    parser = _Parser(prog="heston-is", description="Importance-sampling Monte Carlo for Heston calls.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    helps = {
        "table1": "BMC against IS at one day and one month",
        "vrr-sweep": "variance reduction ratio over a moneyness grid",
        "scgf-check": "closed-form SCGFs against the Riccati oracle",
        "optimality-report": "minimise G(q) and compare with -2 Lambda_1",
        "price": "all three pricers at a single strike and maturity",
    }
    for name in cfgmod.KINDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def resolve_config(args) -> cfgmod.ExperimentConfig:
    overrides = dict(
        kind=args.command,
        paths=args.paths,
        steps=args.steps,
        seed=args.seed,
        scheme=args.scheme,
        regime=args.regime,
        output=args.out,
        workers=args.workers,
        chunk_size=args.chunk_size,
        strike=args.strike,
        maturity=args.maturity,
    )
    if args.config:
        return cfgmod.load(args.config, **overrides)
    return cfgmod.with_overrides(cfgmod.ExperimentConfig(), **overrides)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
    except (cfgmod.ConfigError, ParameterError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        table = run(cfg)
    except (ParameterError, DomainError) as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return EXIT_PARAMETER
    except (HestonISError, ArithmeticError, RuntimeError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    try:
        if cfg.output:
            for path in write_outputs(table, cfg.output, render=not args.no_figure):
                print(f"wrote {path}", file=sys.stderr)
        else:
            sys.stdout.write(to_csv(table))
    except OSError as exc:
        print(f"runtime error: cannot write {exc.filename!r}: {exc.strerror}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
