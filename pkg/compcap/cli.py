"""
Command line entry point.

  compcap weights <spec> <n_max>
  compcap beta <symbol> --weights <spec> --N <n>
  compcap capacity <set> --method <m>
  compcap verify <config-file>

Every subcommand takes ``--out <dir>`` and ``--format json|csv|text``.
Exit codes: 0 pass, 1 numerical failure, 2 configuration error.
"""

import csv
import io
import json
import logging
import sys
from argparse import ArgumentParser, Namespace
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from compcap.capacity import METHODS, CapacityError, CompactSet, parse_compact_set
from compcap.config import Config, ConfigError
from compcap.harness import ExperimentConfig, capacity_methods, run_suite
from compcap.operator import DEFAULT_ORDER, OperatorError, compute_beta
from compcap.report import FORMATS, make_run_dir, summary_csv, write_new
from compcap.symbols import Symbol, SymbolError
from compcap.weights import WeightError, WeightSpec, coef_weights

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="compcap", description=__doc__.splitlines()[1])
    parser.add_argument("--verbose", "-v", default=False, action="store_true")
    parser.add_argument("--spectrum-csv", default=False, action="store_true", help="write spectra as CSV")
    parser.add_argument("--grid-csv", default=False, action="store_true", help="write grid solutions as CSV")
    subparsers = parser.add_subparsers(dest="command", required=True)

    weights = subparsers.add_parser("weights", help="coefficient weights w_0..w_n_max")
    weights.add_argument("spec")
    weights.add_argument("n_max", type=int)

    beta = subparsers.add_parser("beta", help="decay rate of the approximation numbers")
    beta.add_argument("symbol")
    beta.add_argument("--weights", default="hardy")
    beta.add_argument("--N", type=int, default=DEFAULT_ORDER)
    beta.add_argument("--fixed-N", default=False, action="store_true", help="do not grow N")

    capacity = subparsers.add_parser("capacity", help="Green capacity of a compact set")
    capacity.add_argument("set", help="disk(b,a), phdisk(w,r) or segment(p,q)")
    capacity.add_argument("--method", choices=METHODS, default="closed_form")
    capacity.add_argument("--M", type=int, default=512)
    capacity.add_argument("--h", default="1/256")

    verify = subparsers.add_parser("verify", help="run a suite of experiments")
    verify.add_argument("config_file")

    for subparser in (weights, beta, capacity, verify):
        subparser.add_argument("--out", default=None)
        subparser.add_argument("--format", choices=FORMATS, default="text")
    return parser


def _emit(args: Namespace, name: str, data: bytes) -> None:
    if args.out:
        run_dir = make_run_dir(Path(args.out))
        write_new(run_dir / f"{name}.{args.format}", data)
        logger.info("Wrote %s", run_dir / f"{name}.{args.format}")
    else:
        sys.stdout.write(data.decode())


def _weights(args: Namespace) -> int:
    weights = coef_weights(WeightSpec.parse(args.spec), args.n_max)
    if args.format == "csv":
        data = weights.to_csv()
    elif args.format == "json":
        data = json.dumps({"spec": str(weights.spec), "w": [float(w) for w in weights.values]}, indent=2) + "\n"
    else:
        data = "".join(f"w_{n} = {w!r}\n" for n, w in enumerate(weights.values.tolist()))
    _emit(args, "weights", data.encode())
    return EXIT_PASS


def _beta(args: Namespace) -> int:
    phi = Symbol.parse(args.symbol)
    weights = coef_weights(WeightSpec.parse(args.weights), args.N)
    estimate, spectrum = compute_beta(phi, weights, args.N, auto_grow=not args.fixed_N)
    if args.format == "csv":
        data = spectrum.to_csv()
    elif args.format == "json":
        data = json.dumps({"symbol": str(phi), "weights": args.weights, **estimate.to_dict()}, indent=2) + "\n"
    else:
        data = f"beta = {estimate.beta!r} (N={estimate.order}, window {estimate.window}, R^2={estimate.fit_r2:.8f})\n"
    _emit(args, "beta", data.encode())
    return EXIT_PASS


def _capacity(args: Namespace) -> int:
    try:
        compact_set: CompactSet = parse_compact_set(args.set)
        cfg = ExperimentConfig(symbol=args.set, M=args.M, h=float(Fraction(args.h)))
    except (CapacityError, ValueError, ZeroDivisionError) as err:
        raise ConfigError(f"Invalid capacity arguments: {err}") from err
    estimate = capacity_methods[args.method](compact_set, cfg)
    if args.format == "csv":
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(["set", "cap_method", "cap", "m_value", "error_indicator"])
        writer.writerow([args.set, estimate.method, estimate.value, estimate.m_value, estimate.error_indicator])
        data = buffer.getvalue()
    elif args.format == "json":
        data = json.dumps({"set": args.set, **estimate.to_dict()}, indent=2) + "\n"
    else:
        data = f"cap = {estimate.value!r}, exp(-1/cap) = {estimate.m_value!r} ({estimate.method})\n"
    _emit(args, "capacity", data.encode())
    return EXIT_PASS


def _verify(args: Namespace) -> int:
    reports = run_suite(args.config_file, out_dir=args.out, fmt=args.format)
    if not args.out:
        sys.stdout.write(summary_csv(reports).decode())
    return EXIT_PASS if all(report.passed for report in reports) else EXIT_FAILURE


COMMANDS = {"weights": _weights, "beta": _beta, "capacity": _capacity, "verify": _verify}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    Config.set_values({"artifacts": {"spectrum": args.spectrum_csv, "grid": args.grid_csv}})
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, WeightError, SymbolError) as err:
        logger.error("Configuration error: %s", err)
        return EXIT_CONFIG
    except (OperatorError, CapacityError) as err:
        logger.error("Numerical failure: %s", err)
        return EXIT_FAILURE


if __name__ == "__main__":  # pragma no cover
    sys.exit(main())
