"""Command-line interface: ``feast-power solve|compare|sweep|filter-scan|oracle``."""

import argparse
import logging
import sys
from collections.abc import Sequence
from typing import Any

from dotenv import load_dotenv
from pydantic import ValidationError

from feast_power import __version__
from feast_power.config import Algorithm, build_run_config
from feast_power.errors import FeastPowerError
from feast_power.reports import report_to_json
from feast_power.runner import run

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2

SOLVE_ALGORITHMS = (Algorithm.F2P, Algorithm.FEAST, Algorithm.FEAST2, Algorithm.PSI)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", dest="config_file", help="key=value config file")
    parser.add_argument("--output", dest="output_path", help="JSON report path")
    parser.add_argument("--csv", dest="csv_path", help="CSV output path")
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level",
    )


def _add_matrix(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--matrix", dest="matrix_path", help="Matrix Market file")


def _add_interval(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--a", type=float, help="Interval left end")
    parser.add_argument("--b", type=float, help="Interval right end")
    parser.add_argument("--radius", "-r", type=float, help="Circle radius")
    parser.add_argument("--q", type=int, help="Quadrature points per circle")


def _add_solver(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--reference", dest="reference_path", help="Reference spectrum CSV"
    )
    parser.add_argument(
        "--preset", choices=["na5", "andrews"], help="Experiment preset"
    )
    parser.add_argument("--m", type=int, help="Block width")
    parser.add_argument("--num-cmp", type=int, help="Pairs tracked")
    parser.add_argument("--num-out", type=int, help="Pairs returned")
    parser.add_argument("--num-eigm", type=int, help="Shift-estimate window")
    parser.add_argument("--min-eig", type=float, help="Smallest-eigenvalue estimate")
    parser.add_argument("--max-it", type=int, help="Outer iterations")
    parser.add_argument("--sub-max-it", type=int, help="Inner power iterations")
    parser.add_argument("--sub-tol", type=float, help="Inner acceptance tolerance")
    parser.add_argument(
        "--tol", type=float, help="Stopping tolerance of feast, feast2 and psi"
    )
    parser.add_argument("--inner-tol", type=float, help="BiCG tolerance")
    parser.add_argument("--inner-max-iter", type=int, help="BiCG iteration cap")
    parser.add_argument(
        "--preconditioner", choices=["none", "jacobi"], help="BiCG preconditioner"
    )
    parser.add_argument(
        "--parallel-inner",
        action="store_true",
        default=None,
        help="Solve the shifted systems on threads",
    )
    parser.add_argument("--threads", type=int, help="Worker threads")
    parser.add_argument("--seed", type=int, help="Starting block seed")
    parser.add_argument("--scale-seed", type=int, help="Scale-factor test vector seed")


def build_parser() -> argparse.ArgumentParser:
    """Argument parser with one subcommand per run kind."""
    parser = argparse.ArgumentParser(
        prog="feast-power",
        description="Contour-integral and power subspace eigensolvers.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve = commands.add_parser("solve", help="Eigenpairs in (a, b) with one driver")
    solve.add_argument(
        "--algorithm",
        choices=[a.value for a in SOLVE_ALGORITHMS],
        default=None,
        help="Driver, f2p by default",
    )
    for add in (_add_common, _add_matrix, _add_interval, _add_solver):
        add(solve)

    compare = commands.add_parser(
        "compare", help="FEAST, FEAST2 and f2p residual histories"
    )
    for add in (_add_common, _add_matrix, _add_interval, _add_solver):
        add(compare)

    sweep = commands.add_parser(
        "sweep", help="All eigenvalues in (a, b) by sliding windows"
    )
    for add in (_add_common, _add_matrix, _add_interval, _add_solver):
        add(sweep)

    scan = commands.add_parser(
        "filter-scan", help="Sample the rational filter response"
    )
    _add_common(scan)
    _add_interval(scan)
    scan.add_argument("--center", "-c", type=float, help="Single circle center")
    scan.add_argument("--scan-min", type=float, help="Grid start")
    scan.add_argument("--scan-max", type=float, help="Grid end")
    scan.add_argument("--scan-points", type=int, help="Grid size")

    oracle = commands.add_parser(
        "oracle", help="Dense reference spectrum of a small matrix"
    )
    _add_common(oracle)
    _add_matrix(oracle)
    oracle.add_argument("--a", type=float, help="Keep eigenvalues above a")
    oracle.add_argument("--b", type=float, help="Keep eigenvalues below b")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, Any]:
    values = {
        key: value
        for key, value in vars(args).items()
        if key not in {"command", "config_file"} and value is not None
    }
    if args.command == "solve":
        values["algorithm"] = values.pop("algorithm", None) or Algorithm.F2P.value
    else:
        values["algorithm"] = args.command
    return values


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, run, and map failures to exit codes.

    Returns:
        0 on success (empty results included), 1 on output errors, 2 on
        configuration errors, 3 on input parse errors, 4 on numerical failures.
    """
    load_dotenv()
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level or logging.INFO, format=LOG_FORMAT)

    try:
        config = build_run_config(_overrides(args), args.config_file)
        logging.getLogger().setLevel(config.log_level)
        report = run(config)
    except ValidationError as exc:
        logger.error("Invalid parameters: %s", exc)
        return EXIT_CONFIG
    except FeastPowerError as exc:
        logger.error("%s: %s", type(exc).__name__, exc)
        return exc.exit_code
    except OSError as exc:
        logger.error("%s", exc)
        return EXIT_IO

    if config.output_path is None:
        sys.stdout.write(report_to_json(report))
    return EXIT_OK


__all__ = ["build_parser", "main"]
