"""CLI for the `report` subcommand (the full assessment of one channel)."""

import argparse
import sys
from pathlib import Path
from typing import Callable, Optional

from ._parallel import THREADS_ENV, resolve_workers
from .assessor import CapacityAssessor, RunConfig
from .bound_engine import DEFAULT_CAP, DEFAULT_DELTA, DEFAULT_GRID_OUTER_DELTA, DEFAULT_REFINE_TOL
from .errors import EvaluationCapError
from .symmetry_checks import DEFAULT_SYM_TOL

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_CAP = 2
EXIT_IO = 3


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    """Options shared by `report` and `sweep`."""
    parser.add_argument("--channel", "-c", required=True, help="Path to the channel JSON file")
    parser.add_argument(
        "--delta",
        "-d",
        type=float,
        default=DEFAULT_DELTA,
        help=f"Simplex grid step; 1/delta must be an integer (default: {DEFAULT_DELTA})",
    )
    parser.add_argument(
        "--refine-tol",
        type=float,
        default=DEFAULT_REFINE_TOL,
        help=f"Smallest local refinement step for alpha*/beta* (default: {DEFAULT_REFINE_TOL:g})",
    )
    parser.add_argument(
        "--sym-tol",
        type=float,
        default=DEFAULT_SYM_TOL,
        help=f"Gap below which a symmetry condition counts as holding (default: {DEFAULT_SYM_TOL:g})",
    )
    parser.add_argument(
        "--grid-outer",
        action="store_true",
        help="Also compute the Shannon outer bound over joint inputs (slow for large alphabets)",
    )
    parser.add_argument(
        "--grid-outer-delta",
        type=float,
        default=DEFAULT_GRID_OUTER_DELTA,
        help=(
            "Grid step of the joint-input simplex, used by --grid-outer and the (b2) search "
            f"(default: {DEFAULT_GRID_OUTER_DELTA})"
        ),
    )
    parser.add_argument(
        "--out-dir", "-o", default=".", help="Directory for the output files (default: .)"
    )
    parser.add_argument(
        "--threads",
        "-j",
        type=int,
        help=f"Worker threads, 0 = one per CPU (default: ${THREADS_ENV}, else 0)",
    )
    parser.add_argument(
        "--cap",
        type=int,
        default=DEFAULT_CAP,
        help=f"Maximum rate-pair evaluations per grid sweep (default: {DEFAULT_CAP:.0e})",
    )
    parser.add_argument("--verbose", "-v", action="store_true", help="Enable verbose output")


def build_config(args: argparse.Namespace, gamma: Optional[float] = None) -> RunConfig:
    # --threads wins over TWC_THREADS when both are set
    workers = resolve_workers(args.threads)
    config = RunConfig(
        channel_path=Path(args.channel),
        out_dir=Path(args.out_dir),
        delta=args.delta,
        refine_tol=args.refine_tol,
        sym_tol=args.sym_tol,
        with_grid_outer=args.grid_outer,
        grid_outer_delta=args.grid_outer_delta,
        gamma=gamma,
        cap=args.cap,
        workers=workers,
        verbose=args.verbose,
    )
    config.validate()
    return config


def guarded(action: Callable[[], None]) -> int:
    """Run `action`, turning library errors into a diagnostic and an exit code."""
    try:
        action()
    except EvaluationCapError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CAP
    except FileNotFoundError as e:
        print(f"Error: file not found: {e.filename}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def build_parser(prog: Optional[str] = None) -> argparse.ArgumentParser:
    """Build the argparse parser for the report subcommand."""
    parser = argparse.ArgumentParser(
        prog=prog,
        description=(
            "Screen a two-way channel for the symmetry conditions under which independent "
            "inputs are optimal, then compute the Shannon inner bound and the outer bounds "
            "around it."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Full report with the default grid step (0.025)
  %(prog)s --channel fixtures/table1.json --out-dir out/table1

  # Parameterised channel file
  %(prog)s --channel fixtures/table2.json --gamma 0.25 --out-dir out/g025

  # Add the joint-input outer bound and use 8 threads
  %(prog)s --channel fixtures/bsc.json --grid-outer --threads 8

Writes report.json, inner.csv, outer_simple.csv, outer_trivial.csv,
eps_region.csv (outer_grid.csv with --grid-outer) and regions.svg.
Exit codes: 1 invalid input, 2 evaluation cap exceeded, 3 I/O error.
        """,
    )
    add_common_arguments(parser)
    parser.add_argument(
        "--gamma", "-g", type=float, help="Value of the gamma parameter of the channel file"
    )
    return parser


def run(args: argparse.Namespace) -> int:
    """Execute the report command from already-parsed args; returns the exit code."""

    def action() -> None:
        config = build_config(args, gamma=args.gamma)
        if not config.channel_path.is_file():
            raise FileNotFoundError(2, "No such file", str(config.channel_path))
        CapacityAssessor(config).run_report()

    return guarded(action)


def main() -> None:
    """Entry point for `twc-bounds report ...`."""
    parser = build_parser()
    args = parser.parse_args()
    code = run(args)
    if code:
        sys.exit(code)
