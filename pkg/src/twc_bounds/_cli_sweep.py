"""CLI for the `sweep` subcommand (bounds of a parameterised channel across gamma)."""

import argparse
import sys
from typing import List, Optional

from ._cli_report import add_common_arguments, build_config, guarded
from .assessor import CapacityAssessor

DEFAULT_GAMMAS = "0.1,0.15,0.2,0.25,0.3,0.35,0.375,0.4"


def parse_gammas(text: str) -> List[float]:
    """Comma-separated gamma values; blanks are skipped, anything else must be a number."""
    values = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            values.append(float(item))
        except ValueError:
            raise ValueError(f"not a number in --gammas: {item!r}") from None
    return values


def build_parser(prog: Optional[str] = None) -> argparse.ArgumentParser:
    """Build the argparse parser for the sweep subcommand."""
    parser = argparse.ArgumentParser(
        prog=prog,
        description=(
            "Compute I*_1, I*_2, alpha*, beta* and epsilon of a channel file with a gamma "
            "parameter for a list of gamma values."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=f"""
Examples:
  # Default gamma list ({DEFAULT_GAMMAS})
  %(prog)s --channel fixtures/table2.json --out-dir out/sweep

  # A few values, also as an Excel sheet
  %(prog)s --channel fixtures/table2.json --gammas 0.1,0.4 --xlsx

Writes sweep.csv (gamma, alpha_star, beta_star, epsilon, i1_star, i2_star),
sweep.svg and, with --xlsx, sweep.xlsx.
        """,
    )
    add_common_arguments(parser)
    parser.add_argument(
        "--gammas",
        default=DEFAULT_GAMMAS,
        help=f"Comma-separated gamma values (default: {DEFAULT_GAMMAS})",
    )
    parser.add_argument(
        "--xlsx", action="store_true", help="Also write the sweep table as sweep.xlsx"
    )
    return parser


def run(args: argparse.Namespace) -> int:
    """Execute the sweep command from already-parsed args; returns the exit code."""

    def action() -> None:
        gammas = parse_gammas(args.gammas)
        if not gammas:
            raise ValueError("--gammas must list at least one value")
        config = build_config(args)
        if not config.channel_path.is_file():
            raise FileNotFoundError(2, "No such file", str(config.channel_path))
        CapacityAssessor(config).run_sweep(gammas, xlsx=args.xlsx)

    return guarded(action)


def main() -> None:
    """Entry point for `twc-bounds sweep ...`."""
    parser = build_parser()
    args = parser.parse_args()
    code = run(args)
    if code:
        sys.exit(code)
