"""`twc-bounds` entry point.

    twc-bounds report --channel FILE ...   # one channel: screens, inner and outer bounds
    twc-bounds sweep --channel FILE ...    # alpha*, beta*, eps over a list of gamma values

The subcommand name is consumed here; everything after it is parsed by the
subcommand module's own `build_parser()`, so `twc-bounds report --help` shows
that module's options and examples.
"""

import argparse
import sys
from typing import List, Optional

from . import __version__, _cli_report, _cli_sweep
from ._parallel import THREADS_ENV

SUBCOMMANDS = {
    "report": (
        "Screen one channel for the symmetry conditions, then bound its capacity region.",
        _cli_report.main,
    ),
    "sweep": (
        "Tabulate I*_1, I*_2, alpha*, beta* and epsilon of a gamma-parameterised channel.",
        _cli_sweep.main,
    ),
}

EPILOG = f"""
Channel files are JSON: "forward" is P(y2|x1,x2) indexed [x1][x2][y2] and
"backward" is P(y1|x1,x2) indexed [x1][x2][y1]. See USAGE.md for the format.

Environment:
  {THREADS_ENV}   worker threads when --threads is not given (0 = one per CPU)

Exit codes: 0 ok, 1 invalid input, 2 evaluation cap exceeded, 3 output I/O error.
Run `twc-bounds <subcommand> --help` for the options of each subcommand.
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twc-bounds",
        description=(
            "Inner and outer bounds on the capacity region of a discrete memoryless "
            "two-way channel, and screens for when independent inputs are optimal."
        ),
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="subcommand", metavar="<subcommand>")
    sub.required = True
    for name, (help_text, _) in SUBCOMMANDS.items():
        # add_help=False: the subcommand's own parser answers --help
        sub.add_parser(name, help=help_text, add_help=False)
    return parser


def main(argv: Optional[List[str]] = None) -> None:
    """Dispatch `twc-bounds <subcommand> ...` to the subcommand's `main()`."""
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()

    if not argv or argv[0] in ("-h", "--help"):
        parser.print_help()
        return
    if argv[0] == "--version":
        parser.parse_args(argv)  # prints the version and exits 0
        return

    name, rest = argv[0], argv[1:]
    if name not in SUBCOMMANDS:
        parser.error(f"unknown subcommand {name!r}; expected one of: {', '.join(SUBCOMMANDS)}")

    # Subcommand mains read sys.argv; restore it even if they exit.
    saved = sys.argv
    sys.argv = [f"twc-bounds {name}", *rest]
    try:
        SUBCOMMANDS[name][1]()
    finally:
        sys.argv = saved
