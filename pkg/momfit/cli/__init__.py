#!/usr/bin/python
"""
The ``momfit`` command: ``momfit <subcommand> [options]``. Every subcommand is also installed as ``momfit-<subcommand>``.
"""

import sys

from .. import common
from ..errors import ParseError
from ..version import __version__
from . import fit, fit_data, moments, pdf, sample

COMMANDS = {
    "fit": fit,
    "fit-data": fit_data,
    "moments": moments,
    "pdf": pdf,
    "sample": sample,
}

USAGE = f"""usage: momfit {{{','.join(COMMANDS)}}} [options]

Estimate Weibull, Gamma and Log-normal parameters from pairs of raw moments.
Run `momfit <subcommand> --help` for the options of a subcommand.
"""


def run(argv=None):
    """
    Run a momfit subcommand in-process.

    Arguments:
        argv: list of str. Command line without the program name; ``sys.argv[1:]`` if None.

    Returns:
        int. Exit code: 0 on success, 1 for input errors, 2 for numerical failures.
    """
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] in ("-h", "--help"):
        sys.stdout.write(USAGE)
        return 0
    if argv and argv[0] == "--version":
        sys.stdout.write(f"momfit {__version__}\n")
        return 0
    if not argv or argv[0] not in COMMANDS:
        given = f"`{argv[0]}`" if argv else "none"
        common.report_error(ParseError(f"expected a subcommand from {list(COMMANDS)}, got {given}"))
        return ParseError.exit_code
    try:
        return COMMANDS[argv[0]].main(argv[1:])
    except SystemExit as exc:
        # argparse --help
        return exc.code if isinstance(exc.code, int) else 0


def main():
    sys.exit(run())
