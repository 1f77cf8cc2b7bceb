#!/usr/bin/python
import csv
import sys

from .. import common
from ..dist import make_params, pdf_grid


@common.cli_command
def main(argv=None):
    parser = common.CLIParser(prog="momfit pdf", description="Tabulate the probability density on an evenly spaced grid as CSV with columns x,pdf.")
    parser.add_arguments(["dist", "params", "from", "to", "points", "verbose"])
    args = parser.parse_args(argv)
    common.setup_logging(args.verbose)
    params = make_params(args.dist, args.params)
    xs, densities = pdf_grid(params, args.x_from, args.x_to, args.points)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["x", "pdf"])
    writer.writerows((repr(float(x)), repr(float(y))) for x, y in zip(xs, densities))


if __name__ == "__main__":
    sys.exit(main())
