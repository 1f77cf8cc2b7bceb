#!/usr/bin/python
import sys

from .. import common
from ..dist import make_params, theoretical_moment
from .fit import write_json


@common.cli_command
def main(argv=None):
    parser = common.CLIParser(prog="momfit moments", description="Evaluate theoretical raw moments E(X^I) of a distribution.")
    parser.add_arguments(["dist", "params", "verbose"])
    parser.add_argument("-o", "--orders", type=common.parse_floats, required=True, metavar="I1,I2,...", help="Positive moment orders, decimals allowed.")
    args = parser.parse_args(argv)
    common.setup_logging(args.verbose)
    params = make_params(args.dist, args.params)
    write_json([{"order": i, "value": theoretical_moment(params, i)} for i in args.orders])


if __name__ == "__main__":
    sys.exit(main())
