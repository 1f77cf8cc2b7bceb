#!/usr/bin/python
import sys

from .. import common
from ..dist import make_params
from ..synth import SeededGenerator, sample


@common.cli_command
def main(argv=None):
    parser = common.CLIParser(prog="momfit sample", description="Draw reproducible random values of a distribution, one per line.")
    parser.add_arguments(["dist", "params", "count", "seed", "stream", "verbose"])
    args = parser.parse_args(argv)
    common.setup_logging(args.verbose)
    params = make_params(args.dist, args.params)
    values = sample(params, args.count, SeededGenerator(args.seed, args.stream))
    sys.stdout.write("".join(f"{float(x)!r}\n" for x in values))


if __name__ == "__main__":
    sys.exit(main())
