#!/usr/bin/python
import json
import sys

from .. import common
from ..dist import params_to_dict
from ..estimate import MomentPair, fit


def fit_result_to_dict(result):
    """JSON-ready record of a :class:`.FitResult`."""
    return {
        "dist": result.dist,
        "params": params_to_dict(result.params),
        "orders": list(result.orders),
        "iterations": result.iterations,
        "expansions": result.expansions,
        "final_bracket_width": result.final_bracket_width,
        "log_ratio_residual": result.log_ratio_residual,
        "tol": result.delta,
        "max_iterations": result.max_iterations,
    }


def write_json(obj, stream=None):
    stream = sys.stdout if stream is None else stream
    stream.write(json.dumps(obj, allow_nan=False) + "\n")


@common.cli_command
def main(argv=None):
    parser = common.CLIParser(prog="momfit fit", description="Estimate distribution parameters from a pair of raw moments E(X^N), E(X^M), N > M > 0.")
    parser.add_arguments(["dist", "orders", "moments", "verbose"])
    parser.add_solver_arguments()
    args = parser.parse_args(argv)
    common.setup_logging(args.verbose)
    config = common.solver_config_from_args(args)
    (n, m), (moment_n, moment_m) = args.orders, args.moments
    result = fit(args.dist, MomentPair(n=n, m=m, moment_n=moment_n, moment_m=moment_m), config)
    write_json(fit_result_to_dict(result))


if __name__ == "__main__":
    sys.exit(main())
