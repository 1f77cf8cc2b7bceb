#!/usr/bin/python
import sys

from .. import common
from ..empirical import load_samples_file, summarize
from ..estimate import fit
from .fit import fit_result_to_dict, write_json


def _finite_or_none(value):
    return value if value != float("inf") else None


@common.cli_command
def main(argv=None):
    parser = common.CLIParser(prog="momfit fit-data", description="Estimate distribution parameters from the raw moments of a data sample.")
    parser.add_arguments(["dist", "orders", "input", "format", "column", "verbose"])
    parser.add_solver_arguments()
    args = parser.parse_args(argv)
    common.setup_logging(args.verbose)
    config = common.solver_config_from_args(args)
    n, m = args.orders
    data = load_samples_file(args.input, args.format, args.column)
    summary = summarize(data, [n, m])
    result = fit(args.dist, summary.moment_pair(n, m), config)
    record = fit_result_to_dict(result)
    record["count"] = summary.count
    record["sample_moments"] = [{"order": i, "value": _finite_or_none(value), "log_value": summary.log_moment(i)} for i, value in summary.moments]
    write_json(record)


if __name__ == "__main__":
    sys.exit(main())
