import io
import pathlib

import numpy as np
import pydantic
import pytest

from momfit import common, errors

THIS_FILE_PATH = pathlib.Path(__file__).parent


def test_solver_config(tmp_path):
    # First, testing the default values
    c_default = common.SolverConfig()
    assert np.isclose(c_default.delta, 1e-10)
    assert c_default.max_iterations == 200
    assert np.isclose(c_default.bracket_lo, 1e-2)
    assert np.isclose(c_default.bracket_hi, 1e3)
    assert c_default.max_expansions == 60

    # Load the settings from a file
    c_ini = common.SolverConfig.from_file(THIS_FILE_PATH / "data/test_solver.ini")
    assert np.isclose(c_ini.delta, 1e-12)
    assert c_ini.max_iterations == 300
    assert np.isclose(c_ini.bracket_lo, 0.05)
    assert np.isclose(c_ini.bracket_hi, 50.0)
    assert c_ini.max_expansions == 10

    # Dump the settings to a toml file
    c_ini.to_file(tmp_path / "test_solver.toml")

    # Load the settings from the toml file and compare to the original
    c_toml = common.SolverConfig.from_file(tmp_path / "test_solver.toml")
    assert c_ini == c_toml


def test_solver_config_invalid(tmp_path):
    with pytest.raises(pydantic.ValidationError):
        common.SolverConfig(delta=0.0)
    with pytest.raises(pydantic.ValidationError):
        common.SolverConfig(bracket_lo=10.0, bracket_hi=1.0)
    with pytest.raises(pydantic.ValidationError):
        common.SolverConfig(max_iterations=0)

    with pytest.raises(ValueError, match="not found"):
        common.SolverConfig.from_file(tmp_path / "missing.toml")

    yaml_file = tmp_path / "solver.yaml"
    yaml_file.write_text("delta: 1e-3\n")
    with pytest.raises(ValueError, match="Unsupported"):
        common.SolverConfig.from_file(yaml_file)

    toml_file = tmp_path / "solver.toml"
    toml_file.write_text("tolerance = 1e-3\n")
    with pytest.raises(ValueError, match="not known"):
        common.SolverConfig.from_file(toml_file)


def test_apply_options():
    config = common.SolverConfig()
    config.apply_options({"delta": 1e-6, "max_iterations": None, "input": "data.txt"})
    assert config.delta == 1e-6
    assert config.max_iterations == 200

    # Both ends of the bracket are validated together
    config.apply_options({"bracket_lo": 2000.0, "bracket_hi": 4000.0})
    assert (config.bracket_lo, config.bracket_hi) == (2000.0, 4000.0)
    with pytest.raises(pydantic.ValidationError):
        config.apply_options({"bracket_hi": 1.0})
    assert config.bracket_hi == 4000.0


def test_parsers():
    assert common.parse_floats("2.5,1") == [2.5, 1.0]
    assert common.parse_pair("3,1") == [3.0, 1.0]
    assert common.parse_assignments("k=2, lambda=3") == {"k": 2.0, "lambda": 3.0}
    with pytest.raises(common.argparse.ArgumentTypeError):
        common.parse_pair("1,2,3")
    with pytest.raises(common.argparse.ArgumentTypeError):
        common.parse_floats("1,x")
    with pytest.raises(common.argparse.ArgumentTypeError):
        common.parse_assignments("k2")
    assert common.parse_floats(" -1.5e-3, .5") == [-1.5e-3, 0.5]


@pytest.mark.parametrize("text", ["inf,1", "2,nan", "1_000,1", "2,1e", "0x10,1", "2,", "2,1,"])
def test_parse_floats_rejects_non_decimals(text):
    with pytest.raises(common.argparse.ArgumentTypeError):
        common.parse_floats(text)


@pytest.mark.parametrize("value", ["inf", "-inf", "nan", "1_000", "0x10", ""])
def test_parse_assignments_rejects_non_decimals(value):
    with pytest.raises(common.argparse.ArgumentTypeError):
        common.parse_assignments(f"k={value},lambda=1")


def test_cli_parser():
    parser = common.CLIParser(prog="test")
    parser.add_arguments(["dist", "orders", "moments"])
    parser.add_solver_arguments()
    args = parser.parse_args(["-d", "gamma", "--orders", "2,1", "--moments", "6,2", "--tol", "1e-6", "--bracket", "0.5,20"])
    assert args.dist == "gamma"
    assert args.orders == [2.0, 1.0]
    assert args.moments == [6.0, 2.0]

    config = common.solver_config_from_args(args)
    assert config.delta == 1e-6
    assert (config.bracket_lo, config.bracket_hi) == (0.5, 20.0)
    assert config.max_iterations == 200

    with pytest.raises(errors.ParseError):
        parser.parse_args(["-d", "cauchy", "--orders", "2,1", "--moments", "6,2"])
    with pytest.raises(errors.ParseError):
        parser.parse_args(["-d", "gamma", "--orders", "2", "--moments", "6,2"])
    with pytest.raises(ValueError, match="Invalid argument name"):
        parser.add_arguments(["not-an-argument"])


def test_config_file_overridden_by_flags():
    parser = common.CLIParser(prog="test")
    parser.add_solver_arguments()
    args = parser.parse_args(["--config", str(THIS_FILE_PATH / "data/test_solver.ini"), "--max-iterations", "50"])
    config = common.solver_config_from_args(args)
    assert config.delta == 1e-12
    assert config.max_iterations == 50


def test_report_error():
    stream = io.StringIO()
    common.report_error(errors.InfeasibleRatioError(-0.5), stream)
    assert stream.getvalue() == "momfit: error [INFEASIBLE_RATIO]: Moment pair is infeasible: log moment ratio -0.5 must be > 0\n"

    stream = io.StringIO()
    try:
        common.SolverConfig(delta=-1.0)
    except pydantic.ValidationError as exc:
        common.report_error(exc, stream)
    line = stream.getvalue()
    assert line.startswith("momfit: error [DOMAIN_ERROR]: ")
    assert line.count("\n") == 1

    assert common.exit_code_of(errors.BracketExhaustedError("x")) == 2
    assert common.exit_code_of(errors.ParseError("x")) == 1
    assert common.exit_code_of(ValueError("x")) == 1


def test_cli_command(capsys):
    @common.cli_command
    def failing(argv=None):
        raise errors.IterationLimitError("out of steps")

    @common.cli_command
    def passing(argv=None):
        print("ok")

    assert failing([]) == 2
    assert capsys.readouterr().err == "momfit: error [ITERATION_LIMIT]: out of steps\n"
    assert passing([]) == 0
    assert capsys.readouterr().out == "ok\n"
