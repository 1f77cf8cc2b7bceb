#!/usr/bin/python

import argparse
import copy
import functools
import logging
import re
import sys
import typing
from pathlib import Path

import pydantic
import toml

from . import errors

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

# Plain decimal numbers independent of the locale: no digit separators, inf or nan.
DECIMAL_NUMBER = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def parse_decimal(word):
    word = word.strip()
    if not DECIMAL_NUMBER.match(word):
        raise ValueError(f"not a decimal number: `{word}`")
    return float(word)


def parse_floats(text, count=None):
    """Parse comma separated decimal numbers such as ``'2.5,1'``."""
    try:
        values = [parse_decimal(word) for word in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated decimal numbers, got `{text}`") from None
    if count is not None and len(values) != count:
        raise argparse.ArgumentTypeError(f"expected {count} comma separated numbers, got `{text}`")
    return values


def parse_pair(text):
    return parse_floats(text, count=2)


def parse_assignments(text):
    """Parse ``'k=2,lambda=3'`` into ``{'k': 2.0, 'lambda': 3.0}``."""
    values = {}
    for item in text.split(","):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise argparse.ArgumentTypeError(f"expected NAME=VALUE, got `{item}`")
        try:
            values[key.strip()] = parse_decimal(value)
        except ValueError:
            raise argparse.ArgumentTypeError(f"parameter `{key.strip()}` is not a number: `{value}`") from None
    return values


class SolverConfig(pydantic.BaseModel):
    """Settings of the bisection solvers.

    ``delta`` is the absolute width of the final parameter interval, ``bracket_lo``/``bracket_hi`` the initial search
    interval of the shape parameter, which is widened geometrically (halving the lower end, doubling the upper end)
    at most ``max_expansions`` times per side until it straddles the solution.
    """

    model_config = pydantic.ConfigDict(validate_assignment=True)

    delta: float = pydantic.Field(1e-10, gt=0, allow_inf_nan=False)
    max_iterations: int = pydantic.Field(200, ge=1)
    bracket_lo: float = pydantic.Field(1e-2, gt=0, allow_inf_nan=False)
    bracket_hi: float = pydantic.Field(1e3, gt=0, allow_inf_nan=False)
    max_expansions: int = pydantic.Field(60, ge=1)

    @pydantic.model_validator(mode="after")
    def _check_bracket(self):
        if not self.bracket_lo < self.bracket_hi:
            raise ValueError(f"bracket_lo ({self.bracket_lo}) must be smaller than bracket_hi ({self.bracket_hi})")
        return self

    @classmethod
    def from_file(cls, file_path: typing.Union[str, Path] = Path("solver.toml")):
        """Load solver settings from a .toml or .ini file."""
        file_path = Path(file_path)
        object = cls()
        suffix = file_path.suffix
        try:
            with open(file_path) as file:
                if suffix == ".ini":
                    object.load_ini(file.readlines())
                elif suffix == ".toml":
                    object.apply_options(toml.load(file), strict=True)
                else:
                    raise ValueError(f"Unsupported file extension: {suffix}")
        except FileNotFoundError:
            raise ValueError(f"File {file_path} not found")
        return object

    def apply_options(self, obj, strict=False):
        """Override settings from a mapping. Keys that are not settings are skipped unless ``strict``, ``None`` values always."""
        updates = {}
        for key, value in obj.items():
            if key not in type(self).model_fields:
                if strict:
                    raise ValueError(f"Parameter {key} is not known")
                continue
            if value is not None:
                logger.debug("Applying %s = %s", key, value)
                updates[key] = value
        # Validate the combination, so that e.g. a new bracket_lo is checked against the new bracket_hi.
        validated = type(self).model_validate({**self.model_dump(), **updates})
        self.__dict__.update({key: getattr(validated, key) for key in updates})
        self.__pydantic_fields_set__.update(updates)
        return self

    def to_file(self, file_path: typing.Union[str, Path] = Path("solver.toml")):
        """Save solver settings to a .toml file."""
        file_path = Path(file_path)
        suffix = file_path.suffix
        if suffix != ".toml":
            raise ValueError(f"Unsupported file extension: {suffix}")
        try:
            with open(file_path, "w") as file:
                toml.dump(self.model_dump(), file)
        except FileNotFoundError:
            raise ValueError(f"File {file_path} not found")

    def load_ini(self, lines):
        values = {}
        for line in lines:
            line = line.split("#")[0].strip()
            words = line.split()
            if len(words) >= 2:
                key = words[0]
                field = type(self).model_fields.get(key)
                if field is None:
                    raise ValueError(f"Parameter {key} is not known")
                try:
                    values[key] = field.annotation(words[1])
                except ValueError:
                    raise ValueError(f"Error parsing parameters on line: {line}") from None
        self.apply_options(values, strict=True)


class CLIParser(argparse.ArgumentParser):
    """
    Subclass from the built-in ArgumentParser with functionality to easily add arguments shared by the momfit tools.

    Usage errors raise :class:`.ParseError` instead of exiting, so that every tool reports them the same way.
    """

    _cli_args = None
    _config_args = {
        "tol": {
            "dest": "delta",
            "action": "store",
            "type": float,
            "help": f"Bisection tolerance: absolute width of the final shape interval (default {SolverConfig.model_fields['delta'].default:g}).",
        },
        "max-iterations": {
            "dest": "max_iterations",
            "action": "store",
            "type": int,
            "help": f"Maximum number of bisection steps (default {SolverConfig.model_fields['max_iterations'].default}).",
        },
        "max-expansions": {
            "dest": "max_expansions",
            "action": "store",
            "type": int,
            "help": f"Maximum number of geometric bracket expansions per side (default {SolverConfig.model_fields['max_expansions'].default}).",
        },
    }
    _extra_args = {
        "dist": {
            "short_name": "-d",
            "action": "store",
            "required": True,
            "choices": ["weibull", "gamma", "lognormal"],
            "help": "Distribution family.",
        },
        "orders": {
            "short_name": "-o",
            "action": "store",
            "required": True,
            "type": parse_pair,
            "metavar": "N,M",
            "help": "Pair of distinct positive moment orders, e.g. 2,1. Decimal orders such as 2.5,1 are allowed.",
        },
        "moments": {
            "short_name": "-m",
            "action": "store",
            "required": True,
            "type": parse_pair,
            "metavar": "VN,VM",
            "help": "Observed raw moments E(X^N),E(X^M) in the order of --orders.",
        },
        "params": {
            "short_name": "-p",
            "action": "store",
            "required": True,
            "type": parse_assignments,
            "metavar": "K=V,...",
            "help": "Distribution parameters: k=..,lambda=.. (weibull), alpha=..,beta=.. (gamma), mu=..,sigma=.. (lognormal).",
        },
        "input": {
            "short_name": "-i",
            "action": "store",
            "required": True,
            "help": "Input sample file, '-' for standard input.",
        },
        "format": {
            "short_name": "-F",
            "action": "store",
            "default": None,
            "choices": ["plain", "csv"],
            "help": "Input format. By default inferred from the file extension (.csv is csv, anything else plain).",
        },
        "column": {
            "short_name": "-c",
            "action": "store",
            "default": None,
            "help": "Column name for csv input. May be omitted if the file has a single column.",
        },
        "config": {
            "action": "store",
            "default": None,
            "help": "Solver settings file (.toml or .ini). Command line flags take precedence.",
        },
        "bracket": {
            "action": "store",
            "type": parse_pair,
            "metavar": "LO,HI",
            "help": f"Initial shape bracket (default {SolverConfig.model_fields['bracket_lo'].default:g},{SolverConfig.model_fields['bracket_hi'].default:g}).",
        },
        "from": {
            "dest": "x_from",
            "action": "store",
            "type": float,
            "required": True,
            "help": "Left end of the evaluation interval.",
        },
        "to": {
            "dest": "x_to",
            "action": "store",
            "type": float,
            "required": True,
            "help": "Right end of the evaluation interval.",
        },
        "points": {
            "action": "store",
            "type": int,
            "default": 101,
            "help": "Number of evenly spaced evaluation points (default 101).",
        },
        "count": {
            "short_name": "-n",
            "action": "store",
            "type": int,
            "required": True,
            "help": "Number of values to draw.",
        },
        "seed": {
            "short_name": "-s",
            "action": "store",
            "type": int,
            "default": 0,
            "help": "Unsigned 64-bit seed of the random stream (default 0).",
        },
        "stream": {
            "action": "store",
            "type": int,
            "default": 0,
            "help": "Index of an independent random stream of the same seed (default 0).",
        },
        "verbose": {
            "short_name": "-v",
            "action": "count",
            "default": 0,
            "help": "Log solver progress to stderr; repeat for more detail.",
        },
    }

    def _check_config_args(self):
        for name, arg in self._config_args.items():
            if arg["dest"] not in SolverConfig.model_fields:
                raise ValueError(f"Argument name `{name}` does not match with any solver setting.")

    @property
    def cli_args(self):
        """Dictionary of arguments."""
        if self._cli_args is None:
            self._check_config_args()
            self._cli_args = {**self._config_args, **self._extra_args}
        return self._cli_args

    def add_arguments(self, arg_names):
        """
        Add CLI arguments from the predefined dictionaries.

        Arguments:
            arg_names: list of str. Names of arguments to add.
        """
        for name in arg_names:
            if name not in self.cli_args:
                raise ValueError(f"Invalid argument name `{name}`")
            arg_dict = copy.deepcopy(self.cli_args[name])
            if "help" not in arg_dict:
                raise ValueError(f"No help message defined for `{name}`")
            if "short_name" in arg_dict:
                arg_names = [arg_dict["short_name"], f"--{name}"]
                del arg_dict["short_name"]
            else:
                arg_names = [f"--{name}"]
            self.add_argument(*arg_names, **arg_dict)

    def add_solver_arguments(self):
        self.add_arguments(["tol", "max-iterations", "max-expansions", "bracket", "config"])

    def error(self, message):
        raise errors.ParseError(f"{self.prog}: {message}")


def solver_config_from_args(args):
    """Solver settings from an optional --config file overridden by explicit command line flags."""
    config = SolverConfig.from_file(args.config) if getattr(args, "config", None) else SolverConfig()
    options = {key: getattr(args, key, None) for key in ("delta", "max_iterations", "max_expansions")}
    if getattr(args, "bracket", None) is not None:
        options["bracket_lo"], options["bracket_hi"] = args.bracket
    return config.apply_options(options)


def setup_logging(verbosity=0):
    """Send momfit log records to stderr; verbosity 0 shows warnings, 1 info, 2 and more debug."""
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    root = logging.getLogger("momfit")
    handler = next((h for h in root.handlers if getattr(h, "_momfit", False)), None)
    if handler is None:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        handler._momfit = True
        root.addHandler(handler)
    else:
        handler.setStream(sys.stderr)
    root.setLevel(level)


def report_error(exc, stream=None):
    """Write the one-line diagnostic of a failed command."""
    stream = sys.stderr if stream is None else stream
    if isinstance(exc, errors.MomfitError):
        code = exc.code
    elif isinstance(exc, pydantic.ValidationError):
        code = errors.DomainError.code
    elif isinstance(exc, OSError):
        code = errors.InputFileError.code
    else:
        code = errors.DomainError.code
    message = " ".join(str(exc).split())
    stream.write(f"momfit: error [{code}]: {message}\n")


def exit_code_of(exc):
    if isinstance(exc, errors.MomfitError):
        return exc.exit_code
    return 1


def cli_command(func):
    """
    Wrap a command line ``main`` so that it returns an exit code: 0 on success, 1 for input errors, 2 for numerical failures.
    """

    @functools.wraps(func)
    def wrapper(argv=None):
        try:
            func(argv)
        except (errors.MomfitError, pydantic.ValidationError, ValueError, OSError) as exc:
            logger.debug("Command failed", exc_info=True)
            report_error(exc)
            return exit_code_of(exc)
        return 0

    return wrapper
