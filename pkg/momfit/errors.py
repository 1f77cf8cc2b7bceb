"""
Exceptions raised by momfit.

Every exception carries a stable ``code`` string that the command line tools print and an ``exit_code``:
1 for bad input (parameters, data, files) and 2 for numerical failures of an otherwise valid request.
"""


class MomfitError(Exception):
    """Base class of all momfit errors."""

    code = "ERROR"
    exit_code = 1


class DomainError(MomfitError, ValueError):
    """An argument lies outside the domain of the operation."""

    code = "DOMAIN_ERROR"


class EmptyDataError(DomainError):
    """A sample with no values."""

    def __init__(self, message="Sample data is empty"):
        super().__init__(message)


class NegativeValueError(DomainError):
    """A sample value below zero, outside the support of all three distributions."""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"Negative sample value {value!r} at index {index}")


class ParseError(MomfitError, ValueError):
    """Malformed input text or command line."""

    code = "PARSE_ERROR"

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class MissingColumnError(ParseError):
    def __init__(self, column, available=()):
        self.column = column
        super().__init__(f"Column `{column}` not found in CSV header {list(available)}")


class InputFileError(MomfitError, OSError):
    code = "IO_ERROR"


class InfeasibleRatioError(MomfitError):
    """The moment pair violates the strict power-mean inequality, so no member of the family matches it."""

    code = "INFEASIBLE_RATIO"
    exit_code = 2

    def __init__(self, log_ratio, tolerance=0.0):
        self.log_ratio = log_ratio
        self.tolerance = tolerance
        if log_ratio > 0:
            message = f"Moment pair is infeasible: log moment ratio {log_ratio!r} is within rounding error {tolerance:.3g} of 0"
        else:
            message = f"Moment pair is infeasible: log moment ratio {log_ratio!r} must be > 0"
        super().__init__(message)


class BracketExhaustedError(MomfitError):
    code = "BRACKET_EXHAUSTED"
    exit_code = 2


class IterationLimitError(MomfitError):
    code = "ITERATION_LIMIT"
    exit_code = 2


class MomentOverflowError(MomfitError, OverflowError):
    """A moment is too large to be represented; the log-domain variant of the operation still works."""

    code = "OVERFLOW"
    exit_code = 2

    def __init__(self, order, message=None):
        self.order = order
        super().__init__(message or f"Moment of order {order!r} overflows the floating point range")
