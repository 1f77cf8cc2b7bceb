"""
Raw sample moments and sample file loading.

The sample moment of order i is (1/N) sum_j x_j^i, accumulated with exactly rounded summation (:func:`math.fsum`)
so that the result does not depend on the order of the data and high powers do not swamp the small terms.
"""

import csv
import io
import logging
import math
import sys
import typing
from pathlib import Path

import numpy as np
import pydantic

from .common import DECIMAL_NUMBER
from .errors import DomainError, EmptyDataError, InputFileError, MissingColumnError, MomentOverflowError, NegativeValueError, ParseError
from .estimate import MomentPair

logger = logging.getLogger(__name__)

SAMPLE_FORMATS = ("plain", "csv")


class SampleSummary(pydantic.BaseModel):
    """
    Sample size, extreme values and raw moments of a data set.

    ``moments`` holds (order, value) pairs. ``log_moments`` holds (order, ln value) pairs and is filled when the
    log-domain path was used, in which case ``moments`` may contain ``inf`` for the orders that overflow.
    """

    model_config = pydantic.ConfigDict(frozen=True)

    count: int = pydantic.Field(ge=1)
    moments: typing.List[typing.Tuple[float, float]]
    min_value: float
    max_value: float
    log_moments: typing.Optional[typing.List[typing.Tuple[float, float]]] = None

    @pydantic.field_validator("moments")
    @classmethod
    def _check_moments(cls, moments):
        for order, value in moments:
            if not value > 0:
                raise ValueError(f"Moment of order {order} must be > 0, got {value}")
        return moments

    def moment(self, order):
        for i, value in self.moments:
            if i == order:
                return value
        raise DomainError(f"Moment of order {order} was not computed")

    def log_moment(self, order):
        if self.log_moments is not None:
            for i, value in self.log_moments:
                if i == order:
                    return value
        value = self.moment(order)
        if math.isinf(value):
            raise MomentOverflowError(order)
        return math.log(value)

    def moment_pair(self, n, m):
        """The :class:`.MomentPair` of orders (n, m), built from the log moments."""
        return MomentPair.from_log_moments(n, m, self.log_moment(n), self.log_moment(m))


def _as_sample(data):
    values = np.asarray(data, dtype=np.float64).ravel()
    if values.size == 0:
        raise EmptyDataError()
    finite = np.isfinite(values)
    if not finite.all():
        index = int(np.argmin(finite))
        raise DomainError(f"Non-finite sample value {values[index]!r} at index {index}")
    negative = values < 0
    if negative.any():
        index = int(np.argmax(negative))
        raise NegativeValueError(index, float(values[index]))
    return values


def _check_orders(orders):
    orders = [float(i) for i in orders]
    if not orders:
        raise DomainError("No moment orders given")
    for i in orders:
        if not (math.isfinite(i) and i > 0):
            raise DomainError(f"Moment order must be finite and > 0, got {i!r}")
    if len(set(orders)) != len(orders):
        raise DomainError(f"Moment orders must be distinct, got {orders}")
    return orders


def compute_raw_moments(data, orders):
    """
    Raw sample moments of the given orders.

    Arguments:
        data: sequence of float or np.ndarray. Non-negative sample values.
        orders: sequence of float. Distinct positive moment orders, not necessarily integers.

    Returns:
        SampleSummary.

    Raises:
        EmptyDataError, NegativeValueError, DomainError: for unusable data or orders.
        MomentOverflowError: when the power sum of an order overflows, see :func:`compute_log_raw_moments`.
    """
    values = _as_sample(data)
    orders = _check_orders(orders)
    count = values.size
    moments = []
    for i in orders:
        with np.errstate(over="ignore"):
            powers = np.power(values, i)
        if not np.isfinite(powers).all():
            raise MomentOverflowError(i)
        try:
            total = math.fsum(powers)
        except OverflowError:
            raise MomentOverflowError(i) from None
        if math.isinf(total):
            raise MomentOverflowError(i)
        value = total / count
        if value == 0.0:
            raise DomainError(f"Sample moment of order {i} is zero; all-zero data has no distribution fit")
        moments.append((i, value))
    return SampleSummary(count=count, moments=moments, min_value=float(values.min()), max_value=float(values.max()))


def compute_log_raw_moments(data, orders):
    """
    Logarithms of the raw sample moments, ln((1/N) sum_j x_j^i), by log-sum-exp.

    Works for orders whose power sums overflow double precision.

    Returns:
        list of (order, log moment) tuples.
    """
    values = _as_sample(data)
    orders = _check_orders(orders)
    with np.errstate(divide="ignore"):
        log_values = np.log(values)
    log_count = math.log(values.size)
    result = []
    for i in orders:
        terms = i * log_values
        top = float(terms.max())
        if math.isinf(top):
            raise DomainError(f"Sample moment of order {i} is zero; all-zero data has no distribution fit")
        result.append((i, top + math.log(math.fsum(np.exp(terms - top))) - log_count))
    return result


def summarize(data, orders):
    """
    :func:`compute_raw_moments`, falling back to the log-domain moments when a power sum overflows.
    """
    try:
        return compute_raw_moments(data, orders)
    except MomentOverflowError as exc:
        logger.warning("Power sum of order %s overflows, using log-domain moments", exc.order)
    values = _as_sample(data)
    log_moments = compute_log_raw_moments(values, orders)
    moments = [(i, math.exp(v) if v < 709.0 else math.inf) for i, v in log_moments]
    return SampleSummary(
        count=values.size,
        moments=moments,
        min_value=float(values.min()),
        max_value=float(values.max()),
        log_moments=log_moments,
    )


def _parse_number(word, line):
    if not DECIMAL_NUMBER.match(word):
        raise ParseError(f"not a decimal number: `{word}`", line=line)
    return float(word)


def _load_plain(lines):
    values = []
    for line_number, line in enumerate(lines, start=1):
        line = line.split("#")[0].strip()
        if not line:
            continue
        values.append(_parse_number(line, line_number))
    return values


def _load_csv(lines, column):
    reader = csv.reader(lines)
    try:
        header = [name.strip() for name in next(reader)]
    except StopIteration:
        raise ParseError("CSV input has no header", line=1) from None
    if column is None:
        if len(header) != 1:
            raise MissingColumnError(column, header)
        index = 0
    elif column in header:
        index = header.index(column)
    else:
        raise MissingColumnError(column, header)
    values = []
    for row in reader:
        if not any(field.strip() for field in row):
            continue
        if index >= len(row):
            raise ParseError(f"row has no field for column `{header[index]}`", line=reader.line_num)
        values.append(_parse_number(row[index].strip(), reader.line_num))
    return values


def load_samples(stream, fmt="plain", column=None):
    """
    Read sample values from a text or binary stream.

    ``plain``: one decimal number per line, blank lines and ``#`` comments ignored.
    ``csv``: comma separated with a header row; ``column`` selects the field and may be omitted for a single column.

    Returns:
        np.ndarray of the values in file order.

    Raises:
        ParseError: with the line number of the first malformed value.
        MissingColumnError: when the csv column is not in the header.
    """
    if fmt not in SAMPLE_FORMATS:
        raise DomainError(f"Unknown sample format `{fmt}`. Should be one of {list(SAMPLE_FORMATS)}")
    text = stream.read()
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(f"input is not UTF-8 text: {exc.reason}") from None
    lines = io.StringIO(text, newline="")
    values = _load_plain(lines) if fmt == "plain" else _load_csv(lines, column)
    logger.debug("Loaded %d sample values", len(values))
    return np.array(values, dtype=np.float64)


def load_samples_file(path, fmt=None, column=None):
    """
    Read sample values from a file; ``'-'`` reads standard input.

    The format is inferred from the suffix when not given: ``.csv`` is csv, anything else plain.
    """
    if str(path) == "-":
        return load_samples(sys.stdin, fmt or "plain", column)
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "plain"
    try:
        with open(path, "rb") as file:
            return load_samples(file, fmt, column)
    except OSError as exc:
        raise InputFileError(f"Cannot read {path}: {exc.strerror or exc}") from None
