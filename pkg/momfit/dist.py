"""
Weibull, Gamma and Log-normal parameter records, densities and raw moments.

This is the forward model inverted by :mod:`momfit.estimate`: ``log_theoretical_moment`` gives ln E(X^i)
for positive real order ``i``, ``theoretical_moment`` its exponential.
"""

import math
import typing

import numpy as np
import pydantic

from .errors import DomainError, MomentOverflowError
from .specfun import HALF_LOG_2PI, log_gamma

DIST_KINDS = ("weibull", "gamma", "lognormal")

# ln of the largest finite double
LOG_FLOAT_MAX = float(np.log(np.finfo(np.float64).max))

PositiveFloat = typing.Annotated[float, pydantic.Field(gt=0, allow_inf_nan=False)]


class WeibullParams(pydantic.BaseModel):
    """Weibull distribution with shape ``k`` and scale ``lam`` (serialized as ``lambda``)."""

    model_config = pydantic.ConfigDict(frozen=True, populate_by_name=True)

    kind: typing.Literal["weibull"] = "weibull"
    k: PositiveFloat
    lam: PositiveFloat = pydantic.Field(alias="lambda")

    @property
    def shape(self):
        return self.k


class GammaParams(pydantic.BaseModel):
    """Gamma distribution with shape ``alpha`` and scale ``beta``."""

    model_config = pydantic.ConfigDict(frozen=True)

    kind: typing.Literal["gamma"] = "gamma"
    alpha: PositiveFloat
    beta: PositiveFloat

    @property
    def shape(self):
        return self.alpha


class LogNormalParams(pydantic.BaseModel):
    """Log-normal distribution: ln X is normal with mean ``mu`` and standard deviation ``sigma``."""

    model_config = pydantic.ConfigDict(frozen=True)

    kind: typing.Literal["lognormal"] = "lognormal"
    mu: float = pydantic.Field(allow_inf_nan=False)
    sigma: PositiveFloat

    @property
    def shape(self):
        return self.sigma


DistributionParams = typing.Union[WeibullParams, GammaParams, LogNormalParams]

_PARAM_CLASSES = {
    "weibull": WeibullParams,
    "gamma": GammaParams,
    "lognormal": LogNormalParams,
}


def params_class(kind):
    try:
        return _PARAM_CLASSES[kind]
    except KeyError:
        raise DomainError(f"Unknown distribution `{kind}`. Should be one of {list(DIST_KINDS)}") from None


def make_params(kind, values):
    """
    Build a parameter record of the given distribution kind.

    Arguments:
        kind: str. One of ``'weibull'``, ``'gamma'``, ``'lognormal'``.
        values: dict. Parameter values by name. The Weibull scale may be given as ``lambda`` or ``lam``.

    Returns:
        DistributionParams.
    """
    cls = params_class(kind)
    values = dict(values)
    allowed = {name for name in cls.model_fields if name != "kind"} | {f.alias for f in cls.model_fields.values() if f.alias}
    unknown = set(values) - allowed
    if unknown:
        raise DomainError(f"Unknown parameter(s) {sorted(unknown)} for distribution `{kind}`")
    return cls.model_validate(values)


def params_to_dict(params):
    """Parameter values keyed by their public names (``lambda`` for the Weibull scale)."""
    return params.model_dump(by_alias=True, exclude={"kind"})


def _check_order(i):
    if not (math.isfinite(i) and i > 0):
        raise DomainError(f"Moment order must be finite and > 0, got {i!r}")


def log_theoretical_moment(params, i):
    """
    Logarithm of the i-th raw moment ln E(X^i).

    Arguments:
        params: DistributionParams.
        i: float. Positive moment order, not necessarily an integer.

    Returns:
        float.
    """
    i = float(i)
    _check_order(i)
    if params.kind == "weibull":
        return i * math.log(params.lam) + log_gamma(1.0 + i / params.k)
    if params.kind == "gamma":
        return i * math.log(params.beta) + log_gamma(i + params.alpha) - log_gamma(params.alpha)
    if params.kind == "lognormal":
        return params.mu * i + 0.5 * params.sigma**2 * i * i
    raise DomainError(f"Unsupported parameter record {params!r}")


def theoretical_moment(params, i):
    """
    The i-th raw moment E(X^i).

    Raises:
        MomentOverflowError: if the moment exceeds the double precision range. Use :func:`log_theoretical_moment` then.
    """
    log_value = log_theoretical_moment(params, i)
    if log_value > LOG_FLOAT_MAX:
        raise MomentOverflowError(i, f"Moment of order {i!r} is exp({log_value!r}) which overflows; use the log moment instead")
    return math.exp(log_value)


def mean(params):
    return theoretical_moment(params, 1)


def variance(params):
    m1 = theoretical_moment(params, 1)
    return theoretical_moment(params, 2) - m1 * m1


def pdf(params, x):
    """
    Probability density f(x) of the distribution.

    The density is 0 for x < 0. At x = 0 the Weibull (k < 1) and Gamma (alpha < 1) densities diverge and
    ``inf`` is returned; the Log-normal density is 0 there (its limit).

    Arguments:
        params: DistributionParams.
        x: float or np.ndarray. Evaluation points.

    Returns:
        float or np.ndarray of the same shape as ``x``.
    """
    scalar = np.ndim(x) == 0
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros_like(x)
    positive = x > 0
    xp = x[positive]
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        if params.kind == "weibull":
            k, lam = params.k, params.lam
            t = xp / lam
            out[positive] = np.exp(math.log(k / lam) + (k - 1.0) * np.log(t) - t**k)
            out[x == 0] = _density_at_zero(k, 1.0 / lam)
        elif params.kind == "gamma":
            alpha, beta = params.alpha, params.beta
            log_norm = alpha * math.log(beta) + log_gamma(alpha)
            out[positive] = np.exp((alpha - 1.0) * np.log(xp) - xp / beta - log_norm)
            out[x == 0] = _density_at_zero(alpha, 1.0 / beta)
        elif params.kind == "lognormal":
            mu, sigma = params.mu, params.sigma
            log_x = np.log(xp)
            out[positive] = np.exp(-0.5 * ((log_x - mu) / sigma) ** 2 - log_x - math.log(sigma) - HALF_LOG_2PI)
        else:
            raise DomainError(f"Unsupported parameter record {params!r}")
    if scalar:
        return float(out)
    return out


def _density_at_zero(shape, value_at_unit_shape):
    if shape < 1.0:
        return math.inf
    if shape == 1.0:
        return value_at_unit_shape
    return 0.0


def pdf_grid(params, x_from, x_to, points):
    """
    Evaluate the density on ``points`` evenly spaced points of [x_from, x_to].

    Returns:
        xs: np.ndarray of shape (points,).
        densities: np.ndarray of shape (points,).
    """
    if points < 1:
        raise DomainError(f"Number of points must be >= 1, got {points}")
    if not (math.isfinite(x_from) and math.isfinite(x_to)) or x_to < x_from:
        raise DomainError(f"Invalid interval [{x_from}, {x_to}]")
    xs = np.linspace(x_from, x_to, points)
    return xs, pdf(params, xs)
