"""
Shape/scale estimation from a pair of raw moments of orders n > m > 0.

The shape parameter enters the moment pair only through a scale-free ratio of the moments, which is strictly
monotone in the shape:

- Weibull:    ln R_W(k)     = m ln Gamma(1 + n/k) - n ln Gamma(1 + m/k)                  (decreasing in k)
- Gamma:      ln R_G(alpha) = m ln Gamma(n + alpha) + n ln Gamma(alpha)
                              - n ln Gamma(m + alpha) - m ln Gamma(alpha)                  (decreasing in alpha)
- Log-normal: ln G(sigma)   = sigma^2 (n - m) / 2                                         (increasing in sigma)

The shape is found by bisection on a bracket that straddles the observed ratio, then the scale (or location) is
solved in closed form from the lower order moment. Everything is done with logarithms of moments.
"""

import logging
import math
import sys
import typing

import pydantic

from . import specfun
from .common import SolverConfig
from .dist import GammaParams, LogNormalParams, WeibullParams, params_class
from .errors import BracketExhaustedError, DomainError, InfeasibleRatioError, IterationLimitError

logger = logging.getLogger(__name__)

# Relative rounding noise of a log moment ratio, in units of the machine epsilon of its terms.
RATIO_NOISE = 16.0 * sys.float_info.epsilon

__all__ = [
    "Bracket",
    "FitResult",
    "MomentPair",
    "RatioFunction",
    "SolverConfig",
    "bisect",
    "fit",
    "fit_gamma",
    "fit_lognormal",
    "fit_weibull",
    "gamma_method_of_moments",
    "lognormal_closed_form",
    "select_bracket",
]


class MomentPair(pydantic.BaseModel):
    """
    Raw moments E(X^n) and E(X^m) of orders n > m > 0.

    The moments are stored as logarithms so that pairs whose raw values overflow remain usable. Construct either from
    the raw values, ``MomentPair(n=2, m=1, moment_n=6.0, moment_m=2.0)``, or from their logarithms,
    ``MomentPair(n=2, m=1, log_moment_n=..., log_moment_m=...)``.

    A valid pair need not be feasible: feasibility (``log_ratio`` above its rounding noise, see ``log_ratio_tolerance``)
    is checked by the fits. Constant data gives a ratio that is 0 up to rounding and is therefore infeasible.
    """

    model_config = pydantic.ConfigDict(frozen=True)

    n: float = pydantic.Field(gt=0, allow_inf_nan=False)
    m: float = pydantic.Field(gt=0, allow_inf_nan=False)
    log_moment_n: float = pydantic.Field(allow_inf_nan=False)
    log_moment_m: float = pydantic.Field(allow_inf_nan=False)

    @pydantic.model_validator(mode="before")
    @classmethod
    def _from_raw_moments(cls, data):
        if not isinstance(data, dict):
            return data
        data = dict(data)
        for suffix in ("n", "m"):
            raw = data.pop(f"moment_{suffix}", None)
            if raw is None:
                continue
            if f"log_moment_{suffix}" in data:
                raise ValueError(f"Give either moment_{suffix} or log_moment_{suffix}, not both")
            try:
                value = float(raw)
            except (TypeError, ValueError):
                value = math.nan
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"moment_{suffix} must be a finite positive number, got {raw!r}")
            data[f"log_moment_{suffix}"] = math.log(value)
        return data

    @pydantic.model_validator(mode="after")
    def _check_orders(self):
        if not self.n > self.m:
            raise ValueError(f"Moment orders must satisfy n > m, got n={self.n}, m={self.m}")
        return self

    @classmethod
    def from_log_moments(cls, n, m, log_moment_n, log_moment_m):
        return cls(n=n, m=m, log_moment_n=log_moment_n, log_moment_m=log_moment_m)

    @classmethod
    def from_mean_variance(cls, mean, variance):
        """The (2, 1) pair E(X^2) = variance + mean^2, E(X) = mean."""
        if not (mean > 0 and variance >= 0):
            raise DomainError(f"Need mean > 0 and variance >= 0, got mean={mean!r}, variance={variance!r}")
        return cls(n=2, m=1, moment_n=variance + mean * mean, moment_m=mean)

    @property
    def moment_n(self):
        return _exp_or_inf(self.log_moment_n)

    @property
    def moment_m(self):
        return _exp_or_inf(self.log_moment_m)

    @property
    def log_ratio(self):
        """ln r = m ln E(X^n) - n ln E(X^m), positive for every non-degenerate distribution on [0, inf)."""
        return self.m * self.log_moment_n - self.n * self.log_moment_m

    @property
    def log_g(self):
        """ln g = ln E(X^n)/n - ln E(X^m)/m, the log of the ratio of power means."""
        return self.log_moment_n / self.n - self.log_moment_m / self.m

    @property
    def log_ratio_tolerance(self):
        """Bound on the rounding error of ``log_ratio`` carried over from the log moments."""
        return RATIO_NOISE * (self.m * (1.0 + abs(self.log_moment_n)) + self.n * (1.0 + abs(self.log_moment_m)))

    @property
    def is_feasible(self):
        return self.log_ratio > self.log_ratio_tolerance and self.log_g > 0

    def check_feasible(self):
        if not self.is_feasible:
            raise InfeasibleRatioError(self.log_ratio, self.log_ratio_tolerance)


def _exp_or_inf(value):
    try:
        return math.exp(value)
    except OverflowError:
        return math.inf


class RatioFunction(typing.NamedTuple):
    """A strictly monotone function of the shape parameter together with its direction."""

    fn: typing.Callable[[float], float]
    decreasing: bool

    def __call__(self, x):
        return self.fn(x)


class Bracket(typing.NamedTuple):
    lo: float
    hi: float
    expansions: int = 0


class FitResult(pydantic.BaseModel):
    """
    Estimated parameters with convergence diagnostics.

    ``final_bracket_width`` is the width of the last bisection interval, at most ``delta`` unless the shape is so
    large that neighbouring doubles are further apart, ``log_ratio_residual``
    the difference of the log moment ratio at the estimate and the observed one. ``bracket_lo``/``bracket_hi`` are the
    ends of the interval the bisection started from, after expansion.
    """

    model_config = pydantic.ConfigDict(frozen=True)

    dist: str
    params: typing.Union[WeibullParams, GammaParams, LogNormalParams] = pydantic.Field(discriminator="kind")
    orders: typing.Tuple[float, float]
    iterations: int = pydantic.Field(ge=0)
    expansions: int = pydantic.Field(ge=0)
    bracket_lo: float
    bracket_hi: float
    final_bracket_width: float = pydantic.Field(ge=0)
    log_ratio_residual: float = pydantic.Field(allow_inf_nan=False)
    delta: float
    max_iterations: int

    @property
    def shape(self):
        return self.params.shape


def select_bracket(log_target, ratio, cfg=None):
    """
    Find an interval of the shape parameter on which the ratio function straddles ``log_target``.

    Starts from ``cfg.bracket_lo``/``cfg.bracket_hi`` and halves the lower end / doubles the upper end, at most
    ``cfg.max_expansions`` times per side. For a decreasing ratio the result satisfies
    ratio(lo) >= log_target >= ratio(hi), for an increasing one ratio(lo) <= log_target <= ratio(hi).

    Arguments:
        log_target: float. Target value of the (log) ratio function.
        ratio: RatioFunction.
        cfg: SolverConfig or None for defaults.

    Returns:
        Bracket (lo, hi, expansions).

    Raises:
        BracketExhaustedError: when the target is not straddled after the allowed expansions.
    """
    cfg = cfg or SolverConfig()
    sign = 1.0 if ratio.decreasing else -1.0
    lo, hi = cfg.bracket_lo, cfg.bracket_hi
    expansions = 0

    # With the sign flip both cases read: f(lo) >= t >= f(hi).
    steps = 0
    while sign * ratio(lo) < sign * log_target:
        if steps >= cfg.max_expansions:
            raise BracketExhaustedError(f"Lower bracket end {lo!r} still misses target {log_target!r} after {steps} expansions")
        lo *= 0.5
        steps += 1
    expansions += steps

    steps = 0
    while sign * ratio(hi) > sign * log_target:
        if steps >= cfg.max_expansions:
            raise BracketExhaustedError(f"Upper bracket end {hi!r} still misses target {log_target!r} after {steps} expansions")
        hi *= 2.0
        steps += 1
    expansions += steps

    if expansions:
        logger.debug("Bracket expanded %d times to [%g, %g]", expansions, lo, hi)
    return Bracket(lo, hi, expansions)


def bisect(ratio, log_target, lo, hi, cfg=None, callback=None):
    """
    Halve [lo, hi] until its width is at most ``cfg.delta``, keeping the target straddled.

    The loop also ends when ``lo`` and ``hi`` are adjacent doubles and have no midpoint. Above about
    ``cfg.delta / 2.2e-16`` the spacing of doubles exceeds ``cfg.delta`` and the returned width is that spacing.

    For a decreasing ratio: if ratio(mid) > target the solution lies above mid and ``lo`` moves, otherwise ``hi``.
    The increasing case is mirrored.

    Arguments:
        ratio: RatioFunction.
        log_target: float.
        lo, hi: float. A straddling bracket, see :func:`select_bracket`.
        cfg: SolverConfig or None for defaults.
        callback: optional callable ``callback(iteration, lo, hi)`` invoked after every halving.

    Returns:
        lo, hi: float. Final bracket.
        iterations: int. Number of halvings.

    Raises:
        IterationLimitError: if ``cfg.max_iterations`` halvings do not reach the tolerance.
    """
    cfg = cfg or SolverConfig()
    iterations = 0
    while hi - lo > cfg.delta:
        if iterations >= cfg.max_iterations:
            raise IterationLimitError(f"Bracket width {hi - lo!r} still above tolerance {cfg.delta!r} after {iterations} iterations")
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            logger.debug("No double between %r and %r, stopping at width %g above tolerance %g", lo, hi, hi - lo, cfg.delta)
            break
        if (ratio(mid) > log_target) == ratio.decreasing:
            lo = mid
        else:
            hi = mid
        iterations += 1
        if callback is not None:
            callback(iterations, lo, hi)
    return lo, hi, iterations


def _solve_shape(ratio, log_target, cfg):
    bracket = select_bracket(log_target, ratio, cfg)
    lo, hi, iterations = bisect(ratio, log_target, bracket.lo, bracket.hi, cfg)
    shape = 0.5 * (lo + hi)
    logger.debug("Shape %r after %d iterations, bracket width %g", shape, iterations, hi - lo)
    return shape, bracket, iterations, hi - lo


def _result(kind, mp, params, ratio, log_target, bracket, iterations, width, cfg):
    return FitResult(
        dist=kind,
        params=params,
        orders=(mp.n, mp.m),
        iterations=iterations,
        expansions=bracket.expansions,
        bracket_lo=bracket.lo,
        bracket_hi=bracket.hi,
        final_bracket_width=width,
        log_ratio_residual=ratio(params.shape) - log_target,
        delta=cfg.delta,
        max_iterations=cfg.max_iterations,
    )


def fit_weibull(mp, cfg=None):
    """
    Weibull shape ``k`` and scale ``lambda`` matching the moment pair.

    k solves ln R_W(k) = ln r by bisection, then lambda = (E(X^m) / Gamma(1 + m/k))^(1/m).

    Arguments:
        mp: MomentPair.
        cfg: SolverConfig or None for defaults.

    Returns:
        FitResult with :class:`.WeibullParams`.

    Raises:
        InfeasibleRatioError: if ln r is not above the rounding noise of the log moments.
        BracketExhaustedError, IterationLimitError: see :func:`select_bracket` and :func:`bisect`.
    """
    cfg = cfg or SolverConfig()
    mp.check_feasible()
    log_target = mp.log_ratio
    ratio = RatioFunction(lambda k: specfun.log_weibull_ratio(k, mp.n, mp.m), decreasing=True)
    k, bracket, iterations, width = _solve_shape(ratio, log_target, cfg)
    lam = math.exp((mp.log_moment_m - specfun.log_gamma(1.0 + mp.m / k)) / mp.m)
    return _result("weibull", mp, WeibullParams(k=k, lam=lam), ratio, log_target, bracket, iterations, width, cfg)


def fit_gamma(mp, cfg=None):
    """
    Gamma shape ``alpha`` and scale ``beta`` matching the moment pair.

    alpha solves ln R_G(alpha) = ln r by bisection, then beta = (E(X^m) Gamma(alpha) / Gamma(m + alpha))^(1/m).
    Errors as for :func:`fit_weibull`.
    """
    cfg = cfg or SolverConfig()
    mp.check_feasible()
    log_target = mp.log_ratio
    ratio = RatioFunction(lambda alpha: specfun.log_gamma_ratio(alpha, mp.n, mp.m), decreasing=True)
    alpha, bracket, iterations, width = _solve_shape(ratio, log_target, cfg)
    beta = math.exp((mp.log_moment_m + specfun.log_gamma(alpha) - specfun.log_gamma(mp.m + alpha)) / mp.m)
    return _result("gamma", mp, GammaParams(alpha=alpha, beta=beta), ratio, log_target, bracket, iterations, width, cfg)


def fit_lognormal(mp, cfg=None):
    """
    Log-normal ``sigma`` and ``mu`` matching the moment pair.

    sigma solves sigma^2 (n - m) / 2 = ln g by bisection on the increasing G, then mu = ln E(X^m)/m - sigma^2 m / 2.
    Errors as for :func:`fit_weibull`; infeasible under the same rule.
    """
    cfg = cfg or SolverConfig()
    mp.check_feasible()
    log_target = mp.log_g
    ratio = RatioFunction(lambda sigma: specfun.log_lognormal_ratio(sigma, mp.n, mp.m), decreasing=False)
    sigma, bracket, iterations, width = _solve_shape(ratio, log_target, cfg)
    mu = mp.log_moment_m / mp.m - 0.5 * sigma * sigma * mp.m
    return _result("lognormal", mp, LogNormalParams(mu=mu, sigma=sigma), ratio, log_target, bracket, iterations, width, cfg)


_FITTERS = {
    "weibull": fit_weibull,
    "gamma": fit_gamma,
    "lognormal": fit_lognormal,
}


def fit(kind, mp, cfg=None):
    """Fit the distribution named by ``kind`` (one of ``'weibull'``, ``'gamma'``, ``'lognormal'``)."""
    params_class(kind)
    return _FITTERS[kind](mp, cfg)


def lognormal_closed_form(mp):
    """Direct Log-normal solution sigma = sqrt(2 ln g / (n - m)), mu = ln E(X^m)/m - sigma^2 m / 2."""
    mp.check_feasible()
    sigma = math.sqrt(2.0 * mp.log_g / (mp.n - mp.m))
    return LogNormalParams(mu=mp.log_moment_m / mp.m - 0.5 * sigma * sigma * mp.m, sigma=sigma)


def gamma_method_of_moments(mp):
    """
    Classical mean/variance estimator of the Gamma distribution: alpha = m1^2 / (m2 - m1^2), beta = (m2 - m1^2) / m1.

    Only defined for the pair of orders (2, 1).
    """
    if (mp.n, mp.m) != (2.0, 1.0):
        raise DomainError(f"The classical estimator needs orders (2, 1), got ({mp.n}, {mp.m})")
    mp.check_feasible()
    m1, m2 = mp.moment_m, mp.moment_n
    var = m2 - m1 * m1
    return GammaParams(alpha=m1 * m1 / var, beta=var / m1)

