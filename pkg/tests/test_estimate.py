import itertools
import math

import numpy as np
import pydantic
import pytest

from momfit import dist, empirical, estimate, specfun
from momfit.errors import BracketExhaustedError, DomainError, InfeasibleRatioError, IterationLimitError

SHAPES = [0.3, 0.5, 1, 2, 5, 10]
SCALES = [0.5, 1, 3]
LOCATIONS = [-1, 0, 2]
ORDER_PAIRS = [(2, 1), (3, 1), (3, 2), (4, 2), (2.5, 1)]


def _moment_pair(params, n, m):
    return estimate.MomentPair.from_log_moments(n, m, dist.log_theoretical_moment(params, n), dist.log_theoretical_moment(params, m))


def _grid():
    for (n, m), shape, scale in itertools.product(ORDER_PAIRS, SHAPES, SCALES):
        yield dist.WeibullParams(k=shape, lam=scale), n, m
        yield dist.GammaParams(alpha=shape, beta=scale), n, m
    for (n, m), sigma, mu in itertools.product(ORDER_PAIRS, SHAPES, LOCATIONS):
        yield dist.LogNormalParams(mu=mu, sigma=sigma), n, m


def test_moment_pair():
    mp = estimate.MomentPair(n=2, m=1, moment_n=6.0, moment_m=2.0)
    assert np.isclose(mp.moment_n, 6.0)
    assert np.isclose(mp.moment_m, 2.0)
    assert np.isclose(mp.log_ratio, math.log(6 / 4))
    assert np.isclose(mp.log_g, math.log(6) / 2 - math.log(2))
    assert mp.is_feasible

    mp = estimate.MomentPair.from_mean_variance(2.0, 2.0)
    assert (mp.n, mp.m) == (2, 1)
    assert np.isclose(mp.moment_n, 6.0)

    # Log moments beyond the floating point range remain usable
    mp = estimate.MomentPair(n=4, m=2, log_moment_n=800.0, log_moment_m=200.0)
    assert mp.moment_n == math.inf
    assert mp.log_ratio == 2 * 800.0 - 4 * 200.0

    # Infeasible pairs are valid records
    assert not estimate.MomentPair(n=2, m=1, moment_n=1.0, moment_m=1.0).is_feasible


@pytest.mark.parametrize(
    "fields",
    [
        {"n": 1, "m": 2, "moment_n": 2.0, "moment_m": 1.0},
        {"n": 2, "m": 2, "moment_n": 2.0, "moment_m": 1.0},
        {"n": 2, "m": 0, "moment_n": 2.0, "moment_m": 1.0},
        {"n": 2, "m": 1, "moment_n": 0.0, "moment_m": 1.0},
        {"n": 2, "m": 1, "moment_n": 2.0, "moment_m": -1.0},
        {"n": 2, "m": 1, "moment_n": math.nan, "moment_m": 1.0},
        {"n": 2, "m": 1, "moment_n": 2.0, "log_moment_n": 1.0, "moment_m": 1.0},
    ],
)
def test_moment_pair_invalid(fields):
    with pytest.raises(pydantic.ValidationError):
        estimate.MomentPair(**fields)


@pytest.mark.parametrize(
    "n, m, moment_n, moment_m, k, lam",
    [
        (2, 1, 2.0, 1.0, 1.0, 1.0),
        (2, 1, 9.0, 2.6586807763, 2.0, 3.0),
        (3, 1, 6.0, 1.0, 1.0, 1.0),
    ],
)
def test_fit_weibull_examples(n, m, moment_n, moment_m, k, lam):
    result = estimate.fit_weibull(estimate.MomentPair(n=n, m=m, moment_n=moment_n, moment_m=moment_m), estimate.SolverConfig(delta=1e-10))
    assert result.dist == "weibull"
    assert np.isclose(result.params.k, k, rtol=1e-6)
    assert np.isclose(result.params.lam, lam, rtol=1e-6)
    assert result.final_bracket_width <= 1e-10
    assert abs(result.log_ratio_residual) < 1e-8


@pytest.mark.parametrize(
    "n, m, moment_n, moment_m, alpha, beta",
    [
        (2, 1, 6.0, 2.0, 2.0, 1.0),
        (2, 1, 2.0, 1.0, 1.0, 1.0),
        (3, 2, 6.0, 2.0, 1.0, 1.0),
    ],
)
def test_fit_gamma_examples(n, m, moment_n, moment_m, alpha, beta):
    result = estimate.fit_gamma(estimate.MomentPair(n=n, m=m, moment_n=moment_n, moment_m=moment_m), estimate.SolverConfig(delta=1e-10))
    assert result.dist == "gamma"
    assert np.isclose(result.params.alpha, alpha, rtol=1e-6)
    assert np.isclose(result.params.beta, beta, rtol=1e-6)


@pytest.mark.parametrize(
    "n, m, log_moment_n, log_moment_m, mu, sigma",
    [
        (2, 1, 2.0, 0.5, 0.0, 1.0),
        (3, 1, 7.5, 1.5, 1.0, 1.0),
    ],
)
def test_fit_lognormal_examples(n, m, log_moment_n, log_moment_m, mu, sigma):
    mp = estimate.MomentPair(n=n, m=m, moment_n=math.exp(log_moment_n), moment_m=math.exp(log_moment_m))
    result = estimate.fit_lognormal(mp, estimate.SolverConfig(delta=1e-12))
    assert result.dist == "lognormal"
    assert abs(result.params.sigma - sigma) < 1e-8
    assert abs(result.params.mu - mu) < 1e-8


@pytest.mark.parametrize("fit", [estimate.fit_weibull, estimate.fit_gamma, estimate.fit_lognormal])
def test_infeasible(fit):
    with pytest.raises(InfeasibleRatioError):
        fit(estimate.MomentPair(n=2, m=1, moment_n=1.0, moment_m=1.0))
    with pytest.raises(InfeasibleRatioError) as info:
        fit(estimate.MomentPair(n=2, m=1, moment_n=1.0, moment_m=2.0))
    assert info.value.log_ratio < 0


@pytest.mark.parametrize("orders", [(2, 1), (3, 1), (2.5, 1), (3, 2)])
def test_constant_data_infeasible(orders):
    n, m = orders
    rng = np.random.default_rng(30)
    constants = [6.633918380418473, 2.0, 1.0, 1e-3, 1e3, *(10 ** rng.uniform(-3, 3, 200))]
    for c in constants:
        mp = empirical.compute_raw_moments([c] * 5, [n, m]).moment_pair(n, m)
        assert not mp.is_feasible, c
        assert abs(mp.log_ratio) <= mp.log_ratio_tolerance
        for fit in (estimate.fit_weibull, estimate.fit_gamma, estimate.fit_lognormal, estimate.lognormal_closed_form):
            with pytest.raises(InfeasibleRatioError):
                fit(mp)


def test_nearly_constant_data_feasible():
    mp = empirical.compute_raw_moments([1.0, 1.0 + 1e-4], [2, 1]).moment_pair(2, 1)
    assert mp.is_feasible
    assert np.isclose(mp.log_ratio, 2.5e-9, rtol=1e-3)
    result = estimate.fit_lognormal(mp, estimate.SolverConfig(delta=1e-14))
    assert np.isclose(result.params.sigma, estimate.lognormal_closed_form(mp).sigma, rtol=1e-6)


def test_round_trip_grid():
    config = estimate.SolverConfig(delta=1e-9)
    cases = 0
    for params, n, m in _grid():
        result = estimate.fit(params.kind, _moment_pair(params, n, m), config)
        assert abs(result.shape - params.shape) <= 1e-9, (params, n, m)
        if params.kind == "weibull":
            assert np.isclose(result.params.lam, params.lam, rtol=1e-6, atol=0)
        elif params.kind == "gamma":
            assert np.isclose(result.params.beta, params.beta, rtol=1e-6, atol=0)
        else:
            assert abs(result.params.mu - params.mu) <= 1e-6 * max(1.0, abs(params.mu))
        # Every step halves the interval
        assert result.iterations == math.ceil(math.log2((result.bracket_hi - result.bracket_lo) / config.delta))
        assert result.final_bracket_width <= config.delta
        assert result.orders == (n, m)
        cases += 1
    assert cases == 3 * len(SHAPES) * len(SCALES) * len(ORDER_PAIRS)


def test_bracket_invariant():
    config = estimate.SolverConfig(delta=1e-9)
    for n, m in ORDER_PAIRS:
        for ratio, target in [
            (estimate.RatioFunction(lambda k: specfun.log_weibull_ratio(k, n, m), True), specfun.log_weibull_ratio(2.5, n, m)),
            (estimate.RatioFunction(lambda a: specfun.log_gamma_ratio(a, n, m), True), specfun.log_gamma_ratio(0.7, n, m)),
            (estimate.RatioFunction(lambda s: specfun.log_lognormal_ratio(s, n, m), False), specfun.log_lognormal_ratio(3.0, n, m)),
        ]:
            sign = 1 if ratio.decreasing else -1
            widths = []

            def check(iteration, lo, hi):
                assert sign * ratio(lo) >= sign * target >= sign * ratio(hi)
                widths.append(hi - lo)

            bracket = estimate.select_bracket(target, ratio, config)
            lo, hi, iterations = estimate.bisect(ratio, target, bracket.lo, bracket.hi, config, callback=check)
            assert len(widths) == iterations
            assert widths[-1] == hi - lo <= config.delta
            assert np.allclose(np.array(widths[1:]) / np.array(widths[:-1]), 0.5, rtol=1e-5)


def test_select_bracket():
    weibull = estimate.RatioFunction(lambda k: specfun.log_weibull_ratio(k, 2, 1), True)
    config = estimate.SolverConfig()

    bracket = estimate.select_bracket(math.log(2), weibull, config)
    assert bracket.lo <= 1.0 <= bracket.hi
    assert weibull(bracket.lo) >= math.log(2) >= weibull(bracket.hi)
    assert bracket.expansions == 0

    # Target exactly at the lower end is accepted as is
    bracket = estimate.select_bracket(weibull(config.bracket_lo), weibull, config)
    assert (bracket.lo, bracket.hi, bracket.expansions) == (config.bracket_lo, config.bracket_hi, 0)

    # Solution above the default upper end needs one doubling
    bracket = estimate.select_bracket(weibull(2000.0), weibull, config)
    assert (bracket.lo, bracket.hi, bracket.expansions) == (config.bracket_lo, 2000.0, 1)

    # Solution below the lower end, found by halving
    bracket = estimate.select_bracket(weibull(0.001), weibull, config)
    assert bracket.lo <= 0.001
    assert bracket.expansions == 4

    lognormal = estimate.RatioFunction(lambda s: specfun.log_lognormal_ratio(s, 2, 1), False)
    bracket = estimate.select_bracket(specfun.log_lognormal_ratio(5000.0, 2, 1), lognormal, config)
    assert bracket.hi >= 5000.0


def test_select_bracket_exhausted():
    config = estimate.SolverConfig(max_expansions=3)
    weibull = estimate.RatioFunction(lambda k: specfun.log_weibull_ratio(k, 2, 1), True)
    with pytest.raises(BracketExhaustedError):
        estimate.select_bracket(weibull(config.bracket_lo * 2**-4), weibull, config)
    lognormal = estimate.RatioFunction(lambda s: specfun.log_lognormal_ratio(s, 2, 1), False)
    with pytest.raises(BracketExhaustedError):
        estimate.select_bracket(specfun.log_lognormal_ratio(config.bracket_hi * 2**4, 2, 1), lognormal, config)


def test_iteration_limit():
    mp = estimate.MomentPair(n=2, m=1, moment_n=6.0, moment_m=2.0)
    with pytest.raises(IterationLimitError):
        estimate.fit_gamma(mp, estimate.SolverConfig(max_iterations=5))


def test_shape_above_double_spacing():
    # Doubles near 2e6 are 2.3e-10 apart, more than the default tolerance
    sigma = 2e6
    mp = estimate.MomentPair.from_log_moments(2, 1, 2 * sigma * sigma, 0.5 * sigma * sigma)
    result = estimate.fit_lognormal(mp)
    assert np.isclose(result.params.sigma, sigma, rtol=1e-12)
    assert result.delta < result.final_bracket_width <= 2 * np.spacing(sigma)
    assert result.iterations < result.max_iterations

    mp = estimate.MomentPair.from_mean_variance(2.0, 2e-6)
    result = estimate.fit_gamma(mp)
    assert np.isclose(result.params.alpha, 2e6, rtol=0.25)
    assert result.iterations < result.max_iterations

    lo, hi, iterations = estimate.bisect(estimate.RatioFunction(lambda x: x, decreasing=False), 1e7, 0.0, 1e8)
    assert hi - lo == np.spacing(1e7)
    assert lo <= 1e7 <= hi
    assert iterations < 200


def test_fit_result_expansions():
    # Weibull k = 0.004 lies below the default bracket
    params = dist.WeibullParams(k=0.004, lam=1.0)
    result = estimate.fit_weibull(_moment_pair(params, 2, 1), estimate.SolverConfig(delta=1e-12))
    assert result.expansions == 2
    assert result.bracket_lo == 0.0025
    assert np.isclose(result.params.k, 0.004, rtol=1e-8)


def test_scale_equivariance():
    rng = np.random.default_rng(10)
    config = estimate.SolverConfig(delta=1e-12)
    for _ in range(50):
        params = [
            dist.WeibullParams(k=rng.uniform(0.3, 10), lam=rng.uniform(0.5, 3)),
            dist.GammaParams(alpha=rng.uniform(0.3, 10), beta=rng.uniform(0.5, 3)),
            dist.LogNormalParams(mu=rng.uniform(-1, 2), sigma=rng.uniform(0.3, 3)),
        ]
        n, m = ORDER_PAIRS[rng.integers(len(ORDER_PAIRS))]
        c = 10 ** rng.uniform(-3, 3)
        for p in params:
            mp = _moment_pair(p, n, m)
            scaled = estimate.MomentPair.from_log_moments(n, m, mp.log_moment_n + n * math.log(c), mp.log_moment_m + m * math.log(c))
            original = estimate.fit(p.kind, mp, config)
            result = estimate.fit(p.kind, scaled, config)
            assert np.isclose(result.shape, original.shape, rtol=1e-9, atol=0)
            if p.kind == "weibull":
                assert np.isclose(result.params.lam, c * original.params.lam, rtol=1e-9, atol=0)
            elif p.kind == "gamma":
                assert np.isclose(result.params.beta, c * original.params.beta, rtol=1e-9, atol=0)
            else:
                assert abs(result.params.mu - original.params.mu - math.log(c)) < 1e-9


def test_gamma_method_of_moments():
    rng = np.random.default_rng(11)
    config = estimate.SolverConfig(delta=1e-12)
    for _ in range(1000):
        alpha, beta = rng.uniform(0.2, 20), rng.uniform(0.1, 10)
        mean, variance = alpha * beta, alpha * beta * beta
        mp = estimate.MomentPair.from_mean_variance(mean, variance)
        classical = estimate.gamma_method_of_moments(mp)
        result = estimate.fit_gamma(mp, config)
        assert np.isclose(result.params.alpha, classical.alpha, rtol=1e-8, atol=0)
        assert np.isclose(result.params.beta, classical.beta, rtol=1e-8, atol=0)

    with pytest.raises(DomainError):
        estimate.gamma_method_of_moments(estimate.MomentPair(n=3, m=1, moment_n=6.0, moment_m=1.0))


def test_lognormal_closed_form():
    rng = np.random.default_rng(12)
    config = estimate.SolverConfig()
    for _ in range(1000):
        m = rng.uniform(0.5, 3)
        n = m + rng.uniform(0.25, 3)
        log_moment_m = rng.uniform(-5, 5)
        # Feasible: ln g = ln E(X^n)/n - ln E(X^m)/m > 0
        log_g = rng.uniform(1e-3, 20)
        mp = estimate.MomentPair.from_log_moments(n, m, n * (log_g + log_moment_m / m), log_moment_m)
        exact = estimate.lognormal_closed_form(mp)
        result = estimate.fit_lognormal(mp, config)
        assert abs(result.params.sigma - exact.sigma) <= config.delta
        assert abs(result.params.mu - exact.mu) <= 1e-8 * max(1.0, abs(exact.mu))


def test_fit_dispatch():
    mp = estimate.MomentPair(n=2, m=1, moment_n=2.0, moment_m=1.0)
    assert estimate.fit("weibull", mp).params == estimate.fit_weibull(mp).params
    assert estimate.fit("gamma", mp).dist == "gamma"
    assert estimate.fit("lognormal", mp).dist == "lognormal"
    with pytest.raises(DomainError):
        estimate.fit("cauchy", mp)
