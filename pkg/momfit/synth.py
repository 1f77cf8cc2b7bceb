"""
Reproducible random variates of the three distributions.

Randomness comes from numpy's PCG64 bit generator, keyed by a 64-bit seed and a stream index through
``SeedSequence(seed, spawn_key=(stream,))``; the same (seed, stream) gives the same numbers on every platform.
On top of its raw integers everything is computed here:

- uniforms on the open interval (0, 1): u = (j + 1/2) / 2^52 for a uniform 52-bit integer j,
- normals: the Odeh-Evans rational approximation of the normal quantile applied to a uniform,
- Weibull: inverse transform x = lambda (-ln u)^(1/k), evaluated in the log domain,
- Log-normal: x = exp(mu + sigma z),
- Gamma: Marsaglia-Tsang squeeze/accept-reject over a normal proposal; for alpha < 1 a variate of shape
  alpha + 1 is multiplied by u^(1/alpha), again through logarithms.

The log-domain variates that underflow are clamped to the smallest positive double, so every output is > 0.
"""

import logging

import numpy as np

from .dist import GammaParams, LogNormalParams, WeibullParams
from .errors import DomainError

logger = logging.getLogger(__name__)

ALGORITHM = "PCG64"

_MANTISSA_BITS = 52
_SCALE = 2.0**-_MANTISSA_BITS
_TINY = np.nextafter(0.0, 1.0)

# Odeh & Evans normal quantile, |error| < 1.5e-8.
_P = (-0.322232431088, -1.0, -0.342242088547, -0.0204231210245, -0.453642210148e-4)
_Q = (0.0993484626060, 0.588581570495, 0.531103462366, 0.103537752850, 0.38560700634e-2)


def normal_quantile(u):
    """
    Standard normal quantile of ``u`` in (0, 1) by the Odeh-Evans rational approximation.

    Arguments:
        u: float or np.ndarray.

    Returns:
        np.ndarray (or float for scalar input).
    """
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=np.float64)
    if not np.all((u > 0) & (u < 1)):
        raise DomainError("normal_quantile is defined on the open interval (0, 1)")
    lower = u < 0.5
    t = np.sqrt(-2.0 * np.log(np.where(lower, u, 1.0 - u)))
    p = _P[4]
    q = _Q[4]
    for a, b in zip(_P[3::-1], _Q[3::-1]):
        p = p * t + a
        q = q * t + b
    z = t + p / q
    z = np.where(lower, -z, z)
    if scalar:
        return float(z)
    return z


class SeededGenerator:
    """
    Deterministic source of uniform and normal numbers.

    Arguments:
        seed: int. Unsigned 64-bit seed.
        stream: int. Stream index; distinct streams of one seed are independent.
    """

    algorithm = ALGORITHM

    def __init__(self, seed, stream=0):
        seed = int(seed)
        stream = int(stream)
        if not 0 <= seed < 2**64:
            raise DomainError(f"Seed must be an unsigned 64-bit integer, got {seed}")
        if stream < 0:
            raise DomainError(f"Stream index must be >= 0, got {stream}")
        self.seed = seed
        self.stream = stream
        self._rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))

    def __repr__(self):
        return f"{type(self).__name__}(seed={self.seed}, stream={self.stream})"

    def spawn(self, stream):
        return type(self)(self.seed, stream)

    def uniform(self, size):
        """``size`` uniforms strictly inside (0, 1)."""
        j = self._rng.integers(0, 1 << _MANTISSA_BITS, size=size, dtype=np.uint64)
        return (j.astype(np.float64) + 0.5) * _SCALE

    def normal(self, size):
        return normal_quantile(self.uniform(size))


def _positive_exp(log_x):
    # Variates below the smallest subnormal are clamped to it.
    return np.maximum(np.exp(log_x), _TINY)


def _sample_weibull(params, count, gen):
    return _positive_exp(np.log(params.lam) + np.log(-np.log(gen.uniform(count))) / params.k)


def _sample_lognormal(params, count, gen):
    return _positive_exp(params.mu + params.sigma * gen.normal(count))


def _marsaglia_tsang(alpha, count, gen):
    d = alpha - 1.0 / 3.0
    c = 1.0 / np.sqrt(9.0 * d)
    out = np.empty(count)
    filled = 0
    while filled < count:
        # Acceptance is above 95% for alpha >= 1.
        batch = max(16, int(1.1 * (count - filled)))
        z = gen.normal(batch)
        u = gen.uniform(batch)
        v = (1.0 + c * z) ** 3
        positive = v > 0
        z, u, v = z[positive], u[positive], v[positive]
        accept = (u < 1.0 - 0.0331 * z**4) | (np.log(u) < 0.5 * z * z + d * (1.0 - v + np.log(v)))
        accepted = d * v[accept]
        take = min(accepted.size, count - filled)
        out[filled : filled + take] = accepted[:take]
        filled += take
    return out


def _sample_gamma(params, count, gen):
    alpha = params.alpha
    if alpha >= 1.0:
        return params.beta * _marsaglia_tsang(alpha, count, gen)
    x = _marsaglia_tsang(alpha + 1.0, count, gen)
    return _positive_exp(np.log(params.beta * x) + np.log(gen.uniform(count)) / alpha)


def sample(params, count, gen):
    """
    Draw ``count`` variates of the distribution.

    Arguments:
        params: DistributionParams.
        count: int >= 1.
        gen: SeededGenerator.

    Returns:
        np.ndarray of shape (count,).
    """
    count = int(count)
    if count < 1:
        raise DomainError(f"Sample count must be >= 1, got {count}")
    if isinstance(params, WeibullParams):
        values = _sample_weibull(params, count, gen)
    elif isinstance(params, GammaParams):
        values = _sample_gamma(params, count, gen)
    elif isinstance(params, LogNormalParams):
        values = _sample_lognormal(params, count, gen)
    else:
        raise DomainError(f"Unsupported parameter record {params!r}")
    logger.debug("Drew %d %s variates with %r", count, params.kind, gen)
    return values
