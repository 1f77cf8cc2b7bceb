#!/usr/bin/python

from .common import SolverConfig
from .dist import GammaParams, LogNormalParams, WeibullParams, make_params
from .empirical import compute_raw_moments, load_samples
from .estimate import FitResult, MomentPair, fit, fit_gamma, fit_lognormal, fit_weibull
from .synth import SeededGenerator, sample
from .version import __version__
