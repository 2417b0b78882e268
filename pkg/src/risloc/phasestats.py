"""Statistics of the phase of a noisy complex channel sample.

A sample is h = u + jv with independent Gaussian components of variance 1/2
around a mean of magnitude sqrt(snr); its angle concentrates around mu_theta
as the SNR grows. The exact marginal density, its high-SNR Gaussian
approximation, sampling and a Kolmogorov-Smirnov distance live here.
"""
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import InvalidArgumentError

SQRT_PI = np.sqrt(np.pi)


@dataclass(frozen=True)
class PhaseDistParams:
    """Mean angle mu_theta in (-pi, pi] and SNR gamma >= 0."""

    mu_theta: float
    gamma: float

    def __post_init__(self):
        if not np.isfinite(self.gamma) or self.gamma < 0:
            raise InvalidArgumentError("gamma must be finite and nonnegative")
        if not -np.pi < self.mu_theta <= np.pi:
            raise InvalidArgumentError("mu_theta must lie in (-pi, pi]")

    @property
    def sigma_theta(self):
        """High-SNR spread 1 / sqrt(2 * gamma)."""
        if self.gamma == 0:
            return np.inf
        return 1.0 / np.sqrt(2.0 * self.gamma)


def erf(x):
    """Error function, absolute error at most 1.5e-7, odd in x."""
    out = _backend.erf(x)
    return float(out) if np.ndim(out) == 0 else out


def marginal_theta_pdf(theta, params):
    """Exact phase density:
    (1/2pi) e^{-g} + (sqrt(g)/2sqrt(pi)) cos(d) e^{-g sin^2 d} [1 + erf(sqrt(g) cos d)]
    with d = mu_theta - theta. Nonnegative, unit mass over any 2*pi window.
    """
    theta = np.asarray(theta, float)
    g = params.gamma
    d = params.mu_theta - theta
    cos_d = np.cos(d)
    base = np.exp(-g) / (2.0 * np.pi)
    bulge = (np.sqrt(g) / (2.0 * SQRT_PI)) * cos_d * np.exp(-g * np.sin(d) ** 2)
    out = base + bulge * (1.0 + _backend.erf(np.sqrt(g) * cos_d))
    return float(out) if np.ndim(out) == 0 else out


def gaussian_approx_pdf(theta, params):
    """High-SNR limit sqrt(g/pi) e^{-g (mu_theta - theta)^2}, i.e. a normal
    density with variance 1/(2g)."""
    if params.gamma <= 0:
        raise InvalidArgumentError("the Gaussian limit needs a positive gamma")
    theta = np.asarray(theta, float)
    g = params.gamma
    out = np.sqrt(g / np.pi) * np.exp(-g * (params.mu_theta - theta) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def rayleigh_pdf(r):
    """Magnitude density r e^{-r^2/2} of a unit-variance-component complex
    Gaussian; zero for negative arguments by convention."""
    r = np.asarray(r, float)
    out = np.where(r >= 0, r * np.exp(-0.5 * r * r), 0.0)
    return float(out) if np.ndim(out) == 0 else out


def sample_phase(params, n, rng_seed):
    """Draw n phases as angles of u + jv, u ~ N(sqrt(g) cos mu, 1/2),
    v ~ N(sqrt(g) sin mu, 1/2). Deterministic for a given seed; values in
    (-pi, pi]."""
    if n < 1:
        raise InvalidArgumentError("need at least one sample")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    amp = np.sqrt(params.gamma)
    scale = np.sqrt(0.5)
    u = amp * np.cos(params.mu_theta) + scale * rng.standard_normal(n)
    v = amp * np.sin(params.mu_theta) + scale * rng.standard_normal(n)
    return np.arctan2(v, u)


def ks_distance(samples, cdf):
    """Two-sided Kolmogorov-Smirnov statistic of samples against a CDF."""
    s = np.sort(np.asarray(samples, float))
    if s.size == 0:
        raise InvalidArgumentError("samples must be nonempty")
    f = np.asarray(cdf(s), float)
    n = s.size
    hi = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


def marginal_theta_cdf(params, resolution=16384):
    """Numeric CDF of the exact marginal on [mu - pi, mu + pi], as a callable.

    Trapezoid accumulation on a uniform grid; the density is smooth, so the
    approximation error is far below Monte Carlo testing tolerances.
    """
    lo = params.mu_theta - np.pi
    grid = np.linspace(lo, params.mu_theta + np.pi, resolution + 1)
    pdf = marginal_theta_pdf(grid, params)
    steps = np.diff(grid) * 0.5 * (pdf[1:] + pdf[:-1])
    cum = np.concatenate([[0.0], np.cumsum(steps)])
    cum /= cum[-1]

    def cdf(x):
        return np.interp(np.asarray(x, float), grid, cum)

    return cdf
