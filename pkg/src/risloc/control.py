"""Coherent-paths configuration, phase noise, quantization and rate.

Phases are stored in [0, 2*pi). The quantized feasible set at Q bits is
{delta * m : m = 0 .. 2**Q - 1} with delta = 2*pi / 2**Q.
"""
import warnings
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import InvalidArgumentError
from .geometry import assemble_channels

TWO_PI = 2.0 * np.pi


def wrap_two_pi(x):
    return np.asarray(x, float) % TWO_PI


def wrap_pm_pi(x):
    return (np.asarray(x, float) + np.pi) % TWO_PI - np.pi


def angdiff(a, b):
    """Wrapped absolute angular difference, in [0, pi]."""
    return np.abs((np.asarray(a, float) - np.asarray(b, float) + np.pi) % TWO_PI - np.pi)


@dataclass(frozen=True)
class RisConfig:
    phases: np.ndarray
    quantized: bool = False
    q_bits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phases", np.asarray(self.phases, float))

    @property
    def n_elements(self):
        return self.phases.size


@dataclass(frozen=True)
class Precoder:
    w: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.w, complex)
        norm = np.linalg.norm(w)
        if abs(norm - 1.0) > 1e-12:
            raise InvalidArgumentError("precoder must have unit norm")
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class ElementPmf:
    """Probabilities over the quantized phase bins delta * m."""

    probs: np.ndarray
    q_bits: int

    @property
    def delta(self):
        return TWO_PI / (1 << self.q_bits)


def mrt_precoder(h_d):
    """Matched (maximum-ratio) precoder on the direct channel."""
    h_d = np.asarray(h_d, complex)
    norm = np.linalg.norm(h_d)
    if norm == 0:
        raise InvalidArgumentError("cannot match a zero direct channel")
    return Precoder(h_d / norm)


def reflected_summand_coefficients(channels, w):
    """Per-element complex coefficients s_n of the reflected-path sum
    w^H H^H diag(e^{j theta}) h_ru = sum_n e^{j theta_n} s_n."""
    v = channels.h_rb @ w.w
    return np.conj(v) * channels.h_ru


def coherent_config(channels, w):
    """Closed-form phases aligning every reflected summand with the direct path.

    Each phase rotates its reflected summand onto the phase of the direct-path
    scalar z_d = w^H h_d, maximizing the coherent sum. A vanishing direct path
    degrades gracefully: the alignment target falls back to phase 0 and a
    warning is emitted.
    """
    s = reflected_summand_coefficients(channels, w)
    z_d = np.vdot(w.w, channels.h_d)
    if z_d == 0:
        warnings.warn("no direct path: aligning reflected summands to phase 0",
                      RuntimeWarning, stacklevel=2)
        target = 0.0
    else:
        target = np.angle(z_d)
    phases = wrap_two_pi(target - np.angle(s))
    return RisConfig(phases=phases, quantized=False, q_bits=0)


def sigma_from_snr(snr):
    """Phase-noise spread implied by the estimation SNR: 1 / sqrt(2 * snr)."""
    if snr <= 0:
        raise InvalidArgumentError("snr must be positive")
    return 1.0 / np.sqrt(2.0 * snr)


def apply_phase_noise(config, sigma_theta, rng_seed):
    """Add i.i.d. zero-mean Gaussian phase errors and rewrap.

    ``rng_seed`` may be an int seed or a numpy Generator, so parallel callers
    can hand independent substreams. Deterministic for a given seed.
    """
    if config.quantized:
        raise InvalidArgumentError("phase noise applies to continuous configurations")
    if sigma_theta < 0:
        raise InvalidArgumentError("sigma_theta must be nonnegative")
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    noise = rng.normal(0.0, 1.0, config.n_elements) * sigma_theta
    return RisConfig(phases=wrap_two_pi(config.phases + noise), quantized=False, q_bits=0)


def quantize_config(config, q_bits):
    """Round each phase to the nearest lattice value delta * m (ties up)."""
    if q_bits < 1:
        raise InvalidArgumentError("quantization needs at least 1 bit")
    n_bins = 1 << q_bits
    delta = TWO_PI / n_bins
    m = np.floor(config.phases / delta + 0.5).astype(np.int64) % n_bins
    return RisConfig(phases=delta * m, quantized=True, q_bits=q_bits)


def quantized_element_pmf(theta_star_n, sigma_theta, q_bits):
    """Distribution of one element's quantized noisy phase.

    Bin masses are Gaussian-CDF differences accumulated over enough 2*pi
    lattice shifts that the truncated mass is below 1e-13, then renormalized.
    A zero spread degenerates to all mass on the nearest lattice value.
    """
    if sigma_theta < 0:
        raise InvalidArgumentError("sigma_theta must be nonnegative")
    if q_bits < 1:
        raise InvalidArgumentError("quantization needs at least 1 bit")
    probs = _backend.quantized_pmf(np.array([float(theta_star_n)]), float(sigma_theta), q_bits)[0]
    return ElementPmf(probs=probs, q_bits=q_bits)


def ris_reflection(config):
    """Diagonal of the surface response, e^{j theta}."""
    return np.exp(1j * config.phases)


def achievable_rate(channels, w, config, tx_power, noise_power):
    """Spectral efficiency log2(1 + snr * |w^H (H^H diag(e^{j theta}) h_ru + h_d)|^2)."""
    reflected = channels.h_rb.conj().T @ (ris_reflection(config) * channels.h_ru)
    received = np.vdot(w.w, reflected + channels.h_d)
    return float(np.log2(1.0 + (tx_power / noise_power) * np.abs(received) ** 2))


def ideal_config(scenario, u):
    """Noiseless configuration pipeline: channels, matched precoder, coherent phases."""
    channels = assemble_channels(scenario, u)
    w = mrt_precoder(channels.h_d)
    return coherent_config(channels, w)


def grid_search_estimator(observed, scenario, candidate_grid):
    """Nearest-candidate estimator over wrapped phase residuals.

    Compares the observed configuration against the noiseless pipeline output
    at each candidate position and returns the candidate minimizing the
    Euclidean norm of elementwise wrapped differences (lowest index on ties).
    """
    candidates = list(candidate_grid)
    if not candidates:
        raise InvalidArgumentError("candidate grid must be nonempty")
    residuals = np.empty(len(candidates))
    for i, cand in enumerate(candidates):
        ref = ideal_config(scenario, cand)
        residuals[i] = np.linalg.norm(angdiff(ref.phases, observed.phases))
    return candidates[int(np.argmin(residuals))]
