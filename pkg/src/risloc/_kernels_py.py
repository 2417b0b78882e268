"""Pure numpy implementation of the numeric hot kernels.

`risloc._kernels` (Cython) mirrors these signatures; `risloc._backend` picks
whichever is importable. Everything here is deterministic and stateless.
"""
import numpy as np

TWO_PI = 2.0 * np.pi

# Rational erf approximation (max absolute error 1.5e-7), odd by construction.
_P = 0.3275911
_A1 = 0.254829592
_A2 = -0.284496736
_A3 = 1.421413741
_A4 = -1.453152027
_A5 = 1.061405429


def erf(x):
    x = np.asarray(x, dtype=float)
    sign = np.sign(x)
    ax = np.abs(x)
    t = 1.0 / (1.0 + _P * ax)
    poly = ((((_A5 * t + _A4) * t + _A3) * t + _A2) * t + _A1) * t
    return sign * (1.0 - poly * np.exp(-ax * ax))


def _normal_cdf(z):
    return 0.5 * (1.0 + erf(z / np.sqrt(2.0)))


def _wrap_mass_terms(sigma):
    # Lattice shifts so that the Gaussian mass missed by the wrap sum stays
    # below 1e-13 for means anywhere in [0, 2*pi).
    return max(1, int(np.ceil((7.5 * sigma + np.pi) / TWO_PI)))


def coherent_phases(elem_pos, ris_ref, bs_pos, bs_ref, h_rb, gamma0, d0, beta,
                    wavelength, u_ru, u_d):
    """Noiseless coherent-paths configuration for a batch of UE positions.

    The precoder is matched to the direct channel, which makes the direct-path
    scalar real positive; phases then align every reflected summand with it.
    ``u_ru`` is the position seen by the surface (the mirror image under a
    reflected path), ``u_d`` the true position seen by the transmitter array.
    Returns an array of shape (P, N) with entries in [0, 2*pi).
    """
    k = TWO_PI / wavelength
    u_ru = np.atleast_2d(np.asarray(u_ru, float))
    u_d = np.atleast_2d(np.asarray(u_d, float))

    dd = np.linalg.norm(u_d[:, None, :] - bs_pos[None, :, :], axis=2)  # (P, M)
    dref_b = np.linalg.norm(u_d - bs_ref[None, :], axis=1)  # (P,)
    h_d = np.sqrt(gamma0) * (d0 / dd) ** (beta / 2.0) * np.exp(-1j * k * (dd - dref_b[:, None]))
    w = h_d / np.linalg.norm(h_d, axis=1)[:, None]

    v = w @ h_rb.T  # (P, N), row p holds h_rb @ w_p

    de = np.linalg.norm(u_ru[:, None, :] - elem_pos[None, :, :], axis=2)  # (P, N)
    dref_r = np.linalg.norm(u_ru - ris_ref[None, :], axis=1)
    h_ru = np.sqrt(gamma0) * (d0 / de) ** (beta / 2.0) * np.exp(-1j * k * (de - dref_r[:, None]))

    s = np.conj(v) * h_ru
    return (-np.angle(s)) % TWO_PI


def quantized_pmf(theta, sigma, q_bits):
    """Bin probabilities of the quantized noisy phase.

    ``theta`` holds the noiseless phases (any shape); the returned array has
    one trailing axis of length 2**q_bits. Rows are renormalized so they sum
    to 1 exactly, which keeps downstream log-gradient identities consistent.
    """
    theta = np.asarray(theta, dtype=float)
    n_bins = 1 << q_bits
    delta = TWO_PI / n_bins
    flat = theta.reshape(-1)

    if sigma == 0.0:
        m = np.floor(flat / delta + 0.5).astype(np.int64) % n_bins
        probs = np.zeros((flat.size, n_bins))
        probs[np.arange(flat.size), m] = 1.0
        return probs.reshape(theta.shape + (n_bins,))

    kmax = _wrap_mass_terms(sigma)
    edges = delta * (np.arange(n_bins + 1) - 0.5)  # shared by adjacent bins
    shifts = TWO_PI * np.arange(-kmax, kmax + 1)
    args = (edges[None, None, :] + shifts[None, :, None] - flat[:, None, None]) / sigma
    cdf = _normal_cdf(args)  # (K, 2k+1, n_bins+1)
    probs = (cdf[:, :, 1:] - cdf[:, :, :-1]).sum(axis=1)
    probs = np.clip(probs, 0.0, None)
    probs /= probs.sum(axis=1)[:, None]
    return probs.reshape(theta.shape + (n_bins,))


def fi_stencil(theta, sigma, q_bits, fd_step, clamp=1e-300):
    """Per-element Fisher information from a five-point phase stencil.

    ``theta`` has shape (5, N): the noiseless phases at the centre point and
    at +x, -x, +y, -y displacements of ``fd_step`` metres. For quantized
    phases the score is the central difference of each bin log-probability,
    averaged under the centre-point distribution. For continuous phases
    (``q_bits == 0``) the Gaussian-observation form is used instead.

    Returns (j_xx, j_xy, j_yy, info, flags); ``flags`` marks elements whose
    stencil needed probability clamping and should be treated as unreliable.
    """
    theta = np.asarray(theta, dtype=float)
    n = theta.shape[1]
    inv2h = 1.0 / (2.0 * fd_step)

    if q_bits == 0:
        dx = ((theta[1] - theta[2] + np.pi) % TWO_PI - np.pi) * inv2h
        dy = ((theta[3] - theta[4] + np.pi) % TWO_PI - np.pi) * inv2h
        inv_var = 1.0 / (sigma * sigma)
        j_xx = dx * dx * inv_var
        j_xy = dx * dy * inv_var
        j_yy = dy * dy * inv_var
        flags = np.zeros(n, dtype=np.uint8)
        return j_xx, j_xy, j_yy, j_xx + j_yy, flags

    probs = quantized_pmf(theta, sigma, q_bits)  # (5, N, B)
    flags = (probs < clamp).any(axis=(0, 2)).astype(np.uint8)
    lnp = np.log(np.clip(probs, clamp, None))
    gx = (lnp[1] - lnp[2]) * inv2h  # (N, B)
    gy = (lnp[3] - lnp[4]) * inv2h
    w0 = probs[0]
    j_xx = (w0 * gx * gx).sum(axis=1)
    j_xy = (w0 * gx * gy).sum(axis=1)
    j_yy = (w0 * gy * gy).sum(axis=1)
    return j_xx, j_xy, j_yy, j_xx + j_yy, flags
