# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementation of the numeric hot kernels.

Mirrors risloc._kernels_py exactly (same signatures and contracts); the
backend selector prefers this module when it compiled successfully.
"""
import numpy as np

from libc.math cimport M_PI, atan2, ceil, cos, erf as c_erf, floor, fmod, log, pow, sin, sqrt

cdef double TWO_PI = 2.0 * M_PI
cdef double INV_SQRT2 = 0.7071067811865475244
cdef int MAX_BINS = 1024


def erf(x):
    arr = np.asarray(x, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    out = np.empty_like(flat)
    cdef double[::1] xin = flat
    cdef double[::1] xout = out
    cdef Py_ssize_t i, n = flat.shape[0]
    for i in range(n):
        xout[i] = c_erf(xin[i])
    res = out.reshape(arr.shape)
    return res[()] if arr.ndim == 0 else res


cdef inline double _dist(double[:, ::1] pts, Py_ssize_t row, double ux, double uy, double uz) noexcept nogil:
    cdef double dx = ux - pts[row, 0]
    cdef double dy = uy - pts[row, 1]
    cdef double dz = uz - pts[row, 2]
    return sqrt(dx * dx + dy * dy + dz * dz)


cdef inline double _dist_ref(double[::1] ref, double ux, double uy, double uz) noexcept nogil:
    cdef double dx = ux - ref[0]
    cdef double dy = uy - ref[1]
    cdef double dz = uz - ref[2]
    return sqrt(dx * dx + dy * dy + dz * dz)


def coherent_phases(elem_pos, ris_ref, bs_pos, bs_ref, h_rb, double gamma0,
                    double d0, double beta, double wavelength, u_ru, u_d):
    """See risloc._kernels_py.coherent_phases."""
    cdef double[:, ::1] elem = np.ascontiguousarray(elem_pos, dtype=np.float64)
    cdef double[::1] rref = np.ascontiguousarray(ris_ref, dtype=np.float64)
    cdef double[:, ::1] bpos = np.ascontiguousarray(bs_pos, dtype=np.float64)
    cdef double[::1] bref = np.ascontiguousarray(bs_ref, dtype=np.float64)
    cdef double complex[:, ::1] hrb = np.ascontiguousarray(h_rb, dtype=np.complex128)
    uru_arr = np.ascontiguousarray(np.atleast_2d(np.asarray(u_ru, dtype=np.float64)))
    ud_arr = np.ascontiguousarray(np.atleast_2d(np.asarray(u_d, dtype=np.float64)))
    cdef double[:, ::1] uru = uru_arr
    cdef double[:, ::1] ud = ud_arr

    cdef Py_ssize_t n_pos = uru.shape[0]
    cdef Py_ssize_t n_elem = elem.shape[0]
    cdef Py_ssize_t n_bs = bpos.shape[0]
    out = np.empty((n_pos, n_elem), dtype=np.float64)
    cdef double[:, ::1] theta = out
    hd_buf = np.empty(n_bs, dtype=np.complex128)
    cdef double complex[::1] hd = hd_buf

    cdef double k = TWO_PI / wavelength
    cdef double half_beta = beta / 2.0
    cdef double amp_scale = sqrt(gamma0)
    cdef Py_ssize_t p, n, m
    cdef double dref_b, dref_r, d, amp, ph, t
    cdef double complex v

    with nogil:
        for p in range(n_pos):
            dref_b = _dist_ref(bref, ud[p, 0], ud[p, 1], ud[p, 2])
            for m in range(n_bs):
                d = _dist(bpos, m, ud[p, 0], ud[p, 1], ud[p, 2])
                amp = amp_scale * pow(d0 / d, half_beta)
                ph = -k * (d - dref_b)
                hd[m] = amp * (cos(ph) + 1j * sin(ph))
            dref_r = _dist_ref(rref, uru[p, 0], uru[p, 1], uru[p, 2])
            for n in range(n_elem):
                v = 0
                for m in range(n_bs):
                    v = v + hrb[n, m] * hd[m]
                d = _dist(elem, n, uru[p, 0], uru[p, 1], uru[p, 2])
                # theta = angle(v) - angle(h_ru), h_ru phase is -k (d - dref_r)
                t = atan2(v.imag, v.real) + k * (d - dref_r)
                t = fmod(t, TWO_PI)
                if t < 0:
                    t += TWO_PI
                theta[p, n] = t
    return out


cdef inline int _wrap_terms(double sigma) noexcept nogil:
    cdef int k = <int> ceil((7.5 * sigma + M_PI) / TWO_PI)
    if k < 1:
        k = 1
    return k


cdef inline void _pmf_row(double x, double sigma, int n_bins, double delta,
                          int kmax, double inv_s, double* row) noexcept nogil:
    """Normalized bin masses of a wrapped Gaussian centred at x."""
    cdef int b, kk
    cdef double lo, hi, acc, total = 0.0, shift
    for b in range(n_bins):
        lo = delta * (b - 0.5)
        hi = delta * (b + 0.5)
        acc = 0.0
        for kk in range(-kmax, kmax + 1):
            shift = TWO_PI * kk - x
            acc += 0.5 * (c_erf((hi + shift) * inv_s) - c_erf((lo + shift) * inv_s))
        if acc < 0.0:
            acc = 0.0
        row[b] = acc
        total += acc
    for b in range(n_bins):
        row[b] /= total


def quantized_pmf(theta, double sigma, int q_bits):
    """See risloc._kernels_py.quantized_pmf."""
    arr = np.asarray(theta, dtype=np.float64)
    flat = np.ascontiguousarray(arr.reshape(-1))
    cdef double[::1] x = flat
    cdef int n_bins = 1 << q_bits
    if n_bins > MAX_BINS:
        raise ValueError(f"q_bits too large for the compiled kernel (max {MAX_BINS} bins)")
    out = np.zeros((flat.shape[0], n_bins), dtype=np.float64)
    cdef double[:, ::1] probs = out
    cdef double delta = TWO_PI / n_bins
    cdef Py_ssize_t i, n = flat.shape[0]
    cdef int b, kmax
    cdef double inv_s
    cdef double row[1024]

    if sigma == 0.0:
        for i in range(n):
            b = <int> floor(x[i] / delta + 0.5) % n_bins
            if b < 0:
                b += n_bins
            probs[i, b] = 1.0
    else:
        kmax = _wrap_terms(sigma)
        inv_s = INV_SQRT2 / sigma
        with nogil:
            for i in range(n):
                _pmf_row(x[i], sigma, n_bins, delta, kmax, inv_s, row)
                for b in range(n_bins):
                    probs[i, b] = row[b]
    return out.reshape(arr.shape + (n_bins,))


cdef inline double _wrap_signed(double d) noexcept nogil:
    d = fmod(d + M_PI, TWO_PI)
    if d < 0:
        d += TWO_PI
    return d - M_PI


def fi_stencil(theta, double sigma, int q_bits, double fd_step, double clamp=1e-300):
    """See risloc._kernels_py.fi_stencil."""
    arr = np.ascontiguousarray(np.asarray(theta, dtype=np.float64))
    if arr.ndim != 2 or arr.shape[0] != 5:
        raise ValueError("theta must have shape (5, K)")
    cdef double[:, ::1] th = arr
    cdef Py_ssize_t n = arr.shape[1]
    jxx_a = np.empty(n, dtype=np.float64)
    jxy_a = np.empty(n, dtype=np.float64)
    jyy_a = np.empty(n, dtype=np.float64)
    info_a = np.empty(n, dtype=np.float64)
    flags_a = np.zeros(n, dtype=np.uint8)
    cdef double[::1] jxx = jxx_a
    cdef double[::1] jxy = jxy_a
    cdef double[::1] jyy = jyy_a
    cdef double[::1] info = info_a
    cdef unsigned char[::1] flags = flags_a

    cdef double inv2h = 1.0 / (2.0 * fd_step)
    cdef Py_ssize_t i
    cdef int b, s, n_bins, kmax
    cdef double dx, dy, inv_var, inv_s, delta
    cdef double gx, gy, w0, axx, axy, ayy
    cdef double pr[5][1024]
    cdef double lp[5][1024]

    if q_bits == 0:
        inv_var = 1.0 / (sigma * sigma)
        with nogil:
            for i in range(n):
                dx = _wrap_signed(th[1, i] - th[2, i]) * inv2h
                dy = _wrap_signed(th[3, i] - th[4, i]) * inv2h
                jxx[i] = dx * dx * inv_var
                jxy[i] = dx * dy * inv_var
                jyy[i] = dy * dy * inv_var
                info[i] = jxx[i] + jyy[i]
        return jxx_a, jxy_a, jyy_a, info_a, flags_a

    n_bins = 1 << q_bits
    if n_bins > MAX_BINS:
        raise ValueError(f"q_bits too large for the compiled kernel (max {MAX_BINS} bins)")
    delta = TWO_PI / n_bins
    kmax = _wrap_terms(sigma)
    inv_s = INV_SQRT2 / sigma
    with nogil:
        for i in range(n):
            for s in range(5):
                _pmf_row(th[s, i], sigma, n_bins, delta, kmax, inv_s, &pr[s][0])
                for b in range(n_bins):
                    if pr[s][b] < clamp:
                        flags[i] = 1
                        lp[s][b] = log(clamp)
                    else:
                        lp[s][b] = log(pr[s][b])
            axx = 0.0
            axy = 0.0
            ayy = 0.0
            for b in range(n_bins):
                gx = (lp[1][b] - lp[2][b]) * inv2h
                gy = (lp[3][b] - lp[4][b]) * inv2h
                w0 = pr[0][b]
                axx += w0 * gx * gx
                axy += w0 * gx * gy
                ayy += w0 * gy * gy
            jxx[i] = axx
            jxy[i] = axy
            jyy[i] = ayy
            info[i] = axx + ayy
    return jxx_a, jxy_a, jyy_a, info_a, flags_a
