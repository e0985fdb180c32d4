# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled 2x2 batch kernels for the Monte Carlo hot path.

Same contracts and layouts as `_kernels_py`; restricted to N == 2.
"""

import numpy as np

from libc.math cimport sqrt

ctypedef double complex cplx


def metric_tables(cplx[:, :, :, :, :, ::1] h, cplx[:, :, :, ::1] w):
    """Alignment (gamma) and direct-gain (beta) tables, float64 (T, 3, K, S)."""
    cdef Py_ssize_t t_n = h.shape[0], k_n = h.shape[1], s_n = w.shape[1]
    if h.shape[4] != 2 or h.shape[5] != 2 or w.shape[3] != 2:
        raise ValueError("compiled kernels require n == 2")
    if w.shape[0] != t_n:
        raise ValueError("h and w disagree on trial count")
    gamma_arr = np.empty((t_n, 3, k_n, s_n), dtype=np.float64)
    beta_arr = np.empty((t_n, 3, k_n, s_n), dtype=np.float64)
    cdef double[:, :, :, ::1] gamma = gamma_arr
    cdef double[:, :, :, ::1] beta = beta_arr
    cdef Py_ssize_t t, i, k, s, ip, idp
    cdef cplx w0, w1, u10, u11, u20, u21, d0
    cdef double n1, n2, num, g
    with nogil:
        for t in range(t_n):
            for i in range(3):
                ip = (i + 1) % 3
                idp = (i + 2) % 3
                for k in range(k_n):
                    for s in range(s_n):
                        w0 = w[t, s, ip, 0]
                        w1 = w[t, s, ip, 1]
                        u10 = h[t, k, i, ip, 0, 0] * w0 + h[t, k, i, ip, 0, 1] * w1
                        u11 = h[t, k, i, ip, 1, 0] * w0 + h[t, k, i, ip, 1, 1] * w1
                        w0 = w[t, s, idp, 0]
                        w1 = w[t, s, idp, 1]
                        u20 = h[t, k, i, idp, 0, 0] * w0 + h[t, k, i, idp, 0, 1] * w1
                        u21 = h[t, k, i, idp, 1, 0] * w0 + h[t, k, i, idp, 1, 1] * w1
                        d0 = u10.conjugate() * u20 + u11.conjugate() * u21
                        n1 = u10.real * u10.real + u10.imag * u10.imag \
                            + u11.real * u11.real + u11.imag * u11.imag
                        n2 = u20.real * u20.real + u20.imag * u20.imag \
                            + u21.real * u21.real + u21.imag * u21.imag
                        num = d0.real * d0.real + d0.imag * d0.imag
                        g = num / (n1 * n2)
                        gamma[t, i, k, s] = g if g < 1.0 else 1.0
                        w0 = w[t, s, i, 0]
                        w1 = w[t, s, i, 1]
                        u10 = h[t, k, i, i, 0, 0] * w0 + h[t, k, i, i, 0, 1] * w1
                        u11 = h[t, k, i, i, 1, 0] * w0 + h[t, k, i, i, 1, 1] * w1
                        beta[t, i, k, s] = u10.real * u10.real + u10.imag * u10.imag \
                            + u11.real * u11.real + u11.imag * u11.imag
    return gamma_arr, beta_arr


def max_sinr_eig(cplx[:, :, :, :, :, ::1] h, cplx[:, :, ::1] w,
                 double p_s, double p_i, double noise_var):
    """SINR-optimal receiver and SINR per (trial, cell, UE): (lam (T,3,K), v (T,3,K,2))."""
    cdef Py_ssize_t t_n = h.shape[0], k_n = h.shape[1]
    if h.shape[4] != 2 or h.shape[5] != 2 or w.shape[2] != 2:
        raise ValueError("compiled kernels require n == 2")
    if w.shape[0] != t_n:
        raise ValueError("h and w disagree on trial count")
    if noise_var <= 0.0:
        raise ValueError("noise_var must be > 0")
    lam_arr = np.empty((t_n, 3, k_n), dtype=np.float64)
    v_arr = np.empty((t_n, 3, k_n, 2), dtype=np.complex128)
    cdef double[:, :, ::1] lam = lam_arr
    cdef cplx[:, :, :, ::1] v = v_arr
    cdef Py_ssize_t t, i, k, ip, idp
    cdef cplx w0, w1, u10, u11, u20, u21, hv0, hv1, a01, x0, x1
    cdef double a00, a11, det, nrm, sqp
    sqp = sqrt(p_s)
    with nogil:
        for t in range(t_n):
            for i in range(3):
                ip = (i + 1) % 3
                idp = (i + 2) % 3
                for k in range(k_n):
                    w0 = w[t, ip, 0]
                    w1 = w[t, ip, 1]
                    u10 = h[t, k, i, ip, 0, 0] * w0 + h[t, k, i, ip, 0, 1] * w1
                    u11 = h[t, k, i, ip, 1, 0] * w0 + h[t, k, i, ip, 1, 1] * w1
                    w0 = w[t, idp, 0]
                    w1 = w[t, idp, 1]
                    u20 = h[t, k, i, idp, 0, 0] * w0 + h[t, k, i, idp, 0, 1] * w1
                    u21 = h[t, k, i, idp, 1, 0] * w0 + h[t, k, i, idp, 1, 1] * w1
                    w0 = w[t, i, 0]
                    w1 = w[t, i, 1]
                    hv0 = sqp * (h[t, k, i, i, 0, 0] * w0 + h[t, k, i, i, 0, 1] * w1)
                    hv1 = sqp * (h[t, k, i, i, 1, 0] * w0 + h[t, k, i, i, 1, 1] * w1)
                    a00 = noise_var + p_i * (u10.real * u10.real + u10.imag * u10.imag
                                             + u20.real * u20.real + u20.imag * u20.imag)
                    a11 = noise_var + p_i * (u11.real * u11.real + u11.imag * u11.imag
                                             + u21.real * u21.real + u21.imag * u21.imag)
                    a01 = p_i * (u10 * u11.conjugate() + u20 * u21.conjugate())
                    det = a00 * a11 - (a01.real * a01.real + a01.imag * a01.imag)
                    x0 = (a11 * hv0 - a01 * hv1) / det
                    x1 = (a00 * hv1 - a01.conjugate() * hv0) / det
                    lam[t, i, k] = (hv0.conjugate() * x0 + hv1.conjugate() * x1).real
                    nrm = sqrt(x0.real * x0.real + x0.imag * x0.imag
                               + x1.real * x1.real + x1.imag * x1.imag)
                    if nrm == 0.0:
                        v[t, i, k, 0] = 1.0
                        v[t, i, k, 1] = 0.0
                    else:
                        v[t, i, k, 0] = x0 / nrm
                        v[t, i, k, 1] = x1 / nrm
    return lam_arr, v_arr
